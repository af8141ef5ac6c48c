import { ApiClient } from "./api.js";
import { ReviewApp } from "./app.js";

const root = document.querySelector<HTMLElement>("#app");
if (!root) throw new Error("missing #app mount point");

const app = new ReviewApp(root, new ApiClient(""), "analyst");
void app.start();
