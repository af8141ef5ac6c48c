// Test support: a node:http fetch shim (independent of the DOM emulator's
// network stack), a workbench server runner, and a scripted mock fetch.

import { spawn, execFileSync, ChildProcess } from "node:child_process";
import * as http from "node:http";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike, FetchResponse } from "../src/api.js";

export const REPO_ROOT = path.resolve(path.dirname(fileURLToPath(import.meta.url)), "..", "..");
export const FIXTURES = path.join(REPO_ROOT, "fixtures");

export const nodeFetch: FetchLike = (url, init) =>
  new Promise<FetchResponse>((resolve, reject) => {
    const request = http.request(
      url,
      {
        method: init?.method ?? "GET",
        headers: (init?.headers as Record<string, string>) ?? {},
      },
      (response) => {
        const chunks: Buffer[] = [];
        response.on("data", (chunk) => chunks.push(chunk));
        response.on("end", () => {
          const body = Buffer.concat(chunks).toString("utf-8");
          const status = response.statusCode ?? 0;
          resolve({
            ok: status >= 200 && status < 300,
            status,
            json: () => Promise.resolve(JSON.parse(body)),
            text: () => Promise.resolve(body),
          });
        });
      },
    );
    request.on("error", reject);
    if (init?.body) request.write(init.body);
    request.end();
  });

export async function until(check: () => boolean, timeoutMs = 10000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (check()) return;
    await new Promise((r) => setTimeout(r, 25));
  }
  throw new Error("condition not reached in time");
}

export interface ServerHandle {
  base: string;
  dataDir: string;
  stop(): void;
}

export async function startServer(dataDir: string): Promise<ServerHandle> {
  const port = 20000 + Math.floor(Math.random() * 20000);
  const base = `http://127.0.0.1:${port}`;
  const child: ChildProcess = spawn(
    "python3",
    [
      "-m", "parafact", "serve",
      "--net", path.join(FIXTURES, "acq-net.net"),
      "--corpus", path.join(FIXTURES, "corpus"),
      "--lexicon", path.join(FIXTURES, "lexicon.tsv"),
      "--stopwords", path.join(FIXTURES, "stopwords.txt"),
      "--gazetteer", path.join(FIXTURES, "gazetteer.tsv"),
      "--data", dataDir,
      "--listen", `127.0.0.1:${port}`,
    ],
    { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] },
  );
  let stderr = "";
  child.stderr?.on("data", (chunk) => (stderr += String(chunk)));

  const deadline = Date.now() + 20000;
  while (Date.now() < deadline) {
    try {
      const response = await nodeFetch(`${base}/api/v1/rounds`);
      if (response.ok) return { base, dataDir, stop: () => child.kill("SIGTERM") };
    } catch {
      // not listening yet
    }
    if (child.exitCode !== null) break;
    await new Promise((r) => setTimeout(r, 100));
  }
  child.kill("SIGTERM");
  throw new Error(`workbench service did not come up: ${stderr}`);
}

export function runCli(args: string[]): string {
  return execFileSync("python3", ["-m", "parafact", ...args], {
    cwd: REPO_ROOT,
    encoding: "utf-8",
  });
}

export interface RecordedCall {
  url: string;
  method: string;
  body?: unknown;
}

/** Mock fetch driven by a route table: "METHOD path-prefix" -> payload or thrower. */
export function mockFetch(
  routes: Record<string, (() => unknown) | unknown>,
): { fetch: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetch: FetchLike = (url, init) => {
    const method = init?.method ?? "GET";
    calls.push({ url, method, body: init?.body ? JSON.parse(String(init.body)) : undefined });
    for (const [route, handler] of Object.entries(routes)) {
      const [routeMethod, prefix] = route.split(" ", 2);
      if (method === routeMethod && url.split("?")[0] === prefix) {
        try {
          const payload = typeof handler === "function" ? (handler as () => unknown)() : handler;
          return Promise.resolve({
            ok: true,
            status: 200,
            json: () => Promise.resolve(payload),
            text: () => Promise.resolve(JSON.stringify(payload)),
          });
        } catch (error) {
          return Promise.reject(error);
        }
      }
    }
    return Promise.resolve({
      ok: false,
      status: 404,
      json: () => Promise.resolve({ code: "not-found", message: url }),
      text: () => Promise.resolve("not found"),
    });
  };
  return { fetch, calls };
}
