// Review workbench: keyboard-first triage over the candidate queue plus a
// rounds dashboard. The server is the only source of truth; this module
// renders API payloads verbatim and funnels every mutation through
// POST /decisions and POST /rounds…

import { ApiClient, Candidate, Round, Seed, Snippet } from "./api.js";

interface PendingDecision {
  candidateId: string;
  verdict: "accept" | "reject";
}

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class ReviewApp {
  rounds: Round[] = [];
  queue: Candidate[] = [];
  snippets: Snippet[] = [];
  pending: PendingDecision[] = [];
  promotedSeeds: Seed[] | null = null;
  banner = "";

  private keyHandler = (event: KeyboardEvent) => this.onKey(event);
  private onlineHandler = () => void this.retryPending();

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private annotator = "analyst",
  ) {}

  async start(): Promise<void> {
    document.addEventListener("keydown", this.keyHandler);
    window.addEventListener("online", this.onlineHandler);
    await this.load();
  }

  stop(): void {
    document.removeEventListener("keydown", this.keyHandler);
    window.removeEventListener("online", this.onlineHandler);
  }

  get currentRound(): Round | null {
    return this.rounds.length ? this.rounds[this.rounds.length - 1]! : null;
  }

  get current(): Candidate | null {
    return this.queue.length ? this.queue[0]! : null;
  }

  /** Pull the complete state from the server (also the reload path). */
  async load(): Promise<void> {
    try {
      this.rounds = await this.api.rounds();
      const round = this.currentRound;
      this.queue = round ? await this.api.candidates("proposed", round.id) : [];
      this.snippets = this.current ? await this.api.concordance(this.current.id) : [];
      this.banner = "";
    } catch (error) {
      this.banner = `cannot reach the workbench service: ${String(error)}`;
    }
    this.render();
  }

  private onKey(event: KeyboardEvent): void {
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === "INPUT" || target.tagName === "TEXTAREA")) return;
    if (event.key === "a") void this.decide("accept");
    else if (event.key === "r") void this.decide("reject");
    else if (event.key === "s") this.skip();
  }

  skip(): void {
    if (this.queue.length > 1) {
      this.queue.push(this.queue.shift()!);
      void this.refreshSnippets();
    }
    this.render();
  }

  async decide(verdict: "accept" | "reject"): Promise<void> {
    const candidate = this.current;
    if (!candidate) return;
    // optimistic: drop from the queue right away, reconcile with the reply
    candidate.status = verdict === "accept" ? "accepted" : "rejected";
    this.queue.shift();
    void this.refreshSnippets();
    this.render();
    try {
      const updated = await this.api.decide(candidate.id, verdict, this.annotator);
      candidate.status = updated.status;
      await this.refreshStats();
    } catch (error) {
      this.pending.push({ candidateId: candidate.id, verdict });
      this.banner = `decision not saved (${String(error)}); will retry on reconnect`;
    }
    this.render();
  }

  /** Re-send decisions that failed; called on the browser online event. */
  async retryPending(): Promise<void> {
    const queued = this.pending.splice(0);
    let failed = false;
    for (const decision of queued) {
      try {
        await this.api.decide(decision.candidateId, decision.verdict, this.annotator);
      } catch {
        this.pending.push(decision);
        failed = true;
      }
    }
    if (!failed) this.banner = "";
    await this.refreshStats();
    this.render();
  }

  private async refreshSnippets(): Promise<void> {
    const candidate = this.current;
    try {
      this.snippets = candidate ? await this.api.concordance(candidate.id) : [];
    } catch {
      this.snippets = [];
    }
    this.render();
  }

  private async refreshStats(): Promise<void> {
    try {
      this.rounds = await this.api.rounds();
    } catch {
      // stats refresh is best-effort; the banner already reports outages
    }
  }

  async promote(): Promise<void> {
    const round = this.currentRound;
    if (!round) return;
    try {
      const result = await this.api.promote(round.id);
      this.promotedSeeds = result.seeds;
      this.banner = "";
    } catch (error) {
      this.banner = `promotion failed: ${String(error)}`;
    }
    this.render();
  }

  async startNextRound(): Promise<void> {
    const round = this.currentRound;
    if (!round || !this.promotedSeeds) return;
    await this.startRound(this.promotedSeeds, round.threshold);
    this.promotedSeeds = null;
  }

  async startRound(seeds: Seed[], threshold: number): Promise<void> {
    try {
      await this.api.startRound(seeds, threshold);
      this.banner = "";
      await this.load();
    } catch (error) {
      this.banner = `could not start the round: ${String(error)}`;
      this.render();
    }
  }

  // --- rendering -----------------------------------------------------------

  render(): void {
    this.root.textContent = "";
    this.root.append(this.renderBanner(), this.renderQueue(), this.renderDashboard());
  }

  private renderBanner(): HTMLElement {
    const banner = el("div", this.banner ? "banner visible" : "banner");
    banner.id = "banner";
    if (this.banner) {
      banner.append(el("span", "banner-text", this.banner));
      if (this.pending.length) {
        const retry = el("button", "retry", "retry now") as HTMLButtonElement;
        retry.addEventListener("click", () => void this.retryPending());
        banner.append(retry);
      }
    }
    return banner;
  }

  private renderQueue(): HTMLElement {
    const section = el("section", "queue");
    section.id = "queue";
    const round = this.currentRound;
    if (!round) {
      section.append(el("p", "empty", "No round yet — start one below."));
      return section;
    }
    const candidate = this.current;
    if (!candidate) {
      const done = el("div", "round-complete");
      done.id = "round-complete";
      done.append(el("h2", undefined, `round ${round.id} complete`));
      const promote = el("button", "promote", "promote accepted patterns") as HTMLButtonElement;
      promote.id = "promote";
      if (round.stats.accepted === 0) {
        promote.disabled = true;
        done.append(promote, el("p", "promote-reason", "nothing accepted in this round"));
      } else {
        promote.addEventListener("click", () => void this.promote());
        done.append(promote);
      }
      section.append(done);
      return section;
    }

    section.append(
      el("p", "progress", `round ${round.id} — ${this.queue.length} candidate(s) left`),
    );
    const card = el("div", "candidate-card");
    card.dataset.id = candidate.id;
    const fields: [string, string][] = [
      ["schema", candidate.schema],
      ["elt1", candidate.elt1],
      ["cat1", candidate.cat1],
      ["elt2", candidate.elt2],
      ["cat2", candidate.cat2],
      ["score", String(candidate.score)],
      ["etq", candidate.etq],
      ["objet", candidate.objet],
      ["status", candidate.status],
    ];
    const dl = el("dl", "fields");
    for (const [name, value] of fields) {
      dl.append(el("dt", undefined, name), el("dd", `field-${name}`, value));
    }
    card.append(dl, this.renderSnippets());

    const controls = el("div", "controls");
    for (const [label, key, handler] of [
      ["accept (a)", "accept", () => void this.decide("accept")],
      ["reject (r)", "reject", () => void this.decide("reject")],
      ["skip (s)", "skip", () => this.skip()],
    ] as const) {
      const button = el("button", key, label);
      button.addEventListener("click", handler);
      controls.append(button);
    }
    card.append(controls);
    section.append(card);
    return section;
  }

  private renderSnippets(): HTMLElement {
    const list = el("ul", "concordance");
    for (const snippet of this.snippets) {
      const item = el("li", "snippet");
      item.append(el("span", "where", `${snippet.doc}#${snippet.sentence} `));
      snippet.tokens.forEach((token, index) => {
        const marked = index === snippet.head_index || index === snippet.exp_index;
        const span = el(marked ? "mark" : "span", marked ? "hit" : undefined, token);
        item.append(span, document.createTextNode(" "));
      });
      list.append(item);
    }
    return list;
  }

  private renderDashboard(): HTMLElement {
    const section = el("section", "dashboard");
    section.id = "dashboard";
    section.append(el("h2", undefined, "rounds"));

    const table = el("table", "rounds-table") as HTMLTableElement;
    table.id = "rounds-table";
    const head = el("tr");
    for (const column of ["round", "proposed", "accepted", "rejected", "acceptance rate", "new patterns / seed"]) {
      head.append(el("th", undefined, column));
    }
    table.append(head);
    for (const round of this.rounds) {
      const row = el("tr", "round-row");
      row.append(
        el("td", "round-id", String(round.id)),
        el("td", "round-proposed", String(round.stats.proposed)),
        el("td", "round-accepted", String(round.stats.accepted)),
        el("td", "round-rejected", String(round.stats.rejected)),
        el("td", "round-rate", `${(round.stats.acceptance_rate * 100).toFixed(1)}%`),
        el("td", "round-nps", round.stats.new_patterns_per_seed.toFixed(2)),
      );
      table.append(row);
    }
    section.append(table, this.renderChart());

    if (this.promotedSeeds) {
      const next = el("button", "start-next", `start next round (${this.promotedSeeds.length} seeds)`) as HTMLButtonElement;
      next.id = "start-next";
      next.addEventListener("click", () => void this.startNextRound());
      section.append(next);
    }
    section.append(this.renderSeedForm());
    return section;
  }

  private renderChart(): HTMLElement {
    // proposals per round, one bar each
    const wrapper = el("div", "chart");
    wrapper.id = "chart";
    const svgNS = "http://www.w3.org/2000/svg";
    const svg = document.createElementNS(svgNS, "svg");
    const width = Math.max(this.rounds.length * 30, 30);
    svg.setAttribute("width", String(width));
    svg.setAttribute("height", "60");
    const most = Math.max(1, ...this.rounds.map((r) => r.stats.proposed));
    this.rounds.forEach((round, index) => {
      const bar = document.createElementNS(svgNS, "rect");
      const height = (round.stats.proposed / most) * 50;
      bar.setAttribute("class", "bar");
      bar.setAttribute("x", String(index * 30 + 4));
      bar.setAttribute("y", String(55 - height));
      bar.setAttribute("width", "22");
      bar.setAttribute("height", String(height));
      svg.append(bar);
    });
    wrapper.append(svg);
    return wrapper;
  }

  private renderSeedForm(): HTMLElement {
    const form = el("form", "new-round") as HTMLFormElement;
    form.id = "new-round-form";
    const inputs: [string, string][] = [
      ["head", "cession"],
      ["expansion", "société"],
      ["etq", "entreprise_achetee"],
      ["objet", "$2"],
      ["threshold", "2.0"],
    ];
    for (const [name, value] of inputs) {
      const input = el("input") as HTMLInputElement;
      input.name = name;
      input.placeholder = name;
      input.value = value;
      form.append(el("label", undefined, name), input);
    }
    const submit = el("button", "submit", "start round") as HTMLButtonElement;
    submit.type = "submit";
    form.append(submit);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(form);
      const seed: Seed = {
        head: String(data.get("head") ?? ""),
        expansion: String(data.get("expansion") ?? ""),
        etq: String(data.get("etq") ?? ""),
        objet: String(data.get("objet") ?? "$2"),
      };
      void this.startRound([seed], Number(data.get("threshold") ?? 2.0));
    });
    return form;
  }
}
