/** Dashboard wiring: run list, live run view, rule browser, feedback composer. */

import { ApiClient, RunPoller } from "../api.js";
import {
  HvChart,
  renderEnsembleStrip,
  renderFrontScatter,
  renderVrgOverlay,
} from "../charts.js";
import { FeedbackComposer } from "../composer.js";
import { Rule, RunState } from "../schema.js";
import { SortKey, sortCards, toRuleCard, vrgEdges } from "../rules.js";

export class Dashboard {
  private client: ApiClient;
  private poller: RunPoller | null = null;
  private hvChart: HvChart | null = null;
  private composer: FeedbackComposer | null = null;
  private currentRun: string | null = null;
  private sortKey: SortKey = "score";
  private lastRules: Rule[] = [];
  private staleSince: number | null = null;

  constructor(private readonly root: HTMLElement, baseUrl: string,
              private readonly pollIntervalMs = 1000) {
    this.client = new ApiClient(baseUrl);
    this.root.innerHTML = `
      <header><h1>ikemo runs</h1><div id="banner"></div></header>
      <section id="run-list"></section>
      <section id="run-view" hidden>
        <div id="run-meta"></div>
        <div class="charts">
          <div id="front"></div><div id="hv"></div>
          <div id="vrg"></div><div id="ensemble"></div>
        </div>
        <section id="rules"></section>
        <section id="composer"></section>
      </section>`;
    void this.refreshRunList();
    setInterval(() => void this.refreshRunList(), 5000);
  }

  private el(id: string): HTMLElement {
    return this.root.querySelector(`#${id}`) as HTMLElement;
  }

  async refreshRunList(): Promise<void> {
    try {
      const runs = await this.client.listRuns();
      const list = this.el("run-list");
      list.innerHTML = "";
      for (const run of runs) {
        const row = document.createElement("button");
        row.className = "run-row";
        row.textContent =
          `${run.id} | ${run.problem} | ${run.agent}+${run.user} | ` +
          `${run.mode} | gen ${run.gen} | ${run.status}`;
        row.onclick = () => this.openRun(run.id);
        list.appendChild(row);
      }
      this.clearStale();
    } catch (err) {
      this.markStale(err);
    }
  }

  openRun(runId: string): void {
    this.poller?.stop();
    this.currentRun = runId;
    this.el("run-view").hidden = false;
    this.el("hv").innerHTML = "";
    this.hvChart = new HvChart(this.el("hv"));
    this.poller = new RunPoller(this.client, runId, {
      onState: (state) => void this.onState(state),
      onError: (err) => this.markStale(err),
    }, this.pollIntervalMs);
    this.poller.start();
  }

  private async onState(state: RunState): Promise<void> {
    this.clearStale();
    this.el("run-meta").textContent =
      `gen ${state.gen} | fe ${state.fe} | hv ${state.hv.toFixed(4)} | ` +
      `archive ${state.archive_size} | ${state.status}`;
    this.hvChart?.push(state.fe, state.hv);
    renderEnsembleStrip(this.el("ensemble"), state.ensemble_p);
    this.renderPauseBanner(state);
    if (this.currentRun) {
      try {
        const [archive, rules] = await Promise.all([
          this.client.archive(this.currentRun),
          this.client.rules(this.currentRun),
        ]);
        renderFrontScatter(this.el("front"), archive.F);
        renderVrgOverlay(this.el("vrg"), vrgEdges(rules));
        this.renderRules(rules, state);
      } catch (err) {
        this.markStale(err);
      }
    }
  }

  private renderPauseBanner(state: RunState): void {
    const banner = this.el("banner");
    if (state.status === "paused_for_feedback") {
      banner.textContent =
        "Run paused for feedback - review the rules below and submit to resume.";
      banner.className = "banner paused";
    } else if (!banner.classList.contains("stale")) {
      banner.textContent = "";
      banner.className = "banner";
    }
  }

  private markStale(err: unknown): void {
    if (this.staleSince === null) this.staleSince = Date.now();
    const banner = this.el("banner");
    banner.className = "banner stale";
    banner.textContent =
      `Service unreachable since ${new Date(this.staleSince).toLocaleTimeString()}; ` +
      `showing stale data (${String(err)})`;
  }

  private clearStale(): void {
    this.staleSince = null;
    const banner = this.el("banner");
    if (banner.classList.contains("stale")) {
      banner.textContent = "";
      banner.className = "banner";
    }
  }

  private renderRules(rules: Rule[], state: RunState): void {
    const changed =
      JSON.stringify(rules.map((r) => r.id)) !==
      JSON.stringify(this.lastRules.map((r) => r.id));
    this.lastRules = rules;
    const cards = sortCards(rules.map(toRuleCard), this.sortKey);
    const section = this.el("rules");
    section.innerHTML = `
      <h2>rules (${cards.length})</h2>
      <label>sort by <select id="sort">
        <option value="score">score</option>
        <option value="kind">kind</option>
        <option value="rank">rank</option>
      </select></label>
      <table><thead><tr>
        <th>rank</th><th>relation</th><th>meaning</th><th>score</th><th>corr</th>
      </tr></thead><tbody></tbody></table>`;
    const select = section.querySelector("#sort") as HTMLSelectElement;
    select.value = this.sortKey;
    select.onchange = () => {
      this.sortKey = select.value as SortKey;
      this.renderRules(this.lastRules, state);
    };
    const body = section.querySelector("tbody") as HTMLElement;
    for (const card of cards) {
      const tr = document.createElement("tr");
      tr.innerHTML =
        `<td>${card.rank}</td><td><code>${card.relation}</code></td>` +
        `<td>${card.gloss}</td><td>${card.score.toFixed(3)}</td>` +
        `<td>${card.correlation === null ? "-" : card.correlation.toFixed(2)}</td>`;
      body.appendChild(tr);
    }
    if (state.status === "paused_for_feedback" && (changed || this.composer === null)) {
      this.composer = new FeedbackComposer(rules.map((r) => r.id));
    }
    this.renderComposer(rules, state);
  }

  private renderComposer(rules: Rule[], state: RunState): void {
    const section = this.el("composer");
    if (state.status !== "paused_for_feedback" || this.composer === null) {
      section.innerHTML = "";
      return;
    }
    const composer = this.composer;
    section.innerHTML = `
      <h2>feedback</h2>
      <ol id="ranked" class="rank-list"></ol>
      <div id="unranked"></div>
      <label>min score <input id="min-score" type="range" min="0" max="1"
             step="0.05" value="0"></label>
      <label>min |correlation| <input id="min-corr" type="range" min="0" max="1"
             step="0.05" value="0"></label>
      <button id="submit">submit feedback</button>`;

    const ranked = section.querySelector("#ranked") as HTMLElement;
    composer.rankedIds().forEach((id, pos) => {
      const li = document.createElement("li");
      li.draggable = true;
      li.textContent = `${pos + 1}. ${id}`;
      li.dataset.id = id;
      li.ondragstart = (ev) => ev.dataTransfer?.setData("text/plain", id);
      li.ondragover = (ev) => ev.preventDefault();
      li.ondrop = (ev) => {
        ev.preventDefault();
        const dragged = ev.dataTransfer?.getData("text/plain");
        if (dragged) {
          composer.moveTo(dragged, pos);
          this.renderComposer(rules, state);
        }
      };
      ranked.appendChild(li);
    });

    const unranked = section.querySelector("#unranked") as HTMLElement;
    for (const rule of rules) {
      if (composer.rankOf(rule.id) !== null) continue;
      const chip = document.createElement("span");
      chip.className = composer.isExcluded(rule.id) ? "chip excluded" : "chip";
      chip.textContent = rule.id;
      const rankBtn = document.createElement("button");
      rankBtn.textContent = "rank";
      rankBtn.onclick = () => {
        composer.addRank(rule.id);
        this.renderComposer(rules, state);
      };
      const exBtn = document.createElement("button");
      exBtn.textContent = composer.isExcluded(rule.id) ? "include" : "exclude";
      exBtn.onclick = () => {
        composer.toggleExclude(rule.id);
        this.renderComposer(rules, state);
      };
      chip.append(" ", rankBtn, exBtn);
      unranked.appendChild(chip);
    }

    (section.querySelector("#min-score") as HTMLInputElement).onchange = (ev) => {
      const v = Number((ev.target as HTMLInputElement).value);
      composer.setMinScore(v > 0 ? v : null);
    };
    (section.querySelector("#min-corr") as HTMLInputElement).onchange = (ev) => {
      const v = Number((ev.target as HTMLInputElement).value);
      composer.setMinCorrelation(v > 0 ? v : null);
    };
    (section.querySelector("#submit") as HTMLButtonElement).onclick = async () => {
      if (this.currentRun) {
        await this.client.postFeedback(this.currentRun, composer.draft());
        this.composer = null;
      }
    };
  }
}

declare global {
  interface Window {
    ikemoDashboard?: Dashboard;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  window.ikemoDashboard = new Dashboard(
    document.getElementById("app") as HTMLElement,
    (window as unknown as { IKEMO_API?: string }).IKEMO_API ?? "http://127.0.0.1:8000",
  );
}
