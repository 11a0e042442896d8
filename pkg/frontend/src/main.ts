import { ApiClient, ApiError } from "./api";
import { buildOverlay } from "./compare";
import { readEdges } from "./dot";
import { renderDiagram } from "./render";
import { SessionState, type HistoryEntry } from "./state";
import { STRATEGIES, type GenerateResponse, type StrategySlug } from "./types";

// Strict selector helper (prevents silent null bugs)
function $<T extends HTMLElement>(root: ParentNode, selector: string): T {
  const el = root.querySelector(selector);
  if (!el) throw new Error(`Missing element: ${selector}`);
  return el as T;
}

export interface AppOptions {
  baseUrl?: string;
  client?: ApiClient;
}

export interface AppHandle {
  state: SessionState;
  client: ApiClient;
  /** resolves when the corpus picker and health line have loaded */
  ready: Promise<void>;
}

const TEMPLATE = `
  <div class="layout">
    <section class="panel controls">
      <h1>CLD Forge</h1>
      <p class="sub">Type a dynamic hypothesis, pick a prompting strategy, and
        generate a causal loop diagram. Score it against an expert-built one
        when you are done iterating.</p>
      <div id="health" class="health"></div>

      <label class="field">Dynamic hypothesis
        <textarea id="dh" rows="7"
          placeholder="The larger the population, the greater the number of births..."></textarea>
      </label>

      <div class="row">
        <label class="field">Strategy
          <select id="strategy"></select>
        </label>
        <label class="field shots">Shots
          <input id="shots" type="number" min="0" max="4" step="1" />
        </label>
        <button id="generate" disabled>Generate</button>
      </div>

      <div id="error" class="banner error" hidden></div>
      <div id="no-digraph" class="banner warn" hidden>
        <strong>The model answered in prose — no diagram block found.</strong>
        <pre id="raw-completion"></pre>
      </div>

      <h2>History</h2>
      <ol id="history" class="history"></ol>
    </section>

    <section class="panel canvas">
      <div id="diagram" class="diagram-host">
        <p class="placeholder">No diagram yet.</p>
      </div>
      <ul id="loops" class="loop-list"></ul>
      <ul id="diagnostics" class="diagnostics"></ul>
      <div id="legend" class="legend" hidden>
        <span class="key cmp-matched">matched</span>
        <span class="key cmp-flipped">flipped polarity</span>
        <span class="key cmp-extra">extra</span>
        <span class="key cmp-missing">missing</span>
      </div>
    </section>

    <section class="panel compare">
      <h2>Compare to expert diagram</h2>
      <label class="field">Ground truth
        <select id="corpus">
          <option value="">choose a corpus item…</option>
        </select>
      </label>
      <button id="compare" disabled>Score against truth</button>
      <div id="metrics" class="metrics" hidden></div>
    </section>
  </div>
`;

function formatScores(label: string, scores: { precision: number; recall: number; f1: number }): string {
  return `<tr><th>${label}</th>
    <td>${scores.precision.toFixed(3)}</td>
    <td>${scores.recall.toFixed(3)}</td>
    <td data-metric="${label}-f1">${scores.f1.toFixed(3)}</td></tr>`;
}

function loopLine(kind: string, length: number): string {
  return `${length}-${kind}`;
}

export function mountApp(root: HTMLElement, options: AppOptions = {}): AppHandle {
  const client = options.client ?? new ApiClient(options.baseUrl ?? "");
  const state = new SessionState();
  root.innerHTML = TEMPLATE;

  const dhInput = $<HTMLTextAreaElement>(root, "#dh");
  const strategySelect = $<HTMLSelectElement>(root, "#strategy");
  const shotsInput = $<HTMLInputElement>(root, "#shots");
  const generateButton = $<HTMLButtonElement>(root, "#generate");
  const errorBanner = $<HTMLElement>(root, "#error");
  const noDigraphBanner = $<HTMLElement>(root, "#no-digraph");
  const rawCompletion = $<HTMLElement>(root, "#raw-completion");
  const historyList = $<HTMLOListElement>(root, "#history");
  const diagramHost = $<HTMLElement>(root, "#diagram");
  const loopList = $<HTMLUListElement>(root, "#loops");
  const diagnosticsList = $<HTMLUListElement>(root, "#diagnostics");
  const legend = $<HTMLElement>(root, "#legend");
  const corpusSelect = $<HTMLSelectElement>(root, "#corpus");
  const compareButton = $<HTMLButtonElement>(root, "#compare");
  const metricsPanel = $<HTMLElement>(root, "#metrics");
  const healthLine = $<HTMLElement>(root, "#health");

  for (const { slug, label } of STRATEGIES) {
    const option = document.createElement("option");
    option.value = slug;
    option.textContent = label;
    strategySelect.appendChild(option);
  }
  strategySelect.value = state.strategy;
  shotsInput.value = String(state.shots);

  let inFlight = false;

  const syncControls = () => {
    generateButton.disabled = inFlight || state.draft.trim() === "";
    compareButton.disabled =
      inFlight ||
      state.selectedCorpusId === null ||
      state.lastGeneration?.digraph == null;
  };

  const showError = (message: string) => {
    errorBanner.textContent = message;
    errorBanner.hidden = false;
  };
  const clearBanners = () => {
    errorBanner.hidden = true;
    noDigraphBanner.hidden = true;
  };

  const renderGeneration = (response: GenerateResponse) => {
    loopList.textContent = "";
    diagnosticsList.textContent = "";
    metricsPanel.hidden = true;
    legend.hidden = true;

    if (response.digraph === null || response.render_dot === null) {
      diagramHost.innerHTML = '<p class="placeholder">No diagram for this reply.</p>';
      noDigraphBanner.hidden = false;
      rawCompletion.textContent = "(fetching the raw reply…)";
      client
        .transcripts(response.transcripts_id)
        .then(({ transcripts }) => {
          const last = transcripts[transcripts.length - 1];
          rawCompletion.textContent = last ? last[1] : "(transcript expired)";
        })
        .catch(() => {
          rawCompletion.textContent = "(transcript unavailable)";
        });
      return;
    }

    renderDiagram(diagramHost, {
      variables: response.variables,
      edges: readEdges(response.render_dot),
      loops: response.loops,
    });

    let reinforcing = 0;
    let balancing = 0;
    for (const loop of response.loops) {
      const badge =
        loop.kind === "Reinforcing" ? `R${++reinforcing}` : `B${++balancing}`;
      const item = document.createElement("li");
      item.innerHTML = `<span class="badge ${loop.kind.toLowerCase()}">${badge}</span>
        <span class="kind">${loop.kind}</span> ${loop.members.join(" → ")}`;
      loopList.appendChild(item);
    }
    for (const diagnostic of response.diagnostics) {
      const item = document.createElement("li");
      item.textContent = diagnostic;
      diagnosticsList.appendChild(item);
    }
  };

  const appendHistoryItem = (entry: HistoryEntry, index: number) => {
    const item = document.createElement("li");
    const button = document.createElement("button");
    button.type = "button";
    button.className = "history-entry";
    const summary = entry.dh.length > 48 ? `${entry.dh.slice(0, 48)}…` : entry.dh;
    button.textContent = `[${entry.strategy}] ${summary}`;
    button.addEventListener("click", () => {
      // re-render from the stored response; the provider is not called again
      const recalled = state.recall(index);
      if (!recalled) return;
      clearBanners();
      dhInput.value = recalled.dh;
      state.draft = recalled.dh;
      renderGeneration(recalled.response);
      syncControls();
    });
    item.appendChild(button);
    historyList.appendChild(item);
  };

  dhInput.addEventListener("input", () => {
    state.draft = dhInput.value;
    syncControls();
  });
  strategySelect.addEventListener("change", () => {
    state.strategy = strategySelect.value as StrategySlug;
  });
  shotsInput.addEventListener("change", () => {
    const parsed = Number.parseInt(shotsInput.value, 10);
    if (!Number.isNaN(parsed)) state.shots = parsed;
  });
  corpusSelect.addEventListener("change", () => {
    state.selectedCorpusId = corpusSelect.value || null;
    syncControls();
  });

  generateButton.addEventListener("click", async () => {
    if (inFlight || state.draft.trim() === "") return;
    inFlight = true;
    syncControls();
    clearBanners();
    try {
      const response = await client.generate(state.draft, state.strategy, state.shots);
      const entry = state.recordGeneration(state.draft, state.strategy, response);
      appendHistoryItem(entry, state.history.length - 1);
      renderGeneration(response);
    } catch (error) {
      // the draft stays in the textarea untouched
      showError(error instanceof ApiError ? error.message : `request failed: ${error}`);
    } finally {
      inFlight = false;
      syncControls();
    }
  });

  compareButton.addEventListener("click", async () => {
    const generation = state.lastGeneration;
    const truthId = state.selectedCorpusId;
    if (inFlight || !generation?.digraph || !generation.render_dot || !truthId) return;
    inFlight = true;
    syncControls();
    errorBanner.hidden = true;
    try {
      const [evaluation, truthItem] = await Promise.all([
        client.evaluateAgainstItem(generation.digraph, truthId),
        client.corpusItem(truthId),
      ]);
      const overlay = buildOverlay(
        readEdges(generation.render_dot),
        readEdges(truthItem.render_dot),
        evaluation,
      );
      renderDiagram(diagramHost, {
        variables: generation.variables,
        edges: readEdges(generation.render_dot),
        loops: generation.loops,
        overlay,
      });
      legend.hidden = false;

      const polarity =
        evaluation.polarity_accuracy === null
          ? "undefined"
          : evaluation.polarity_accuracy.toFixed(3);
      metricsPanel.innerHTML = `
        <table class="scores">
          <thead><tr><th></th><th>precision</th><th>recall</th><th>F1</th></tr></thead>
          <tbody>
            ${formatScores("node", evaluation.node)}
            ${formatScores("link_strict", evaluation.link_strict)}
            ${formatScores("link_lenient", evaluation.link_lenient)}
          </tbody>
        </table>
        <p>polarity accuracy: <strong data-metric="polarity">${polarity}</strong></p>
        <p>loops — generated: ${
          evaluation.loops.generated.map(([n, k]) => loopLine(k, n)).join(", ") || "none"
        }; truth: ${
          evaluation.loops.truth.map(([n, k]) => loopLine(k, n)).join(", ") || "none"
        }</p>
        <p>loop count match: <strong>${evaluation.loops.loop_count_match ? "yes" : "no"}</strong>;
           kind multiset match: <strong>${evaluation.loops.loop_kind_multiset_match ? "yes" : "no"}</strong></p>
        ${
          evaluation.matching.unmatched_truth.length
            ? `<p>missing variables: ${evaluation.matching.unmatched_truth.join(", ")}</p>`
            : ""
        }
        ${
          evaluation.matching.unmatched_generated.length
            ? `<p>extra variables: ${evaluation.matching.unmatched_generated.join(", ")}</p>`
            : ""
        }`;
      metricsPanel.hidden = false;
    } catch (error) {
      showError(error instanceof ApiError ? error.message : `request failed: ${error}`);
    } finally {
      inFlight = false;
      syncControls();
    }
  });

  const ready = (async () => {
    try {
      const [health, corpus] = await Promise.all([client.health(), client.corpus()]);
      healthLine.textContent = `service ${health.status} · provider ${health.provider}`;
      for (const item of corpus.items) {
        const option = document.createElement("option");
        option.value = item.id;
        const loops = item.loop_summary.map(([n, k]) => loopLine(k, n)).join(", ");
        option.textContent = `${item.id} (${item.variable_count} vars; ${loops || "no loops"})`;
        corpusSelect.appendChild(option);
      }
    } catch (error) {
      healthLine.textContent = "service unreachable";
      showError(error instanceof ApiError ? error.message : `cannot reach the service: ${error}`);
    }
  })();

  syncControls();
  return { state, client, ready };
}
