/** DOM wiring for the single-page UI. Framework-free: `mount` builds the
 *  panels inside a root element and returns a handle whose async methods the
 *  tests (and the event handlers) drive directly. */

import type { Api, Forecast, Meta, Series, Trajectory } from "./api.js";
import { ApiError } from "./api.js";
import { forecastSvg, lineChartSvg, trajectorySvg } from "./charts.js";
import { DEFAULT_STATE, decodeState, encodeState, ViewState } from "./state.js";

const STATS = ["f", "chi", "e"];

export interface AppOptions {
  /** Initial state; defaults to decoding location.hash. */
  state?: ViewState;
  /** Write state changes back to location.hash (off in unit tests). */
  syncHash?: boolean;
}

export interface App {
  state: ViewState;
  meta: Meta;
  select(word: string): Promise<void>;
  setWeek(t: number): Promise<void>;
  setStat(stat: string): Promise<void>;
  setForecastOptions(task: string, horizon: number, model: string): Promise<void>;
  search(prefix: string): Promise<void>;
  /** Resolves once every action queued so far has finished. */
  idle(): Promise<void>;
}

const html = `
  <header>
    <h1>driftscope</h1>
    <input id="search" type="search" placeholder="search words" autocomplete="off"/>
    <ul id="search-results"></ul>
  </header>
  <main>
    <section id="series-panel">
      <h2 id="word-title">pick a word</h2>
      <div id="usage-chart"></div>
      <div id="shift-chart"></div>
    </section>
    <section id="trajectory-panel">
      <h2>trajectory</h2>
      <div id="trajectory"></div>
      <label>week <input id="week-slider" type="range" min="0" max="0" value="0"/>
        <span id="week-label">0</span></label>
      <table id="neighbors"><tbody></tbody></table>
    </section>
    <section id="forecast-panel">
      <h2>forecast</h2>
      <select id="task"></select>
      <select id="horizon"></select>
      <select id="model"></select>
      <div id="forecast-chart"></div>
      <div id="forecast-metrics"></div>
    </section>
    <section id="clusters-panel">
      <h2>clusters</h2>
      <select id="stat">${STATS.map((s) => `<option>${s}</option>`).join("")}</select>
      <div id="cluster-cards"></div>
    </section>
  </main>
  <div id="error"></div>
`;

function fillSelect(el: HTMLSelectElement, options: (string | number)[], value: string) {
  el.innerHTML = options.map((o) => `<option>${o}</option>`).join("");
  if (options.map(String).includes(value)) el.value = value;
}

export async function mount(root: HTMLElement, api: Api, opts: AppOptions = {}): Promise<App> {
  root.innerHTML = html;
  const $ = <T extends HTMLElement>(sel: string) => root.querySelector(sel) as T;
  const state: ViewState = {
    ...(opts.state ?? decodeState(typeof location !== "undefined" ? location.hash : "")),
  };
  const meta = await api.meta();

  let trajCache: Trajectory | null = null;
  let queue: Promise<void> = Promise.resolve();
  const enqueue = (job: () => Promise<void>) => {
    queue = queue.then(job).catch(showError);
    return queue;
  };

  function showError(err: unknown) {
    $("#error").textContent = err instanceof Error ? err.message : String(err);
  }

  function syncHash() {
    if (opts.syncHash && typeof location !== "undefined") {
      location.hash = encodeState(state);
    }
  }

  function renderSeries(series: Series) {
    $("#word-title").textContent = series.word;
    $("#usage-chart").innerHTML = lineChartSvg([
      { values: series.tau_f ?? [], cls: "line-f" },
      { values: series.tau_chi ?? [], cls: "line-chi" },
    ]);
    $("#shift-chart").innerHTML = lineChartSvg([
      { values: series.d_e, cls: "line-de" },
      { values: series.cum, cls: "line-cum" },
    ]);
  }

  function renderTrajectory() {
    if (!trajCache) return;
    $("#trajectory").innerHTML = trajectorySvg(trajCache, state.week);
    for (const label of root.querySelectorAll<SVGTextElement>(".nbr-label")) {
      label.addEventListener("click", () => {
        void enqueue(() => doSelect(label.dataset.word ?? ""));
      });
    }
  }

  async function renderNeighborsTable() {
    if (!state.word) return;
    const nbrs = await api.neighbors(state.word, state.week, 10);
    const tbody = $("#neighbors").querySelector("tbody")!;
    tbody.innerHTML = nbrs.neighbors
      .map(
        (n) =>
          `<tr class="nbr-row" data-word="${n.word}"><td>${n.word}</td>` +
          `<td>${n.distance.toFixed(4)}</td></tr>`
      )
      .join("");
    for (const row of tbody.querySelectorAll<HTMLTableRowElement>(".nbr-row")) {
      row.addEventListener("click", () => {
        void enqueue(() => doSelect(row.dataset.word ?? ""));
      });
    }
  }

  async function renderForecast() {
    if (!state.word) return;
    const metrics = $("#forecast-metrics");
    let fc: Forecast;
    try {
      fc = await api.forecast(state.word, state.task, state.horizon, state.model);
    } catch (err) {
      $("#forecast-chart").innerHTML = "";
      metrics.textContent =
        err instanceof ApiError && err.status !== 500
          ? "no forecast for this word/configuration"
          : String(err);
      return;
    }
    $("#forecast-chart").innerHTML = forecastSvg(fc.y, fc.y_hat);
    metrics.innerHTML =
      `<span class="metric">r=${fc.pearson_r.toFixed(3)}</span> ` +
      `<span class="metric">rmse&times;100=${(fc.rmse * 100).toFixed(3)}</span> ` +
      `<span class="metric">mape=${fc.mape.toFixed(1)}%</span>`;
  }

  async function renderClusters() {
    const { clusters } = await api.clusters(state.stat);
    $("#cluster-cards").innerHTML = clusters
      .map(
        (c) =>
          `<div class="cluster-card"><span class="trend">${c.trend}</span>` +
          `<span class="pct">${c.percent_words}%</span>` +
          `<span class="samples">${c.sample_words.join(", ")}</span></div>`
      )
      .join("");
  }

  async function doSelect(word: string) {
    if (!word) return;
    state.word = word;
    state.week = Math.min(state.week, meta.n_weeks - 1);
    $("#error").textContent = "";
    const [series, traj] = await Promise.all([
      api.series(word),
      api.trajectory(word, state.k),
    ]);
    trajCache = traj;
    renderSeries(series);
    renderTrajectory();
    await Promise.all([renderNeighborsTable(), renderForecast()]);
    syncHash();
  }

  async function doSetWeek(t: number) {
    state.week = Math.max(0, Math.min(t, meta.n_weeks - 1));
    $("#week-label").textContent = String(state.week);
    ($("#week-slider") as HTMLInputElement).value = String(state.week);
    renderTrajectory(); // re-projects from cache: no trajectory refetch
    await renderNeighborsTable();
    syncHash();
  }

  async function doSearch(prefix: string) {
    const { words } = await api.words(prefix, 20);
    const list = $("#search-results");
    list.innerHTML = words.map((w) => `<li class="hit" data-word="${w}">${w}</li>`).join("");
    for (const li of list.querySelectorAll<HTMLLIElement>(".hit")) {
      li.addEventListener("click", () => {
        list.innerHTML = "";
        void enqueue(() => doSelect(li.dataset.word ?? ""));
      });
    }
  }

  // static controls
  const slider = $("#week-slider") as HTMLInputElement;
  slider.max = String(meta.n_weeks - 1);
  slider.addEventListener("input", () => {
    void enqueue(() => doSetWeek(Number(slider.value)));
  });
  const searchBox = $("#search") as HTMLInputElement;
  searchBox.addEventListener("input", () => {
    void enqueue(() => doSearch(searchBox.value));
  });
  const taskSel = $("#task") as HTMLSelectElement;
  const horizonSel = $("#horizon") as HTMLSelectElement;
  const modelSel = $("#model") as HTMLSelectElement;
  fillSelect(taskSel, meta.tasks, state.task);
  fillSelect(horizonSel, meta.horizons, String(state.horizon));
  fillSelect(modelSel, meta.models, state.model);
  const onForecastChange = () => {
    void enqueue(async () => {
      state.task = taskSel.value;
      state.horizon = Number(horizonSel.value);
      state.model = modelSel.value;
      await renderForecast();
      syncHash();
    });
  };
  for (const sel of [taskSel, horizonSel, modelSel]) {
    sel.addEventListener("change", onForecastChange);
  }
  const statSel = $("#stat") as HTMLSelectElement;
  statSel.value = STATS.includes(state.stat) ? state.stat : DEFAULT_STATE.stat;
  statSel.addEventListener("change", () => {
    void enqueue(async () => {
      state.stat = statSel.value;
      await renderClusters();
      syncHash();
    });
  });

  // initial render
  await renderClusters();
  await doSetWeek(state.week);
  if (state.word) await doSelect(state.word).catch(showError);

  return {
    state,
    meta,
    select: (word) => enqueue(() => doSelect(word)),
    setWeek: (t) => enqueue(() => doSetWeek(t)),
    setStat: (stat) =>
      enqueue(async () => {
        state.stat = stat;
        statSel.value = stat;
        await renderClusters();
        syncHash();
      }),
    setForecastOptions: (task, horizon, model) =>
      enqueue(async () => {
        state.task = task;
        state.horizon = horizon;
        state.model = model;
        fillSelect(taskSel, meta.tasks, task);
        fillSelect(horizonSel, meta.horizons, String(horizon));
        fillSelect(modelSel, meta.models, model);
        await renderForecast();
        syncHash();
      }),
    search: (prefix) => enqueue(() => doSearch(prefix)),
    idle: () => queue,
  };
}
