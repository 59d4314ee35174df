/** Typed client for the driftscope JSON API. */

export interface Meta {
  n_weeks: number;
  vocab_size: number;
  embedding_dim: number;
  regions: string[];
  tasks: string[];
  horizons: number[];
  models: string[];
  keywords: string[];
}

export interface Series {
  word: string;
  d_e: number[];
  cum: number[];
  tau_f: number[] | null;
  tau_chi: number[] | null;
  d_f: number[] | null;
  d_chi: number[] | null;
}

export interface Neighbor {
  word: string;
  distance: number;
}

export interface NeighborList {
  word: string;
  t: number;
  metric: string;
  neighbors: Neighbor[];
}

export interface WeekNeighbors {
  t: number;
  labels: string[];
  points: [number, number][];
}

export interface Trajectory {
  word: string;
  points: [number, number][];
  neighbors: WeekNeighbors[];
  evr: number[];
  degenerate: boolean;
}

export interface ClusterCard {
  cluster: number;
  trend: string;
  percent_words: number;
  sample_words: string[];
}

export interface Forecast {
  word: string;
  task: string;
  horizon: number;
  model: string;
  y: number[];
  y_hat: number[];
  pearson_r: number;
  rmse: number;
  mape: number;
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export type Params = Record<string, string | number>;

export function buildUrl(base: string, path: string, params?: Params): string {
  const qs = new URLSearchParams();
  for (const [k, v] of Object.entries(params ?? {})) qs.set(k, String(v));
  const query = qs.toString();
  return base + path + (query ? `?${query}` : "");
}

export function makeApi(base: string, fetchFn: typeof fetch = fetch) {
  async function get<T>(path: string, params?: Params): Promise<T> {
    const resp = await fetchFn(buildUrl(base, path, params));
    const text = await resp.text();
    if (!resp.ok) throw new ApiError(resp.status, text);
    return JSON.parse(text) as T;
  }
  return {
    meta: () => get<Meta>("/api/meta"),
    words: (prefix = "", limit = 50, offset = 0) =>
      get<{ words: string[] }>("/api/words", { prefix, limit, offset }),
    series: (word: string) =>
      get<Series>(`/api/series/${encodeURIComponent(word)}`),
    neighbors: (word: string, t = 0, k = 10) =>
      get<NeighborList>(`/api/neighbors/${encodeURIComponent(word)}`, { t, k }),
    trajectory: (word: string, k = 2) =>
      get<Trajectory>(`/api/trajectory/${encodeURIComponent(word)}`, { k }),
    clusters: (stat = "chi") =>
      get<{ stat: string; clusters: ClusterCard[] }>("/api/clusters", { stat }),
    forecast: (word: string, task: string, horizon: number, model: string) =>
      get<Forecast>(`/api/forecast/${encodeURIComponent(word)}`, {
        task,
        horizon,
        model,
      }),
  };
}

export type Api = ReturnType<typeof makeApi>;
