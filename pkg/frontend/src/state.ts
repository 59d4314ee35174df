/** View state, round-tripped through the URL hash so views are linkable. */

export interface ViewState {
  word: string;
  week: number;
  k: number;
  stat: string;
  task: string;
  horizon: number;
  model: string;
}

export const DEFAULT_STATE: ViewState = {
  word: "",
  week: 0,
  k: 2,
  stat: "chi",
  task: "shift",
  horizon: 1,
  model: "lstm",
};

/** Serialize only the keys that differ from the defaults. */
export function encodeState(state: ViewState): string {
  const qs = new URLSearchParams();
  for (const key of Object.keys(DEFAULT_STATE) as (keyof ViewState)[]) {
    if (state[key] !== DEFAULT_STATE[key]) qs.set(key, String(state[key]));
  }
  return qs.toString();
}

/** Parse a hash fragment (with or without a leading '#'); bad values fall
 *  back to the defaults rather than throwing. */
export function decodeState(hash: string): ViewState {
  const qs = new URLSearchParams(hash.replace(/^#/, ""));
  const state: ViewState = { ...DEFAULT_STATE };
  const str = (key: "word" | "stat" | "task" | "model") => {
    const v = qs.get(key);
    if (v !== null) state[key] = v;
  };
  const num = (key: "week" | "k" | "horizon") => {
    const v = Number(qs.get(key));
    if (qs.has(key) && Number.isInteger(v) && v >= 0) state[key] = v;
  };
  str("word");
  str("stat");
  str("task");
  str("model");
  num("week");
  num("k");
  num("horizon");
  return state;
}
