import { describe, expect, it } from "vitest";
import { DEFAULT_STATE, decodeState, encodeState, ViewState } from "../src/state.js";

describe("view state <-> URL hash", () => {
  it("encodes only non-default keys", () => {
    expect(encodeState({ ...DEFAULT_STATE })).toBe("");
    const s = { ...DEFAULT_STATE, word: "qilpo", week: 3 };
    const qs = new URLSearchParams(encodeState(s));
    expect(qs.get("word")).toBe("qilpo");
    expect(qs.get("week")).toBe("3");
    expect(qs.has("stat")).toBe(false);
  });

  it("round-trips every field", () => {
    const s: ViewState = {
      word: "t0w01",
      week: 5,
      k: 4,
      stat: "e",
      task: "combined",
      horizon: 3,
      model: "adaboost",
    };
    expect(decodeState(encodeState(s))).toEqual(s);
  });

  it("tolerates a leading # and empty hash", () => {
    expect(decodeState("")).toEqual(DEFAULT_STATE);
    expect(decodeState("#word=a")).toEqual({ ...DEFAULT_STATE, word: "a" });
  });

  it("ignores malformed numbers", () => {
    const s = decodeState("week=potato&horizon=-2&k=1.5");
    expect(s.week).toBe(DEFAULT_STATE.week);
    expect(s.horizon).toBe(DEFAULT_STATE.horizon);
    expect(s.k).toBe(DEFAULT_STATE.k);
  });

  it("percent-encodes words safely", () => {
    const s = { ...DEFAULT_STATE, word: "a b&c" };
    expect(decodeState(encodeState(s)).word).toBe("a b&c");
  });
});
