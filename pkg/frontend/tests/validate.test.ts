// Client-side ranges mirror the API: 1..5 integers, 0..24 hours, +/-2
// adjustments, 0..20 grades.

import { describe, expect, it, vi } from "vitest";

import { startPolling } from "../src/api.js";
import {
  adjustmentValid,
  gradeValid,
  hoursValid,
  likertValid,
  periodValid,
} from "../src/validate.js";

describe("input validation", () => {
  it("accepts 1..5 integers and nothing else for likert scores", () => {
    for (const good of [1, 2, 3, 4, 5]) expect(likertValid(good)).toBe(true);
    for (const bad of [0, 6, -1, 3.5, NaN, "3", null, undefined]) {
      expect(likertValid(bad as never)).toBe(false);
    }
  });

  it("rejects a score of 6 before any request is made", () => {
    expect(likertValid(6)).toBe(false);
  });

  it("accepts 0..24 hours", () => {
    for (const good of [0, 0.25, 8, 24]) expect(hoursValid(good)).toBe(true);
    for (const bad of [-0.1, 24.1, 25, NaN, Infinity, "8"]) {
      expect(hoursValid(bad as never)).toBe(false);
    }
  });

  it("caps adjustments at +/-2, rejecting 2.001", () => {
    for (const good of [-2, -0.5, 0, 1.9, 2]) expect(adjustmentValid(good)).toBe(true);
    for (const bad of [2.001, -2.001, 3, NaN]) expect(adjustmentValid(bad)).toBe(false);
  });

  it("keeps grades on the 0..20 scale", () => {
    expect(gradeValid(0)).toBe(true);
    expect(gradeValid(20)).toBe(true);
    expect(gradeValid(20.5)).toBe(false);
    expect(gradeValid(-1)).toBe(false);
  });

  it("recognises ISO week period strings", () => {
    expect(periodValid("2025-W46")).toBe(true);
    expect(periodValid("2025-46")).toBe(false);
    expect(periodValid("week 46")).toBe(false);
  });
});

describe("polling", () => {
  it("fires at the configured interval, 30 s by default", () => {
    vi.useFakeTimers();
    const refresh = vi.fn();
    const stop = startPolling(refresh);
    vi.advanceTimersByTime(30_000);
    expect(refresh).toHaveBeenCalledTimes(1);
    vi.advanceTimersByTime(60_000);
    expect(refresh).toHaveBeenCalledTimes(3);
    stop();
    vi.advanceTimersByTime(60_000);
    expect(refresh).toHaveBeenCalledTimes(3);
    vi.useRealTimers();
  });

  it("honours a custom interval", () => {
    vi.useFakeTimers();
    const refresh = vi.fn();
    const stop = startPolling(refresh, 5_000);
    vi.advanceTimersByTime(14_999);
    expect(refresh).toHaveBeenCalledTimes(2);
    stop();
    vi.useRealTimers();
  });
});
