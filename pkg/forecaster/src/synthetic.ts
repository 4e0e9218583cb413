/**
 * Seeded synthetic traces for tests and evaluation: a weekday/weekend
 * pattern per client with hour-block cell noise.
 */

import { DayMatrix } from "./matrixCsv";

/** Small deterministic PRNG (mulberry32). */
export function makeRng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface PeriodicTraceOptions {
  days: number;
  slots: number;
  clients: number;
  noise: number;       // per-cell flip probability
  seed: number;
}

/**
 * Each client gets a weekday pattern and a weekend pattern (per-hour-block
 * base draws); days 6 and 7 of each week use the weekend pattern. Noise
 * flips individual cells.
 */
export function periodicTrace(opts: PeriodicTraceOptions): DayMatrix[] {
  const rng = makeRng(opts.seed);
  const blocks = Math.max(1, Math.floor(opts.slots / 24));
  const pattern = (avail: number): number[][] => {
    const cells: number[][] = [];
    const blockStatus: number[][] = [];
    for (let b = 0; b * blocks < opts.slots; b++) {
      blockStatus.push(Array.from({ length: opts.clients },
                                  () => (rng() < avail ? 1 : 0)));
    }
    for (let s = 0; s < opts.slots; s++) {
      cells.push([...blockStatus[Math.floor(s / blocks)]]);
    }
    return cells;
  };
  const weekday = pattern(0.4);
  const weekend = pattern(0.7);
  const days: DayMatrix[] = [];
  for (let d = 1; d <= opts.days; d++) {
    const base = (d - 1) % 7 >= 5 ? weekend : weekday;
    const cells = base.map((row) =>
      row.map((v) => (rng() < opts.noise ? 1 - v : v)));
    days.push({ day: d, cells });
  }
  return days;
}

/** Balanced accuracy of a binary prediction against the truth. */
export function balancedAccuracy(predicted: number[][], truth: number[][]): number {
  let tp = 0, tn = 0, fp = 0, fn = 0;
  for (let s = 0; s < truth.length; s++) {
    for (let c = 0; c < truth[s].length; c++) {
      if (truth[s][c] === 1) {
        if (predicted[s][c] === 1) tp++;
        else fn++;
      } else {
        if (predicted[s][c] === 1) fp++;
        else tn++;
      }
    }
  }
  const sensitivity = tp + fn > 0 ? tp / (tp + fn) : 1;
  const specificity = tn + fp > 0 ? tn / (tn + fp) : 1;
  return (sensitivity + specificity) / 2;
}
