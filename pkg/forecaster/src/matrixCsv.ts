/**
 * Daily availability matrix CSV contract shared with the scheduling stack:
 * header `slot,c1..cN`, one row per slot, binary cells, files named
 * `day_<d>.csv` (observations) or `pa_day_<d>.csv` (predictions).
 */

import * as fs from "fs";
import * as path from "path";

export interface DayMatrix {
  day: number;
  /** cells[slot][client], 0/1, slot and client 0-indexed here */
  cells: number[][];
}

export function numSlots(m: DayMatrix): number {
  return m.cells.length;
}

export function numClients(m: DayMatrix): number {
  return m.cells[0]?.length ?? 0;
}

export function writeMatrixCsv(m: DayMatrix, filePath: string): void {
  const clients = numClients(m);
  const header = ["slot", ...Array.from({ length: clients }, (_, i) => `c${i + 1}`)];
  const lines = [header.join(",")];
  m.cells.forEach((row, s) => {
    if (row.length !== clients) {
      throw new Error(`row ${s + 1} has ${row.length} cells, expected ${clients}`);
    }
    lines.push([s + 1, ...row].join(","));
  });
  fs.writeFileSync(filePath, lines.join("\n") + "\n");
}

export function readMatrixCsv(filePath: string, day?: number): DayMatrix {
  if (day === undefined) {
    const match = /day_(\d+)\.csv$/.exec(path.basename(filePath));
    if (!match) {
      throw new Error(`cannot infer day from ${filePath}; pass day explicitly`);
    }
    day = parseInt(match[1], 10);
  }
  const lines = fs.readFileSync(filePath, "utf8").split("\n").filter((l) => l.trim());
  if (lines.length < 2 || !lines[0].startsWith("slot,")) {
    throw new Error(`${filePath}: expected 'slot,c1..cN' header and slot rows`);
  }
  const width = lines[0].split(",").length;
  const cells: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== width) {
      throw new Error(`${filePath}:${i + 1}: expected ${width} fields`);
    }
    const row = parts.slice(1).map((v) => {
      const n = Number(v);
      if (n !== 0 && n !== 1) {
        throw new Error(`${filePath}:${i + 1}: cell values must be 0/1, got ${v}`);
      }
      return n;
    });
    cells.push(row);
  }
  return { day, cells };
}

/** Load `day_<d>.csv` files from a directory, sorted by day. */
export function readHistoryDir(dir: string, lastDays?: number): DayMatrix[] {
  const files = fs
    .readdirSync(dir)
    .filter((f) => /^day_\d+\.csv$/.test(f))
    .sort((a, b) => dayOf(a) - dayOf(b));
  if (files.length === 0) {
    throw new Error(`no day_<d>.csv files in ${dir}`);
  }
  const selected = lastDays ? files.slice(-lastDays) : files;
  const history = selected.map((f) => readMatrixCsv(path.join(dir, f)));
  const slots = numSlots(history[0]);
  const clients = numClients(history[0]);
  for (const m of history) {
    if (numSlots(m) !== slots || numClients(m) !== clients) {
      throw new Error(`history days disagree on shape: day ${m.day}`);
    }
  }
  return history;
}

function dayOf(name: string): number {
  return parseInt(/day_(\d+)\.csv$/.exec(name)![1], 10);
}

export function paFilename(day: number): string {
  return `pa_day_${day}.csv`;
}
