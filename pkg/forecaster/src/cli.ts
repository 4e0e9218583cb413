/**
 * forecast --history <dir> [--days D] --out <pa_day_<d+1>.csv> --seed S
 *          [--epochs N] [--threshold T] [--filters F] [--lstm-units U]
 *
 * Trains the CNN-LSTM on the day_<d>.csv files in the history directory
 * and writes the next day's predicted matrix in the shared CSV contract.
 */

import { paFilename, readHistoryDir, writeMatrixCsv } from "./matrixCsv";
import { DEFAULT_CONFIG, ForecastModelConfig, predictNextDay, trainForecaster } from "./model";

interface CliArgs {
  history: string;
  days?: number;
  out?: string;
  config: ForecastModelConfig;
}

export function parseArgs(argv: string[]): CliArgs {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`expected --flag value pairs, got ${argv.slice(i).join(" ")}`);
    }
    flags.set(key.slice(2), argv[i + 1]);
  }
  const history = flags.get("history");
  if (!history) {
    throw new Error("--history <dir> is required");
  }
  if (!flags.has("seed")) {
    throw new Error("--seed <int> is required for reproducible training");
  }
  const num = (name: string, fallback: number): number => {
    const raw = flags.get(name);
    if (raw === undefined) return fallback;
    const value = Number(raw);
    if (!Number.isFinite(value)) {
      throw new Error(`--${name} expects a number, got ${raw}`);
    }
    return value;
  };
  const config: ForecastModelConfig = {
    ...DEFAULT_CONFIG,
    historyDays: num("days", DEFAULT_CONFIG.historyDays),
    seed: num("seed", 0),
    epochs: num("epochs", DEFAULT_CONFIG.epochs),
    threshold: num("threshold", DEFAULT_CONFIG.threshold),
    convFilters: num("filters", DEFAULT_CONFIG.convFilters),
    lstmUnits: num("lstm-units", DEFAULT_CONFIG.lstmUnits),
    learningRate: num("learning-rate", DEFAULT_CONFIG.learningRate),
  };
  return {
    history,
    days: flags.has("days") ? num("days", 0) : undefined,
    out: flags.get("out"),
    config,
  };
}

export async function runForecast(args: CliArgs): Promise<string> {
  const history = readHistoryDir(args.history, args.days);
  const fitted = await trainForecaster(history, args.config);
  const predicted = predictNextDay(fitted, history);
  const out = args.out ?? paFilename(predicted.day);
  writeMatrixCsv(predicted, out);
  return out;
}

/* istanbul ignore next */
if (require.main === module) {
  runForecast(parseArgs(process.argv.slice(2)))
    .then((out) => {
      console.log(out);
    })
    .catch((err) => {
      console.error(`error: ${err.message}`);
      process.exit(1);
    });
}
