/**
 * CNN-LSTM next-day availability forecaster.
 *
 * Each history day's slot-by-client grid runs through a 1-D convolution
 * along the slot axis (clients as channels) and global average pooling to
 * one feature vector per day; an LSTM consumes the day sequence; a dense
 * sigmoid head scores every (slot, client) cell of the next day. Training
 * pairs sliding windows of consecutive days with the following day as the
 * binary target.
 */

import * as tf from "@tensorflow/tfjs";

import { DayMatrix, numClients, numSlots } from "./matrixCsv";

export interface ForecastModelConfig {
  historyDays: number;   // window length fed to the LSTM
  convFilters: number;
  convWidth: number;     // kernel size along the slot axis
  lstmUnits: number;
  threshold: number;     // sigmoid score -> binary availability
  epochs: number;
  learningRate: number;
  seed: number;
}

export const DEFAULT_CONFIG: ForecastModelConfig = {
  historyDays: 7,
  convFilters: 16,
  convWidth: 5,
  lstmUnits: 32,
  threshold: 0.5,
  epochs: 60,
  learningRate: 0.01,
  seed: 0,
};

export function validateConfig(cfg: ForecastModelConfig): void {
  if (cfg.historyDays < 2) {
    throw new Error("historyDays must be >= 2");
  }
  if (!(cfg.threshold > 0 && cfg.threshold < 1)) {
    throw new Error("threshold must lie strictly between 0 and 1");
  }
  if (cfg.convFilters < 1 || cfg.convWidth < 1 || cfg.lstmUnits < 1) {
    throw new Error("convFilters, convWidth and lstmUnits must be >= 1");
  }
  if (cfg.epochs < 1 || cfg.learningRate <= 0) {
    throw new Error("epochs must be >= 1 and learningRate > 0");
  }
}

export interface FittedForecaster {
  model: tf.LayersModel;
  config: ForecastModelConfig;
  slots: number;
  clients: number;
  window: number;  // sequence length the LSTM was built for
}

function buildModel(cfg: ForecastModelConfig, slots: number,
                    clients: number, window: number): tf.LayersModel {
  const model = tf.sequential();
  model.add(tf.layers.timeDistributed({
    inputShape: [window, slots, clients],
    layer: tf.layers.conv1d({
      filters: cfg.convFilters,
      kernelSize: Math.min(cfg.convWidth, slots),
      padding: "same",
      activation: "relu",
      kernelInitializer: tf.initializers.glorotUniform({ seed: cfg.seed }),
      biasInitializer: "zeros",
    }),
  }));
  model.add(tf.layers.timeDistributed({
    layer: tf.layers.globalAveragePooling1d({}),
  }));
  model.add(tf.layers.lstm({
    units: cfg.lstmUnits,
    kernelInitializer: tf.initializers.glorotUniform({ seed: cfg.seed + 1 }),
    recurrentInitializer: tf.initializers.orthogonal({ seed: cfg.seed + 2 }),
    biasInitializer: "zeros",
  }));
  model.add(tf.layers.dense({
    units: slots * clients,
    activation: "sigmoid",
    kernelInitializer: tf.initializers.glorotUniform({ seed: cfg.seed + 3 }),
    biasInitializer: "zeros",
  }));
  model.compile({
    optimizer: tf.train.adam(cfg.learningRate),
    loss: "binaryCrossentropy",
  });
  return model;
}

function windowLength(cfg: ForecastModelConfig, historyLength: number): number {
  // need at least one (window -> next day) pair inside the history
  return Math.min(cfg.historyDays, historyLength - 1);
}

/** Train on sliding (window of days -> next day) pairs within the history. */
export async function trainForecaster(
  history: DayMatrix[], cfg: ForecastModelConfig = DEFAULT_CONFIG,
): Promise<FittedForecaster> {
  validateConfig(cfg);
  if (history.length < 2) {
    throw new Error(`training needs at least 2 history days, got ${history.length}`);
  }
  const slots = numSlots(history[0]);
  const clients = numClients(history[0]);
  for (const m of history) {
    if (numSlots(m) !== slots || numClients(m) !== clients) {
      throw new Error("history days disagree on matrix shape");
    }
  }
  const window = windowLength(cfg, history.length);
  const inputs: number[][][][] = [];
  const targets: number[][] = [];
  for (let end = window; end < history.length; end++) {
    inputs.push(history.slice(end - window, end).map((m) => m.cells));
    targets.push(history[end].cells.flat());
  }
  const model = buildModel(cfg, slots, clients, window);
  const x = tf.tensor4d(inputs);
  const y = tf.tensor2d(targets);
  try {
    await model.fit(x, y, {
      epochs: cfg.epochs,
      batchSize: inputs.length,
      shuffle: false,
      verbose: 0,
    });
  } finally {
    x.dispose();
    y.dispose();
  }
  return { model, config: cfg, slots, clients, window };
}

/** Per-cell sigmoid scores for the day after the history's last day. */
export function scoreNextDay(fitted: FittedForecaster,
                             history: DayMatrix[]): number[][] {
  if (history.length < fitted.window) {
    throw new Error(`need ${fitted.window} history days, got ${history.length}`);
  }
  const recent = history.slice(-fitted.window);
  for (const m of recent) {
    if (numSlots(m) !== fitted.slots || numClients(m) !== fitted.clients) {
      throw new Error("prediction history shape differs from training shape");
    }
  }
  const flat = tf.tidy(() => {
    const x = tf.tensor4d([recent.map((m) => m.cells)]);
    return (fitted.model.predict(x) as tf.Tensor).dataSync();
  });
  const scores: number[][] = [];
  for (let s = 0; s < fitted.slots; s++) {
    const row: number[] = [];
    for (let c = 0; c < fitted.clients; c++) {
      row.push(flat[s * fitted.clients + c]);
    }
    scores.push(row);
  }
  return scores;
}

/** Scores above the threshold become available; a threshold of 0 turns
 * every (strictly positive) sigmoid score into 1. */
export function binarize(scores: number[][], threshold: number): number[][] {
  return scores.map((row) => row.map((v) => (v > threshold ? 1 : 0)));
}

export function predictNextDay(fitted: FittedForecaster,
                               history: DayMatrix[]): DayMatrix {
  const scores = scoreNextDay(fitted, history);
  return {
    day: history[history.length - 1].day + 1,
    cells: binarize(scores, fitted.config.threshold),
  };
}
