export { DayMatrix, numClients, numSlots, paFilename, readHistoryDir, readMatrixCsv, writeMatrixCsv } from "./matrixCsv";
export { DEFAULT_CONFIG, FittedForecaster, ForecastModelConfig, binarize, predictNextDay, scoreNextDay, trainForecaster, validateConfig } from "./model";
export { balancedAccuracy, makeRng, periodicTrace } from "./synthetic";
