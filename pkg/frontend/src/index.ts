export { CSV_COLUMNS, METRICS, MetricName, SeedRow, parseBenchmarkCsv } from "./csv";
export {
  Stats,
  metricByMethodAndSize,
  methodsInOrder,
  recoverOriginal,
  relByMethod,
  sizesInOrder,
  statsOf,
} from "./aggregate";
export { FigureKind, FigureSpec, RenderedFigure, renderFigures } from "./figures";
