import { diagnosticsFigure } from "./plots.js";
import { runFigure } from "./main.js";

process.exitCode = runFigure("diagnostics", process.argv.slice(2),
  (inputs) => diagnosticsFigure(inputs));
