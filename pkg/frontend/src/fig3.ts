import { fig3 } from "./plots.js";
import { runFigure } from "./main.js";

process.exitCode = runFigure("fig3", process.argv.slice(2),
  (inputs) => fig3(inputs));
