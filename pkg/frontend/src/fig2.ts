import { fig2 } from "./plots.js";
import { runFigure } from "./main.js";

process.exitCode = runFigure("fig2", process.argv.slice(2),
  (inputs, markers) => fig2(inputs, markers));
