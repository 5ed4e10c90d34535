import { xebFigure } from "./plots.js";
import { runFigure } from "./main.js";

process.exitCode = runFigure("xeb", process.argv.slice(2),
  (inputs) => xebFigure(inputs));
