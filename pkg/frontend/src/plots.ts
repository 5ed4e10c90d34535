/**
 * Figure builders. Every figure is a pure function of already-computed CSV
 * content; nothing here re-derives physics.
 */

import { basename } from "node:path";

import { column, readTable, Table } from "./csv.js";
import { Marker, renderPlot, Series } from "./svg.js";

const PALETTE = ["#1f60a8", "#c23b22", "#2e8b57", "#8a4fbf", "#b8860b", "#444444"];

function label(path: string): string {
  return basename(path).replace(/\.csv$/, "");
}

/** Bound-to-fidelity ratio vs circuit size, with the dotted reference
 * asymptote from the CSV and optional experiment-size dots. */
export function fig2(inputs: string[], markerSizes: number[]): string {
  const series: Series[] = [];
  const markers: Marker[] = [];
  let reference: Series | null = null;
  inputs.forEach((path, i) => {
    const table = readTable(path, "cg-sweep");
    const s = column(table, "s");
    const ratio = column(table, "ratio");
    const ref = column(table, "wn_reference");
    const color = PALETTE[i % PALETTE.length];
    series.push({ x: s, y: ratio, color, label: label(path) });
    if (!reference && ref.some((v) => Number.isFinite(v))) {
      reference = { x: s, y: ref, color: "#000", dash: "5,4", width: 1.2,
                    label: "reference 2ε√s/3" };
    }
    for (const target of markerSizes) {
      const idx = s.indexOf(target);
      if (idx >= 0) {
        markers.push({ x: target, y: ratio[idx], color, label: `s=${target}` });
      }
    }
  });
  if (reference) series.push(reference);
  return renderPlot(series, markers, {
    title: "White-noise error bound relative to fidelity",
    xLabel: "circuit size s",
    yLabel: "bound / fbar",
    xScale: "log",
    yScale: "log",
  });
}

/** Log-scale fan of ratio curves, one CSV per noise rate, for one n. */
export function fig3(inputs: string[]): string {
  const series: Series[] = inputs.map((path, i) => {
    const table = readTable(path, "cg-sweep");
    return {
      x: column(table, "s"),
      y: column(table, "ratio"),
      color: PALETTE[i % PALETTE.length],
      label: label(path),
    };
  });
  return renderPlot(series, [], {
    title: "Bound / fbar across noise rates",
    xLabel: "circuit size s",
    yLabel: "bound / fbar",
    xScale: "linear",
    yScale: "log",
  });
}

/** Fidelity-estimate decay curves on a log scale. */
export function xebFigure(inputs: string[]): string {
  const series: Series[] = inputs.map((path, i) => {
    const table = readTable(path, "cg-sweep");
    return {
      x: column(table, "s"),
      y: column(table, "fbar"),
      color: PALETTE[i % PALETTE.length],
      label: label(path),
    };
  });
  return renderPlot(series, [], {
    title: "Fidelity estimate decay",
    xLabel: "circuit size s",
    yLabel: "fbar",
    xScale: "linear",
    yScale: "log",
  });
}

/** Coupled-walk diagnostics: surviving S-destined mass over time. */
export function diagnosticsFigure(inputs: string[]): string {
  const series: Series[] = inputs.map((path, i) => {
    const table = readTable(path, "coupled");
    return {
      x: column(table, "t"),
      y: column(table, "m_ss"),
      color: PALETTE[i % PALETTE.length],
      label: label(path),
    };
  });
  return renderPlot(series, [], {
    title: "S-destined mass",
    xLabel: "gate index t",
    yLabel: "m_ss",
    xScale: "linear",
    yScale: "log",
  });
}
