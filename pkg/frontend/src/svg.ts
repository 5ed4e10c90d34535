/**
 * Minimal deterministic SVG line plots: linear and log scales, axes with
 * ticks, polyline series, point markers, reference curves, legend.  Output
 * depends only on the inputs, so rendered bytes are reproducible.
 */

export type Scale = "linear" | "log";

export interface Series {
  x: number[];
  y: number[];
  color: string;
  label?: string;
  width?: number;
  dash?: string; // stroke-dasharray
}

export interface Marker {
  x: number;
  y: number;
  color: string;
  radius?: number;
  label?: string;
}

export interface PlotOptions {
  width?: number;
  height?: number;
  title?: string;
  xLabel?: string;
  yLabel?: string;
  xScale?: Scale;
  yScale?: Scale;
}

const MARGIN = { top: 42, right: 24, bottom: 52, left: 72 };

function fmt(v: number): string {
  return Number(v.toPrecision(6)).toString();
}

function tickValues(lo: number, hi: number, scale: Scale): number[] {
  if (scale === "log") {
    const ticks: number[] = [];
    const eLo = Math.ceil(Math.log10(lo) - 1e-9);
    const eHi = Math.floor(Math.log10(hi) + 1e-9);
    for (let e = eLo; e <= eHi; e++) ticks.push(10 ** e);
    if (ticks.length >= 2) return ticks;
    // fewer than two decades: fall back to linear ticks in log space
  }
  const span = hi - lo;
  const step = 10 ** Math.floor(Math.log10(span / 4));
  const mult = span / step > 8 ? 2 : 1;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / (step * mult)) * step * mult; v <= hi + 1e-12 * span; v += step * mult) {
    ticks.push(v);
  }
  return ticks;
}

export function renderPlot(series: Series[], markers: Marker[], opts: PlotOptions): string {
  const width = opts.width ?? 720;
  const height = opts.height ?? 480;
  const xScale: Scale = opts.xScale ?? "linear";
  const yScale: Scale = opts.yScale ?? "log";

  const usable = (v: number, scale: Scale) =>
    Number.isFinite(v) && (scale === "linear" || v > 0);
  const xs = series.flatMap((s) => s.x.filter((v) => usable(v, xScale)));
  const ys = series.flatMap((s, i) =>
    s.y.filter((v, j) => usable(v, yScale) && usable(series[i].x[j], xScale)));
  for (const m of markers) {
    if (usable(m.x, xScale) && usable(m.y, yScale)) {
      xs.push(m.x);
      ys.push(m.y);
    }
  }
  if (xs.length === 0 || ys.length === 0) {
    throw new Error("nothing plottable: all points empty or out of scale domain");
  }
  const xLo = Math.min(...xs), xHi = Math.max(...xs);
  const yLo = Math.min(...ys), yHi = Math.max(...ys);

  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const tx = (v: number) => {
    const t = xScale === "log"
      ? (Math.log(v) - Math.log(xLo)) / (Math.log(xHi) - Math.log(xLo) || 1)
      : (v - xLo) / (xHi - xLo || 1);
    return MARGIN.left + t * plotW;
  };
  const ty = (v: number) => {
    const t = yScale === "log"
      ? (Math.log(v) - Math.log(yLo)) / (Math.log(yHi) - Math.log(yLo) || 1)
      : (v - yLo) / (yHi - yLo || 1);
    return MARGIN.top + (1 - t) * plotH;
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
  );
  if (opts.title) {
    parts.push(`<text x="${width / 2}" y="24" text-anchor="middle" font-size="16">${opts.title}</text>`);
  }

  // axes box + ticks
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333" stroke-width="1"/>`,
  );
  for (const v of tickValues(xLo, xHi, xScale)) {
    const px = tx(v);
    if (px < MARGIN.left - 0.5 || px > MARGIN.left + plotW + 0.5) continue;
    parts.push(
      `<line x1="${fmt(px)}" y1="${MARGIN.top + plotH}" x2="${fmt(px)}" y2="${MARGIN.top + plotH + 5}" stroke="#333"/>`,
      `<text x="${fmt(px)}" y="${MARGIN.top + plotH + 20}" text-anchor="middle" font-size="11">${fmt(v)}</text>`,
    );
  }
  for (const v of tickValues(yLo, yHi, yScale)) {
    const py = ty(v);
    if (py < MARGIN.top - 0.5 || py > MARGIN.top + plotH + 0.5) continue;
    parts.push(
      `<line x1="${MARGIN.left - 5}" y1="${fmt(py)}" x2="${MARGIN.left}" y2="${fmt(py)}" stroke="#333"/>`,
      `<text x="${MARGIN.left - 8}" y="${fmt(py + 4)}" text-anchor="end" font-size="11">${fmt(v)}</text>`,
    );
  }
  if (opts.xLabel) {
    parts.push(
      `<text x="${MARGIN.left + plotW / 2}" y="${height - 12}" text-anchor="middle" font-size="13">${opts.xLabel}</text>`,
    );
  }
  if (opts.yLabel) {
    const cx = 18, cy = MARGIN.top + plotH / 2;
    parts.push(
      `<text x="${cx}" y="${cy}" text-anchor="middle" font-size="13" transform="rotate(-90 ${cx} ${cy})">${opts.yLabel}</text>`,
    );
  }

  for (const s of series) {
    const pts: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      if (usable(s.x[i], xScale) && usable(s.y[i], yScale)) {
        pts.push(`${fmt(tx(s.x[i]))},${fmt(ty(s.y[i]))}`);
      }
    }
    if (pts.length === 0) continue;
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<polyline points="${pts.join(" ")}" fill="none" stroke="${s.color}" stroke-width="${s.width ?? 1.6}"${dash}/>`,
    );
  }

  for (const m of markers) {
    if (!usable(m.x, xScale) || !usable(m.y, yScale)) continue;
    parts.push(
      `<circle cx="${fmt(tx(m.x))}" cy="${fmt(ty(m.y))}" r="${m.radius ?? 5}" fill="${m.color}"/>`,
    );
    if (m.label) {
      parts.push(
        `<text x="${fmt(tx(m.x) + 8)}" y="${fmt(ty(m.y) - 8)}" font-size="11">${m.label}</text>`,
      );
    }
  }

  const labeled = series.filter((s) => s.label);
  labeled.forEach((s, i) => {
    const lx = MARGIN.left + 12;
    const ly = MARGIN.top + 16 + i * 18;
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 26}" y2="${ly - 4}" stroke="${s.color}" stroke-width="2"${dash}/>`,
      `<text x="${lx + 32}" y="${ly}" font-size="12">${s.label}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
