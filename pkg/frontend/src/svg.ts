/**
 * Minimal deterministic SVG plotting.
 *
 * Output is a pure function of the plot description: fixed canvas
 * geometry, series sorted by the caller, numbers formatted with a fixed
 * precision.  Each data series becomes a `<g class="series">` (or
 * `class="bound"` for reference lines) holding a polyline plus one circle
 * marker per point, so single-point series stay visible and emitted files
 * are easy to assert on.
 */

export interface Series {
  label: string;
  points: Array<[number, number]>;
  kind: "series" | "bound";
  dashed?: boolean;
}

export interface Axis {
  label: string;
  scale: "linear" | "log";
}

export interface Panel {
  title: string;
  x: Axis;
  y: Axis;
  series: Series[];
}

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { left: 70, right: 180, top: 40, bottom: 50 };
const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2",
];

function fmt(value: number): string {
  return Number(value.toPrecision(6)).toString();
}

class Scale {
  constructor(
    readonly kind: "linear" | "log",
    readonly lo: number,
    readonly hi: number,
    readonly rangeLo: number,
    readonly rangeHi: number
  ) {}

  place(value: number): number {
    const [a, b] =
      this.kind === "log"
        ? [Math.log10(this.lo), Math.log10(this.hi)]
        : [this.lo, this.hi];
    const v = this.kind === "log" ? Math.log10(value) : value;
    const t = b === a ? 0.5 : (v - a) / (b - a);
    return this.rangeLo + t * (this.rangeHi - this.rangeLo);
  }

  ticks(): number[] {
    if (this.kind === "log") {
      const lo = Math.floor(Math.log10(this.lo));
      const hi = Math.ceil(Math.log10(this.hi));
      const out: number[] = [];
      for (let e = lo; e <= hi; e++) out.push(10 ** e);
      return out.filter((t) => t >= this.lo / 1.0001 && t <= this.hi * 1.0001);
    }
    const span = this.hi - this.lo;
    if (span <= 0) return [this.lo];
    const step = 10 ** Math.floor(Math.log10(span / 4));
    const mult = span / step > 20 ? 5 : span / step > 8 ? 2 : 1;
    const first = Math.ceil(this.lo / (step * mult)) * step * mult;
    const out: number[] = [];
    for (let t = first; t <= this.hi + 1e-12; t += step * mult) out.push(t);
    return out;
  }
}

function extent(values: number[], scale: "linear" | "log"): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (scale === "log") {
    if (lo === hi) return [lo / 10, hi * 10];
    return [lo, hi];
  }
  if (lo === hi) return [lo - 1, hi + 1];
  if (lo > 0 && lo < 0.3 * hi) lo = 0;
  return [lo, hi];
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderPanel(panel: Panel, originY = 0): string {
  const usable = panel.series
    .map((s) => ({
      ...s,
      points: s.points.filter(
        ([x, y]) =>
          (panel.x.scale !== "log" || x > 0) && (panel.y.scale !== "log" || y > 0)
      ),
    }))
    .filter((s) => s.points.length > 0);
  if (usable.length === 0) {
    throw new Error(`panel '${panel.title}': no drawable data`);
  }
  const xs = usable.flatMap((s) => s.points.map((p) => p[0]));
  const ys = usable.flatMap((s) => s.points.map((p) => p[1]));
  const [xLo, xHi] = extent(xs, panel.x.scale);
  const [yLo, yHi] = extent(ys, panel.y.scale);
  const top = originY + MARGIN.top;
  const bottom = originY + HEIGHT - MARGIN.bottom;
  const xScale = new Scale(panel.x.scale, xLo, xHi, MARGIN.left, WIDTH - MARGIN.right);
  const yScale = new Scale(panel.y.scale, yLo, yHi, bottom, top);

  const parts: string[] = [];
  parts.push(`<g class="panel" data-title="${escapeXml(panel.title)}">`);
  parts.push(
    `<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="${top - 16}" ` +
      `text-anchor="middle" font-size="15" font-weight="bold">${escapeXml(panel.title)}</text>`
  );
  // frame
  parts.push(
    `<rect x="${MARGIN.left}" y="${top}" width="${WIDTH - MARGIN.right - MARGIN.left}" ` +
      `height="${bottom - top}" fill="none" stroke="#333"/>`
  );
  for (const tick of xScale.ticks()) {
    const px = xScale.place(tick);
    parts.push(`<line x1="${fmt(px)}" y1="${bottom}" x2="${fmt(px)}" y2="${bottom + 5}" stroke="#333"/>`);
    parts.push(
      `<text x="${fmt(px)}" y="${bottom + 18}" text-anchor="middle" font-size="11">${fmt(tick)}</text>`
    );
  }
  for (const tick of yScale.ticks()) {
    const py = yScale.place(tick);
    parts.push(`<line x1="${MARGIN.left - 5}" y1="${fmt(py)}" x2="${MARGIN.left}" y2="${fmt(py)}" stroke="#333"/>`);
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${fmt(py + 4)}" text-anchor="end" font-size="11">${fmt(tick)}</text>`
    );
  }
  parts.push(
    `<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="${bottom + 38}" ` +
      `text-anchor="middle" font-size="12">${escapeXml(panel.x.label)}</text>`
  );
  parts.push(
    `<text x="18" y="${(top + bottom) / 2}" text-anchor="middle" font-size="12" ` +
      `transform="rotate(-90 18 ${(top + bottom) / 2})">${escapeXml(panel.y.label)}</text>`
  );

  usable.forEach((series, index) => {
    const color = series.kind === "bound" ? "#b8860b" : PALETTE[index % PALETTE.length];
    const dash = series.dashed || series.kind === "bound" ? ' stroke-dasharray="6 4"' : "";
    const coords = series.points
      .map(([x, y]) => `${fmt(xScale.place(x))},${fmt(yScale.place(y))}`)
      .join(" ");
    parts.push(
      `<g class="${series.kind}" data-label="${escapeXml(series.label)}">`
    );
    if (series.points.length > 1) {
      parts.push(`<polyline points="${coords}" fill="none" stroke="${color}" stroke-width="1.8"${dash}/>`);
    }
    for (const [x, y] of series.points) {
      parts.push(
        `<circle cx="${fmt(xScale.place(x))}" cy="${fmt(yScale.place(y))}" r="2.6" fill="${color}"/>`
      );
    }
    parts.push("</g>");
    const legendY = top + 14 * (index + 1);
    parts.push(
      `<line x1="${WIDTH - MARGIN.right + 10}" y1="${legendY - 4}" x2="${WIDTH - MARGIN.right + 34}" ` +
        `y2="${legendY - 4}" stroke="${color}" stroke-width="2"${dash}/>`
    );
    parts.push(
      `<text x="${WIDTH - MARGIN.right + 40}" y="${legendY}" font-size="11">${escapeXml(series.label)}</text>`
    );
  });
  parts.push("</g>");
  return parts.join("\n");
}

export function renderFigure(panels: Panel[]): string {
  const body = panels.map((panel, i) => renderPanel(panel, i * HEIGHT)).join("\n");
  const height = panels.length * HEIGHT;
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${height}" ` +
    `viewBox="0 0 ${WIDTH} ${height}" font-family="sans-serif">\n` +
    `<rect width="${WIDTH}" height="${height}" fill="white"/>\n${body}\n</svg>\n`
  );
}
