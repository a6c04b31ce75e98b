/**
 * Tiny deterministic SVG scene builder. No timestamps, no randomness;
 * numbers are rendered through one fixed formatter, so identical inputs
 * produce byte-identical files.
 */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { top: 34, right: 24, bottom: 58, left: 64 };

export const PALETTE = [
  "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
  "#937860", "#da8bc3", "#8c8c8c",
];

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const rounded = Number(x.toFixed(3));
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

export function fmtTick(x: number): string {
  const rounded = Number(x.toPrecision(6));
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

export class Scene {
  private parts: string[] = [];

  rect(x: number, y: number, w: number, h: number, fill: string, opacity = 1): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ` +
      `fill="${fill}"${opacity === 1 ? "" : ` fill-opacity="${fmt(opacity)}"`}/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string,
       width = 1, dash?: string): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
      `stroke="${stroke}" stroke-width="${fmt(width)}"` +
      `${dash ? ` stroke-dasharray="${dash}"` : ""}/>`,
    );
  }

  path(points: Array<[number, number]>, stroke: string, width = 2): void {
    const d = points
      .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)} ${fmt(y)}`)
      .join(" ");
    this.parts.push(
      `<path d="${d}" fill="none" stroke="${stroke}" stroke-width="${fmt(width)}"/>`,
    );
  }

  polygon(points: Array<[number, number]>, fill: string, opacity: number): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(`<polygon points="${pts}" fill="${fill}" fill-opacity="${fmt(opacity)}"/>`);
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.parts.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${fmt(r)}" fill="${fill}"/>`);
  }

  text(x: number, y: number, content: string, size = 12,
       anchor: "start" | "middle" | "end" = "middle", rotate = 0): void {
    const transform = rotate === 0 ? "" :
      ` transform="rotate(${fmt(rotate)} ${fmt(x)} ${fmt(y)})"`;
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-family="Helvetica,Arial,sans-serif" ` +
      `font-size="${size}" text-anchor="${anchor}"${transform}>${escapeXml(content)}</text>`,
    );
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
      ...this.parts,
      "</svg>",
      "",
    ].join("\n");
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Round axis bounds outward and produce evenly spaced ticks. */
export function niceTicks(lo: number, hi: number, target = 5): number[] {
  if (lo === hi) {
    lo -= Math.abs(lo) * 0.5 + 1e-12;
    hi += Math.abs(hi) * 0.5 + 1e-12;
  }
  const span = hi - lo;
  const rawStep = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const norm = rawStep / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}
