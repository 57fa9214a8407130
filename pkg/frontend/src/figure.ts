import { writeFileSync } from "node:fs";
import { PNG } from "pngjs";

import { parseScanCsv, ScanCsv } from "./csv.js";
import { seriesDigest } from "./digest.js";
import { Raster, Rgb } from "./raster.js";

export interface PanelSpec {
  csv: string;
  title?: string;
  x_label?: string;
  y_label?: string;
  log_y?: boolean;
}

export interface FigureSpec {
  layout: "1x1" | "1x2";
  panels: PanelSpec[];
  out: string;
}

export interface PanelDigest {
  csv: string;
  x_digest: string;
  y_digest: string;
}

const PANEL_W = 760;
const PANEL_H = 520;
const MARGIN = { left: 78, right: 22, top: 40, bottom: 58 };
const LINE: Rgb = [25, 60, 160];
const AXIS: Rgb = [0, 0, 0];
const GRAY: Rgb = [150, 150, 150];
const MARK: Rgb = [190, 40, 40];

function niceTicks(lo: number, hi: number, n = 5): number[] {
  const span = hi - lo;
  if (!(span > 0)) return [lo];
  const raw = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const steps = [1, 2, 5, 10].map((s) => s * mag);
  const step = steps.find((s) => s >= raw) ?? steps[steps.length - 1];
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let t = first; t <= hi + 1e-12 * span; t += step) ticks.push(t);
  return ticks;
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) {
    return Number(v.toPrecision(3)).toString();
  }
  return v.toExponential(1).replace("e-", "e-").replace("e+", "e");
}

function drawPanel(img: Raster, x0: number, y0: number, spec: PanelSpec,
                   scanData: ScanCsv): void {
  const left = x0 + MARGIN.left;
  const right = x0 + PANEL_W - MARGIN.right;
  const top = y0 + MARGIN.top;
  const bottom = y0 + PANEL_H - MARGIN.bottom;

  const xs = scanData.x;
  let ys = scanData.y;
  let yLabelSuffix = "";
  if (spec.log_y) {
    const floor = Math.min(...ys.filter((v) => v > 0)) ?? 1e-300;
    ys = ys.map((v) => Math.log10(Math.max(v, floor / 10)));
    yLabelSuffix = " (log10)";
  }
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  let yLo = Math.min(...ys);
  let yHi = Math.max(...ys);
  if (yHi === yLo) {
    yHi = yLo + 1;
  }
  const pad = 0.05 * (yHi - yLo);
  yLo -= pad;
  yHi += pad;

  const px = (v: number) => left + ((v - xLo) / (xHi - xLo)) * (right - left);
  const py = (v: number) => bottom - ((v - yLo) / (yHi - yLo)) * (bottom - top);

  // frame + ticks
  img.line(left, top, left, bottom, AXIS);
  img.line(left, bottom, right, bottom, AXIS);
  for (const t of niceTicks(xLo, xHi)) {
    const X = px(t);
    img.line(X, bottom, X, bottom + 4, AXIS);
    const label = fmtTick(t);
    img.text(X - img.textWidth(label) / 2, bottom + 8, label, AXIS);
  }
  for (const t of niceTicks(yLo + pad, yHi - pad)) {
    const Y = py(t);
    img.line(left - 4, Y, left, Y, AXIS);
    const label = fmtTick(t);
    img.text(left - 8 - img.textWidth(label), Y - 3, label, AXIS);
  }

  // reference markers at +-Omega_c for spectrum panels
  const wc = Number(scanData.header["omega_c_rabi"]);
  if (scanData.columns[0] === "nu" && Number.isFinite(wc) && wc > 0) {
    for (const m of [-wc, wc]) {
      if (m > xLo && m < xHi) {
        img.line(px(m), top, px(m), bottom, MARK, 4);
      }
    }
  }

  // the polyline itself: points drawn in file order, no reordering
  for (let i = 1; i < xs.length; i++) {
    img.line(px(xs[i - 1]), py(ys[i - 1]), px(xs[i]), py(ys[i]), LINE);
  }

  if (spec.title) {
    img.text(x0 + (PANEL_W - img.textWidth(spec.title, 2)) / 2, y0 + 10,
             spec.title, AXIS, 2);
  }
  if (spec.x_label) {
    img.text(x0 + (PANEL_W - img.textWidth(spec.x_label)) / 2,
             y0 + PANEL_H - 16, spec.x_label, AXIS);
  }
  const yl = (spec.y_label ?? scanData.columns[1]) + yLabelSuffix;
  img.text(x0 + 6, y0 + 10, yl, AXIS);

  // parameter fingerprint annotation from the CSV header echo
  const keys = ["preset", "op", "prefactor_K", "gamma_c", "omega_c_rabi",
                "Dl", "filter_half_width", "normalization"];
  let line = 0;
  for (const k of keys) {
    const v = scanData.header[k];
    if (v === undefined) continue;
    img.text(left + 8, top + 6 + 9 * line, `${k}=${v}`, GRAY);
    line++;
  }
}

export function render(spec: FigureSpec): PanelDigest[] {
  if (spec.panels.length === 0) {
    throw new Error("figure spec has no panels");
  }
  const across = spec.layout === "1x2" ? 2 : 1;
  if (spec.panels.length > across) {
    throw new Error(`layout ${spec.layout} cannot hold ${spec.panels.length} panels`);
  }
  const img = new Raster(PANEL_W * across, PANEL_H);
  const digests: PanelDigest[] = [];
  spec.panels.forEach((panel, i) => {
    const scanData = parseScanCsv(panel.csv);
    drawPanel(img, i * PANEL_W, 0, panel, scanData);
    digests.push({
      csv: panel.csv,
      x_digest: seriesDigest(scanData.x),
      y_digest: seriesDigest(scanData.y),
    });
  });

  const png = new PNG({ width: img.width, height: img.height });
  Buffer.from(img.data.buffer).copy(png.data);
  writeFileSync(spec.out, PNG.sync.write(png));
  writeFileSync(spec.out + ".digest.json",
                JSON.stringify({ panels: digests }, null, 1) + "\n");
  return digests;
}
