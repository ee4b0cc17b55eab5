/**
 * Octant grid arrangement and scale-exponent input validation.
 *
 * The service lists the eight octants in the canonical order (x, then y,
 * then z sign, lows first). For display they form two 2x2 layers: the lower
 * layer holds the octants whose z interval is [lo, mid] (odd indices
 * 1,3,5,7), the upper layer the z-high ones (2,4,6,8); rows by x sign,
 * columns by y sign.
 */
import type { OctantDescriptor } from "./api.js";

export interface OctantLayers<T> {
  lower: [[T, T], [T, T]]; // [ [(-,-,-), (-,+,-)], [(+,-,-), (+,+,-)] ]
  upper: [[T, T], [T, T]];
}

export function octantLayers<T extends { octant_index: number }>(
  descriptors: T[],
): OctantLayers<T> {
  if (descriptors.length !== 8) {
    throw new Error(`expected 8 octants, got ${descriptors.length}`);
  }
  const byIndex = new Map(descriptors.map((d) => [d.octant_index, d]));
  const pick = (i: number): T => {
    const d = byIndex.get(i);
    if (!d) throw new Error(`missing octant ${i}`);
    return d;
  };
  return {
    lower: [
      [pick(1), pick(3)],
      [pick(5), pick(7)],
    ],
    upper: [
      [pick(2), pick(4)],
      [pick(6), pick(8)],
    ],
  };
}

/** Sign pattern of an octant index, e.g. 6 -> "(+,-,+)". */
export function octantSigns(index: number): string {
  if (index < 1 || index > 8) throw new Error(`octant index out of range: ${index}`);
  const bits = index - 1;
  const sign = (b: number) => (b ? "+" : "-");
  return `(${sign(bits & 4)},${sign(bits & 2)},${sign(bits & 1)})`;
}

export interface ScaleValidation {
  ok: boolean;
  value?: number;
  message?: string;
}

/** Scale exponents are non-negative integers; anything else is rejected inline. */
export function validateScaleExponent(raw: string): ScaleValidation {
  const trimmed = raw.trim();
  if (trimmed === "") return { ok: false, message: "enter a scale exponent m (0 for none)" };
  const value = Number(trimmed);
  if (!Number.isFinite(value) || !Number.isInteger(value)) {
    return { ok: false, message: "m must be an integer" };
  }
  if (value < 0) return { ok: false, message: "m must be >= 0" };
  return { ok: true, value };
}

/** Human-readable (1/2)^m for the live preview. */
export function scaleFactorLabel(m: number): string {
  if (m === 0) return "1 (no scaling)";
  const factor = Math.pow(2, -m);
  return `(1/2)^${m} = ${factor.toExponential(6)}`;
}

/** Per-dimension widths of a previewed region (display only). */
export function regionWidths(lo: string[], hi: string[]): number[] {
  return lo.map((l, i) => Number(hi[i]) - Number(l));
}

/** Segment summary like "[0, 8.271806e-19]" for bounds preview cells. */
export function boundsLabel(lo: string, hi: string): string {
  const fmt = (s: string) => {
    const v = Number(s);
    if (v === 0) return "0";
    if (Math.abs(v) >= 0.01 && Math.abs(v) < 1e6) return String(v);
    return v.toExponential(6);
  };
  return `[${fmt(lo)}, ${fmt(hi)}]`;
}
