/**
 * The single color source for every series in every view.
 *
 * Okabe-Ito derived, colorblind-safe. Views must take series colors from
 * here and nowhere else; the test suite asserts that every rendered series
 * color is one of these values.
 */
export const PALETTE = {
  correct: "#009e73",
  incorrect: "#d55e00",
  hint: "#f0e442",
  skipped: "#999999",
  path: "#0072b2",
  stepBoundary: "#000000",
} as const;

export type SeriesKind = keyof typeof PALETTE;

export function seriesColor(kind: string): string {
  const color = (PALETTE as Record<string, string>)[kind];
  if (!color) {
    throw new Error(`no palette entry for series kind: ${kind}`);
  }
  return color;
}
