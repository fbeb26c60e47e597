/** Axis/tooltip formatting helpers. Time axes show minutes with one decimal. */

export function minutesLabel(seconds: number): string {
  return `${(seconds / 60).toFixed(1)} min`;
}

export function secondsLabel(seconds: number): string {
  return `${seconds.toFixed(1)} s`;
}

/** Evenly spaced tick values from 0 to max (inclusive of the top tick). */
export function ticks(max: number, count: number): number[] {
  if (max <= 0) {
    return [0];
  }
  const out: number[] = [];
  for (let i = 0; i <= count; i += 1) {
    out.push((max * i) / count);
  }
  return out;
}
