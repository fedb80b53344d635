/** Display formatting; numbers come from the server and are only rounded. */

export function formatComponent(v: number): string {
  return v.toFixed(6);
}

export function formatTriplet(rgb: number[]): string {
  if (rgb.length !== 3) throw new Error(`expected 3 components, got ${rgb.length}`);
  return `(${rgb.map(formatComponent).join(", ")})`;
}

export function formatDegrees(v: number): string {
  return `${v.toFixed(3)}°`;
}
