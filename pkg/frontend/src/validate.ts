// Client-side input validation mirroring the API's ranges. The server is
// authoritative; these exist to reject bad input before a round trip.

export function likertValid(value: unknown): boolean {
  return typeof value === "number" && Number.isInteger(value) && value >= 1 && value <= 5;
}

export function hoursValid(value: unknown): boolean {
  return typeof value === "number" && Number.isFinite(value) && value >= 0 && value <= 24;
}

export function adjustmentValid(value: unknown): boolean {
  return typeof value === "number" && Number.isFinite(value) && Math.abs(value) <= 2;
}

export function gradeValid(value: unknown): boolean {
  return typeof value === "number" && Number.isFinite(value) && value >= 0 && value <= 20;
}

export function periodValid(value: string): boolean {
  return /^\d{4}-W\d{2}$/.test(value);
}
