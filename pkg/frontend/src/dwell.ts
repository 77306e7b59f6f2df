// Dwell-to-select: hovering one entity continuously for one second fires a
// single selection request. Leaving (or switching entities) resets the
// timer; the request fires at most once per continuous hover episode.

export const DWELL_MS = 1000;

export class DwellTracker {
  private target: string | null = null;
  private since = 0;
  private fired = false;

  constructor(
    private readonly onDwell: (classId: string) => void,
    private readonly thresholdMs: number = DWELL_MS,
  ) {}

  /** Report what the pointer is currently over (null = nothing). */
  pointerOver(target: string | null, nowMs: number): void {
    if (target !== this.target) {
      this.target = target;
      this.since = nowMs;
      this.fired = false;
    }
    this.evaluate(nowMs);
  }

  /** Clock tick while the pointer rests; call from the frame loop. */
  tick(nowMs: number): void {
    this.evaluate(nowMs);
  }

  private evaluate(nowMs: number): void {
    if (this.target === null || this.fired) return;
    if (nowMs - this.since >= this.thresholdMs) {
      this.fired = true;
      this.onDwell(this.target);
    }
  }
}
