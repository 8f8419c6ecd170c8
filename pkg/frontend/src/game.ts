import { buildLevelPlan } from "./levels.js";
import { Prng } from "./prng.js";
import { distance, Point, TargetSpec, TrialRecord } from "./types.js";

export type Phase = "idle" | "target" | "rest" | "done";

export interface GameConfig {
  viewportWidth: number;
  viewportHeight: number;
  seed: number;
  participantId: string;
}

export interface ShownTarget {
  spec: TargetSpec;
  center: Point;
  shownAt: number;
}

export const MIN_VIEWPORT = { width: 1024, height: 600 } as const;

const PLACEMENT_ATTEMPTS = 100;

/**
 * The experiment state machine, free of any DOM dependency.
 *
 * Drive it with pointer events carrying monotonic millisecond
 * timestamps; it produces canonical trial records.  A trial runs from
 * target appearance to the first click inside the target disc; clicks
 * outside it count as misses and the trial continues.  Given the same
 * seed and the same event script, two instances produce identical
 * trial lists, which is what the replay tests rely on.
 */
export class GameCore {
  readonly sessionId: string;
  readonly trials: TrialRecord[] = [];
  readonly warnings: string[] = [];

  private readonly config: GameConfig;
  private readonly rng: Prng;
  private readonly plan: TargetSpec[];
  private planIndex = 0;
  private phaseState: Phase = "idle";
  private current: ShownTarget | null = null;
  private previousCenterAndWidth: { center: Point; widthPx: number } | null = null;
  private trajectory: Point[] = [];
  private missClicks = 0;

  constructor(config: GameConfig) {
    if (
      config.viewportWidth < MIN_VIEWPORT.width ||
      config.viewportHeight < MIN_VIEWPORT.height
    ) {
      throw new Error(
        `viewport ${config.viewportWidth}x${config.viewportHeight} below the ` +
          `required ${MIN_VIEWPORT.width}x${MIN_VIEWPORT.height}`
      );
    }
    this.config = config;
    this.rng = new Prng(config.seed);
    this.plan = buildLevelPlan(this.rng);
    // Viewport dimensions ride along in the session id; the trial
    // schema itself has no field for them.
    this.sessionId = `popper-${config.seed}-${config.viewportWidth}x${config.viewportHeight}`;
  }

  get phase(): Phase {
    return this.phaseState;
  }

  get target(): ShownTarget | null {
    return this.current;
  }

  get targetsCompleted(): number {
    return this.trials.length;
  }

  get targetsTotal(): number {
    return this.plan.length;
  }

  /** Leave idle and show the first target; (x, y) is the cursor now. */
  start(x: number, y: number, t: number): void {
    if (this.phaseState !== "idle") return;
    this.showNext([x, y], t);
  }

  pointerMove(x: number, y: number, t: number): void {
    void t;
    if (this.phaseState !== "target") return;
    const last = this.trajectory[this.trajectory.length - 1];
    if (last[0] === x && last[1] === y) return; // collapse duplicates
    this.trajectory.push([x, y]);
  }

  click(x: number, y: number, t: number): void {
    switch (this.phaseState) {
      case "idle":
      case "done":
        return; // never accept clicks outside an active trial or rest
      case "rest":
        this.showNext([x, y], t);
        return;
      case "target":
        this.handleTargetClick([x, y], t);
    }
  }

  private handleTargetClick(click: Point, t: number): void {
    const target = this.current!;
    if (distance(click, target.center) > target.spec.widthPx / 2) {
      this.missClicks += 1;
      return;
    }
    if (t <= target.shownAt) return; // malformed input: time must advance
    this.pointerMove(click[0], click[1], t);
    const start = this.trajectory[0];
    let trajectory = this.trajectory;
    if (trajectory.length < 2) {
      // No movement before the click: keep the trial, note the oddity.
      trajectory = [start, start];
      this.warnings.push(
        `trial ${this.trials.length + 1}: no cursor movement before the click`
      );
    }
    this.trials.push({
      session_id: this.sessionId,
      participant_id: this.config.participantId,
      level_type: target.spec.levelType,
      level_label: target.spec.label,
      target_width_px: target.spec.widthPx,
      start,
      end: click,
      target_center: target.center,
      mt_s: (t - target.shownAt) / 1000,
      miss_clicks: this.missClicks,
      trajectory,
    });
    this.previousCenterAndWidth = {
      center: target.center,
      widthPx: target.spec.widthPx,
    };
    this.current = null;
    if (this.planIndex >= this.plan.length) {
      this.phaseState = "done";
    } else if (target.spec.endsSublevel) {
      this.phaseState = "rest";
    } else {
      this.showNext(click, t);
    }
  }

  private showNext(cursor: Point, t: number): void {
    const spec = this.plan[this.planIndex];
    this.planIndex += 1;
    this.current = { spec, center: this.place(spec.widthPx), shownAt: t };
    this.trajectory = [cursor];
    this.missClicks = 0;
    this.phaseState = "target";
  }

  /**
   * Random position with the disc fully inside the viewport, redrawn
   * while it would overlap the previous target's disc (which would
   * allow zero-amplitude trials).
   */
  private place(widthPx: number): Point {
    const r = widthPx / 2;
    let candidate: Point = [0, 0];
    for (let attempt = 0; attempt < PLACEMENT_ATTEMPTS; attempt++) {
      candidate = [
        this.rng.uniform(r, this.config.viewportWidth - r),
        this.rng.uniform(r, this.config.viewportHeight - r),
      ];
      const prev = this.previousCenterAndWidth;
      if (!prev) return candidate;
      if (distance(candidate, prev.center) > r + prev.widthPx / 2) {
        return candidate;
      }
    }
    return candidate;
  }
}
