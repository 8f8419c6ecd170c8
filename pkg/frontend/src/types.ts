/** Shared record types mirroring the canonical trial-log schema. */

export type Point = [number, number];

export interface TrialRecord {
  session_id: string;
  participant_id: string;
  level_type: 0 | 1;
  level_label: string;
  target_width_px: number;
  start: Point;
  end: Point;
  target_center: Point;
  mt_s: number;
  miss_clicks: number;
  trajectory: Point[];
}

export interface TargetSpec {
  /** 0 = homogeneous, 1 = heterogeneous */
  levelType: 0 | 1;
  /** "x.y.z": level type, level number (1-5), sublevel (1-3) */
  label: string;
  widthPx: number;
  /** True for the last target of a sublevel (a rest screen follows). */
  endsSublevel: boolean;
}

export const TARGET_WIDTHS = [32, 64, 96, 128] as const;

export function distance(a: Point, b: Point): number {
  return Math.hypot(a[0] - b[0], a[1] - b[1]);
}
