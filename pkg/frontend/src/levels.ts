import { Prng } from "./prng.js";
import { TARGET_WIDTHS, TargetSpec } from "./types.js";

/**
 * The fixed session plan: four homogeneous levels (one per target
 * width, 3 sublevels x 5 targets each) followed by one heterogeneous
 * level (3 sublevels x 10 targets, width drawn per target), 90 targets
 * in total, one visible at a time.
 */
export function buildLevelPlan(rng: Prng): TargetSpec[] {
  const plan: TargetSpec[] = [];
  TARGET_WIDTHS.forEach((width, i) => {
    const level = i + 1;
    for (let sub = 1; sub <= 3; sub++) {
      for (let k = 1; k <= 5; k++) {
        plan.push({
          levelType: 0,
          label: `0.${level}.${sub}`,
          widthPx: width,
          endsSublevel: k === 5,
        });
      }
    }
  });
  for (let sub = 1; sub <= 3; sub++) {
    for (let k = 1; k <= 10; k++) {
      plan.push({
        levelType: 1,
        label: `1.5.${sub}`,
        widthPx: rng.pick(TARGET_WIDTHS),
        endsSublevel: k === 10,
      });
    }
  }
  return plan;
}
