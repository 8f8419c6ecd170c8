import { TrialRecord } from "./types.js";

/**
 * Serialize trials as a canonical trial log: one JSON object per line,
 * fixed key order, exactly the schema the analysis toolkit reads back
 * in strict mode.
 */
export function toCanonicalLog(trials: TrialRecord[]): string {
  return trials
    .map((t) =>
      JSON.stringify({
        session_id: t.session_id,
        participant_id: t.participant_id,
        level_type: t.level_type,
        level_label: t.level_label,
        target_width_px: t.target_width_px,
        start: t.start,
        end: t.end,
        target_center: t.target_center,
        mt_s: t.mt_s,
        miss_clicks: t.miss_clicks,
        trajectory: t.trajectory,
      })
    )
    .map((line) => line + "\n")
    .join("");
}

export interface UploadResponse {
  accepted: number;
  rejected: number;
  diagnostics: string[];
}

/** POST a canonical log to a collection endpoint's /v1/sessions. */
export async function uploadLog(
  endpointBase: string,
  body: string
): Promise<UploadResponse> {
  const url = endpointBase.replace(/\/$/, "") + "/v1/sessions";
  const response = await fetch(url, {
    method: "POST",
    headers: { "Content-Type": "application/x-ndjson" },
    body,
  });
  const payload = (await response.json()) as UploadResponse;
  if (!response.ok) {
    throw new Error(
      `upload rejected (${response.status}): ${payload.diagnostics?.join("; ")}`
    );
  }
  return payload;
}
