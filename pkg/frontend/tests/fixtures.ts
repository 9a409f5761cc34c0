import type { Manifest } from '../src/manifest.js';

/** Manifest shaped exactly like pipeline output: one auto-play gap and
 * one on-demand break. */
export function sampleManifest(): Manifest {
  return {
    manifest_version: 1,
    video_ref: 'video.wav',
    duration_ms: 60_000,
    sample_rate: 44_100,
    toggle_default: 'on',
    assets: {
      p0_t0_l0: 'assets/p0_t0_l0.wav',
      p0_t0_l1: 'assets/p0_t0_l1.wav',
      p1_t1_l0: 'assets/p1_t1_l0.wav',
      p1_t1_l1: 'assets/p1_t1_l1.wav',
    },
    entries: [
      {
        kind: 'AutoPlay',
        point_id: 0,
        time_ms: 1000,
        notify_side: null,
        rewind_target_ms: null,
        response_window_s: 5,
        lines: [
          {
            line_id: 'p0_t0_l0',
            speaker: 'Viewer',
            tone: 'V1',
            text: 'first remark',
            est_duration_s: 1.0,
            offset_ms: 0,
          },
          {
            line_id: 'p0_t0_l1',
            speaker: 'Viewer',
            tone: 'V2',
            text: 'second remark',
            est_duration_s: 1.0,
            offset_ms: 1000,
          },
        ],
      },
      {
        kind: 'OnDemand',
        point_id: 1,
        time_ms: 30_500,
        notify_side: 'Left',
        rewind_target_ms: 12_300,
        response_window_s: 5,
        lines: [
          {
            line_id: 'p1_t1_l0',
            speaker: 'Narrator',
            tone: 'Narrator',
            text: 'A man waves.',
            est_duration_s: 1.0,
            offset_ms: 0,
          },
          {
            line_id: 'p1_t1_l1',
            speaker: 'Viewer',
            tone: 'V1',
            text: 'hello there',
            est_duration_s: 1.0,
            offset_ms: 1000,
          },
        ],
      },
    ],
  };
}
