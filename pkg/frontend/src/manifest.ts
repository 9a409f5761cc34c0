/**
 * Manifest contract (schema v1).
 *
 * The player consumes exactly what the pipeline publishes: one JSON
 * manifest plus per-line WAV assets served statically. Parsing is
 * strict — a manifest from a different schema version or with missing
 * fields is rejected up front rather than failing mid-playback.
 */

export const MANIFEST_VERSION = 1;

export type Speaker = 'Narrator' | 'Viewer';
export type EntryKind = 'AutoPlay' | 'OnDemand';
export type NotifySide = 'Left' | 'Right';

export interface DiscussionLine {
  line_id: string;
  speaker: Speaker;
  tone: string;
  text: string;
  est_duration_s: number;
  offset_ms: number;
}

export interface TimelineEntry {
  kind: EntryKind;
  point_id: number;
  time_ms: number;
  lines: DiscussionLine[];
  notify_side: NotifySide | null;
  rewind_target_ms: number | null;
  response_window_s: number;
}

export interface Manifest {
  manifest_version: number;
  video_ref: string;
  duration_ms: number;
  sample_rate: number;
  toggle_default: 'on' | 'off';
  assets: Record<string, string>;
  entries: TimelineEntry[];
}

export class ManifestError extends Error {}

function fail(path: string, why: string): never {
  throw new ManifestError(`manifest ${path}: ${why}`);
}

function isRecord(v: unknown): v is Record<string, unknown> {
  return typeof v === 'object' && v !== null && !Array.isArray(v);
}

function num(v: unknown, path: string): number {
  if (typeof v !== 'number' || !Number.isFinite(v)) fail(path, 'expected a number');
  return v;
}

function str(v: unknown, path: string): string {
  if (typeof v !== 'string') fail(path, 'expected a string');
  return v;
}

function parseLine(v: unknown, path: string): DiscussionLine {
  if (!isRecord(v)) fail(path, 'expected an object');
  const speaker = str(v.speaker, `${path}.speaker`);
  if (speaker !== 'Narrator' && speaker !== 'Viewer') {
    fail(`${path}.speaker`, `unknown speaker ${speaker}`);
  }
  return {
    line_id: str(v.line_id, `${path}.line_id`),
    speaker,
    tone: str(v.tone, `${path}.tone`),
    text: str(v.text, `${path}.text`),
    est_duration_s: num(v.est_duration_s, `${path}.est_duration_s`),
    offset_ms: num(v.offset_ms, `${path}.offset_ms`),
  };
}

function parseEntry(v: unknown, path: string): TimelineEntry {
  if (!isRecord(v)) fail(path, 'expected an object');
  const kind = str(v.kind, `${path}.kind`);
  if (kind !== 'AutoPlay' && kind !== 'OnDemand') {
    fail(`${path}.kind`, `unknown kind ${kind}`);
  }
  const side = v.notify_side;
  if (side !== null && side !== 'Left' && side !== 'Right') {
    fail(`${path}.notify_side`, 'expected Left, Right, or null');
  }
  if (kind === 'OnDemand') {
    if (side === null) fail(`${path}.notify_side`, 'required for OnDemand');
    if (typeof v.rewind_target_ms !== 'number') {
      fail(`${path}.rewind_target_ms`, 'required for OnDemand');
    }
  }
  const lines = v.lines;
  if (!Array.isArray(lines)) fail(`${path}.lines`, 'expected an array');
  return {
    kind,
    point_id: num(v.point_id, `${path}.point_id`),
    time_ms: num(v.time_ms, `${path}.time_ms`),
    lines: lines.map((l, i) => parseLine(l, `${path}.lines[${i}]`)),
    notify_side: side as NotifySide | null,
    rewind_target_ms:
      typeof v.rewind_target_ms === 'number' ? v.rewind_target_ms : null,
    response_window_s: num(v.response_window_s, `${path}.response_window_s`),
  };
}

/** Parse and validate a decoded manifest document. */
export function parseManifest(doc: unknown): Manifest {
  if (!isRecord(doc)) fail('$', 'expected an object');
  const version = num(doc.manifest_version, '$.manifest_version');
  if (version !== MANIFEST_VERSION) {
    fail('$.manifest_version', `unsupported version ${version}`);
  }
  const toggle = str(doc.toggle_default, '$.toggle_default');
  if (toggle !== 'on' && toggle !== 'off') {
    fail('$.toggle_default', `expected on/off, got ${toggle}`);
  }
  const assets = doc.assets;
  if (!isRecord(assets)) fail('$.assets', 'expected an object');
  for (const [key, value] of Object.entries(assets)) {
    str(value, `$.assets[${key}]`);
  }
  const entries = doc.entries;
  if (!Array.isArray(entries)) fail('$.entries', 'expected an array');
  const manifest: Manifest = {
    manifest_version: version,
    video_ref: str(doc.video_ref, '$.video_ref'),
    duration_ms: num(doc.duration_ms, '$.duration_ms'),
    sample_rate: num(doc.sample_rate, '$.sample_rate'),
    toggle_default: toggle,
    assets: assets as Record<string, string>,
    entries: entries.map((e, i) => parseEntry(e, `$.entries[${i}]`)),
  };
  for (const entry of manifest.entries) {
    for (const line of entry.lines) {
      if (!(line.line_id in manifest.assets)) {
        fail('$.assets', `missing asset for line ${line.line_id}`);
      }
    }
  }
  return manifest;
}

/**
 * Flat chronological comment view for toggle-off mode: every viewer
 * line across all entries, ordered by its position on the video
 * timeline.
 */
export function chronologicalComments(
  manifest: Manifest,
): { time_ms: number; text: string }[] {
  const rows: { time_ms: number; text: string }[] = [];
  for (const entry of manifest.entries) {
    for (const line of entry.lines) {
      if (line.speaker === 'Viewer') {
        rows.push({ time_ms: entry.time_ms + line.offset_ms, text: line.text });
      }
    }
  }
  rows.sort((a, b) => a.time_ms - b.time_ms);
  return rows;
}
