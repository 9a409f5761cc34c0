/**
 * Player state machine.
 *
 * Every transition is a pure function of (state, event, manifest) that
 * returns the next state plus a list of effects for the runtime to
 * execute. Keeping the machine pure makes the interaction rules
 * (5-second notification window, shake-to-play, auto-rewind, the
 * audio-discussion toggle) testable without any audio hardware.
 */

import type { Manifest, NotifySide, TimelineEntry } from './manifest.js';

export const RESPONSE_WINDOW_MS = 5_000;

export type Mode = 'Normal' | 'OnDemandPlayback';

export interface PendingNotification {
  /** point_id of the OnDemand entry the window belongs to. */
  entryId: number;
  /** Wall-clock deadline: notify time + the 5 s response window. */
  deadlineMs: number;
}

export interface PlayerState {
  playheadMs: number;
  playing: boolean;
  toggleOn: boolean;
  pendingNotification: PendingNotification | null;
  mode: Mode;
  /** Index of the line currently playing during OnDemandPlayback. */
  onDemandEntryId: number | null;
  onDemandLineIndex: number;
}

export type PlayerEvent =
  | { type: 'notify'; entryId: number; nowMs: number }
  | { type: 'shake'; nowMs: number }
  | { type: 'lineEnded' }
  | { type: 'toggle'; on: boolean }
  | { type: 'play' }
  | { type: 'pause' }
  | { type: 'seek'; toMs: number };

export type Effect =
  | { kind: 'playCue'; side: NotifySide }
  | { kind: 'pauseVideo' }
  | { kind: 'resumeVideo' }
  | { kind: 'seekVideo'; toMs: number }
  | { kind: 'playLine'; entryId: number; lineIndex: number }
  | { kind: 'stopAllDiscussion' }
  | { kind: 'showCommentList' }
  | { kind: 'hideCommentList' };

export interface Transition {
  state: PlayerState;
  effects: Effect[];
}

export function initialState(manifest: Manifest): PlayerState {
  return {
    playheadMs: 0,
    playing: false,
    toggleOn: manifest.toggle_default === 'on',
    pendingNotification: null,
    mode: 'Normal',
    onDemandEntryId: null,
    onDemandLineIndex: 0,
  };
}

function entryById(manifest: Manifest, entryId: number): TimelineEntry {
  const entry = manifest.entries.find((e) => e.point_id === entryId);
  if (!entry) throw new Error(`unknown entry ${entryId}`);
  return entry;
}

function unchanged(state: PlayerState): Transition {
  return { state, effects: [] };
}

/** Pure state transition; the runtime applies the returned effects. */
export function transition(
  state: PlayerState,
  event: PlayerEvent,
  manifest: Manifest,
): Transition {
  switch (event.type) {
    case 'notify': {
      // Discussion audio is off, or we are already inside an on-demand
      // playback: the notification is dropped.
      if (!state.toggleOn || state.mode !== 'Normal') return unchanged(state);
      const entry = entryById(manifest, event.entryId);
      if (entry.kind !== 'OnDemand' || entry.notify_side === null) {
        return unchanged(state);
      }
      // The video keeps playing; a newer notification replaces any open
      // window (latest wins).
      return {
        state: {
          ...state,
          pendingNotification: {
            entryId: event.entryId,
            deadlineMs: event.nowMs + entry.response_window_s * 1000,
          },
        },
        effects: [{ kind: 'playCue', side: entry.notify_side }],
      };
    }

    case 'shake': {
      const pending = state.pendingNotification;
      if (
        state.mode !== 'Normal' ||
        pending === null ||
        event.nowMs > pending.deadlineMs
      ) {
        return unchanged(state); // outside the window: no-op
      }
      return {
        state: {
          ...state,
          playing: false,
          pendingNotification: null,
          mode: 'OnDemandPlayback',
          onDemandEntryId: pending.entryId,
          onDemandLineIndex: 0,
        },
        effects: [
          { kind: 'pauseVideo' },
          { kind: 'playLine', entryId: pending.entryId, lineIndex: 0 },
        ],
      };
    }

    case 'lineEnded': {
      if (state.mode !== 'OnDemandPlayback' || state.onDemandEntryId === null) {
        return unchanged(state);
      }
      const entry = entryById(manifest, state.onDemandEntryId);
      const next = state.onDemandLineIndex + 1;
      if (next < entry.lines.length) {
        // Sequential playback: exactly one speaker at a time.
        return {
          state: { ...state, onDemandLineIndex: next },
          effects: [
            { kind: 'playLine', entryId: state.onDemandEntryId, lineIndex: next },
          ],
        };
      }
      // Done: rewind to the start of the sentence after the previous
      // break and resume the video.
      const target = entry.rewind_target_ms ?? state.playheadMs;
      return {
        state: {
          ...state,
          mode: 'Normal',
          onDemandEntryId: null,
          onDemandLineIndex: 0,
          playheadMs: target,
          playing: true,
        },
        effects: [
          { kind: 'seekVideo', toMs: target },
          { kind: 'resumeVideo' },
        ],
      };
    }

    case 'toggle': {
      if (event.on === state.toggleOn) return unchanged(state);
      if (!event.on) {
        // Off: silence every discussion source and fall back to the
        // plain chronological comment list.
        return {
          state: {
            ...state,
            toggleOn: false,
            pendingNotification: null,
            mode: 'Normal',
            onDemandEntryId: null,
            onDemandLineIndex: 0,
            playing: state.mode === 'OnDemandPlayback' ? true : state.playing,
          },
          effects: [
            { kind: 'stopAllDiscussion' },
            { kind: 'showCommentList' },
            ...(state.mode === 'OnDemandPlayback'
              ? [{ kind: 'resumeVideo' } as Effect]
              : []),
          ],
        };
      }
      return {
        state: { ...state, toggleOn: true },
        effects: [{ kind: 'hideCommentList' }],
      };
    }

    case 'play':
      if (state.mode !== 'Normal') return unchanged(state);
      return { state: { ...state, playing: true }, effects: [] };

    case 'pause':
      if (state.mode !== 'Normal') return unchanged(state);
      return { state: { ...state, playing: false }, effects: [] };

    case 'seek': {
      // The slider is disabled during on-demand playback.
      if (state.mode !== 'Normal') return unchanged(state);
      // Seeking cancels any open notification window.
      return {
        state: { ...state, playheadMs: event.toMs, pendingNotification: null },
        effects: [{ kind: 'seekVideo', toMs: event.toMs }],
      };
    }
  }
}
