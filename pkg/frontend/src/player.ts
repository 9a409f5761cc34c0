/**
 * Playback engine.
 *
 * Single UI thread, event driven: user input and clock ticks become
 * state-machine events, and the returned effects drive the audio graph,
 * video transport, and comment-list UI. The engine owns only
 * scheduling bookkeeping (which lines are due, when the current line
 * ends); every decision lives in the pure state machine.
 */

import type { AudioGraphPort } from './audio.js';
import { panFor } from './audio.js';
import type { DiscussionLine, Manifest, TimelineEntry } from './manifest.js';
import type { Effect, PlayerEvent, PlayerState } from './state.js';
import { initialState, transition } from './state.js';

export interface VideoPort {
  play(): void;
  pause(): void;
  seek(toMs: number): void;
}

export interface UiPort {
  showCommentList(): void;
  hideCommentList(): void;
}

function lineDurationMs(line: DiscussionLine): number {
  return Math.round(line.est_duration_s * 1000);
}

export class Player {
  private state: PlayerState;
  private nowMs = 0;
  /** Remaining time of the line playing in on-demand mode. */
  private onDemandRemainingMs = 0;
  /** playhead end time per active auto-play line. */
  private readonly activeAutoLines = new Map<string, number>();

  constructor(
    private readonly manifest: Manifest,
    private readonly graph: AudioGraphPort,
    private readonly video: VideoPort,
    private readonly ui: UiPort,
  ) {
    this.state = initialState(manifest);
  }

  getState(): Readonly<PlayerState> {
    return this.state;
  }

  getNowMs(): number {
    return this.nowMs;
  }

  // -- user input --------------------------------------------------------

  shake(): void {
    this.dispatch({ type: 'shake', nowMs: this.nowMs });
  }

  toggle(on: boolean): void {
    this.dispatch({ type: 'toggle', on });
  }

  play(): void {
    const wasPlaying = this.state.playing;
    this.dispatch({ type: 'play' });
    if (!wasPlaying && this.state.playing) this.video.play();
  }

  pause(): void {
    const wasPlaying = this.state.playing;
    this.dispatch({ type: 'pause' });
    if (wasPlaying && !this.state.playing) this.video.pause();
  }

  seek(toMs: number): void {
    this.dispatch({ type: 'seek', toMs });
  }

  // -- clock -------------------------------------------------------------

  /** Advance wall clock (and the playhead when the video is playing). */
  tick(dtMs: number): void {
    this.nowMs += dtMs;

    if (this.state.mode === 'OnDemandPlayback') {
      this.onDemandRemainingMs -= dtMs;
      if (this.onDemandRemainingMs <= 0) {
        const finished = this.currentOnDemandLine();
        if (finished) this.graph.stopLine(finished.line_id);
        this.dispatch({ type: 'lineEnded' });
      }
      return; // the video is paused; the playhead does not move
    }

    if (!this.state.playing) return;
    const prev = this.state.playheadMs;
    const cur = prev + dtMs;
    this.state = { ...this.state, playheadMs: cur };

    for (const entry of this.manifest.entries) {
      if (entry.kind === 'OnDemand') {
        if (prev < entry.time_ms && entry.time_ms <= cur) {
          this.dispatch({ type: 'notify', entryId: entry.point_id, nowMs: this.nowMs });
        }
      } else if (this.state.toggleOn) {
        this.scheduleAutoPlay(entry, prev, cur);
      }
    }
    this.expireAutoLines(cur);
    this.expireNotification();
  }

  // -- internals ---------------------------------------------------------

  private currentOnDemandLine(): DiscussionLine | null {
    if (this.state.onDemandEntryId === null) return null;
    const entry = this.manifest.entries.find(
      (e) => e.point_id === this.state.onDemandEntryId,
    );
    return entry?.lines[this.state.onDemandLineIndex] ?? null;
  }

  private scheduleAutoPlay(entry: TimelineEntry, prevMs: number, curMs: number): void {
    for (const line of entry.lines) {
      const start = entry.time_ms + line.offset_ms;
      if (prevMs < start && start <= curMs) {
        this.graph.startLine(line.line_id, panFor(line.speaker));
        this.activeAutoLines.set(line.line_id, start + lineDurationMs(line));
      }
    }
  }

  private expireAutoLines(playheadMs: number): void {
    for (const [lineId, endMs] of this.activeAutoLines) {
      if (endMs <= playheadMs) {
        this.graph.stopLine(lineId);
        this.activeAutoLines.delete(lineId);
      }
    }
  }

  private expireNotification(): void {
    const pending = this.state.pendingNotification;
    if (pending && this.nowMs > pending.deadlineMs) {
      this.state = { ...this.state, pendingNotification: null };
    }
  }

  private dispatch(event: PlayerEvent): void {
    const result = transition(this.state, event, this.manifest);
    this.state = result.state;
    for (const effect of result.effects) this.run(effect);
  }

  private run(effect: Effect): void {
    switch (effect.kind) {
      case 'playCue':
        this.graph.playCue(effect.side);
        break;
      case 'pauseVideo':
        this.video.pause();
        break;
      case 'resumeVideo':
        this.video.play();
        break;
      case 'seekVideo':
        // Discussion lines never survive a jump on the timeline.
        for (const lineId of this.activeAutoLines.keys()) this.graph.stopLine(lineId);
        this.activeAutoLines.clear();
        this.video.seek(effect.toMs);
        break;
      case 'playLine': {
        const entry = this.manifest.entries.find((e) => e.point_id === effect.entryId);
        const line = entry?.lines[effect.lineIndex];
        if (!entry || !line) throw new Error(`no line ${effect.lineIndex} in entry ${effect.entryId}`);
        this.graph.startLine(line.line_id, panFor(line.speaker));
        this.onDemandRemainingMs = lineDurationMs(line);
        break;
      }
      case 'stopAllDiscussion':
        this.graph.stopAll();
        this.activeAutoLines.clear();
        break;
      case 'showCommentList':
        this.ui.showCommentList();
        break;
      case 'hideCommentList':
        this.ui.hideCommentList();
        break;
    }
  }
}
