/**
 * Audio output port.
 *
 * The engine talks to audio through this small interface so state-machine
 * and scheduling tests can inspect a fake graph instead of real
 * hardware. The WebAudio implementation pans with the platform's stereo
 * panner at the same azimuths as the pipeline's preview mix
 * (narrator -60°, viewers +60°, video center).
 */

import type { NotifySide, Speaker } from './manifest.js';

export const NARRATOR_AZIMUTH_DEG = -60;
export const VIEWER_AZIMUTH_DEG = 60;

/** Stereo panner position in [-1, 1] for a speaker's azimuth. */
export function panFor(speaker: Speaker): number {
  const azimuth = speaker === 'Narrator' ? NARRATOR_AZIMUTH_DEG : VIEWER_AZIMUTH_DEG;
  return azimuth / 90;
}

export interface AudioGraphPort {
  /** Short notification bubble on the given side. Not a discussion line. */
  playCue(side: NotifySide): void;
  /** Begin playing one discussion line's WAV asset at the given pan. */
  startLine(lineId: string, pan: number): void;
  /** Stop one discussion line. */
  stopLine(lineId: string): void;
  /** Stop every scheduled discussion source (cue and lines). */
  stopAll(): void;
  /** line_ids of discussion lines currently audible. */
  activeDiscussionSources(): string[];
}

/** Minimal WebAudio-backed graph for the browser build. */
export class WebAudioGraph implements AudioGraphPort {
  private readonly active = new Map<string, { source: AudioBufferSourceNode }>();

  constructor(
    private readonly context: AudioContext,
    private readonly buffers: Map<string, AudioBuffer>,
    private readonly cueBuffer: AudioBuffer,
  ) {}

  playCue(side: NotifySide): void {
    const source = this.context.createBufferSource();
    source.buffer = this.cueBuffer;
    const panner = this.context.createStereoPanner();
    panner.pan.value = side === 'Left' ? -2 / 3 : 2 / 3;
    source.connect(panner).connect(this.context.destination);
    source.start();
  }

  startLine(lineId: string, pan: number): void {
    const buffer = this.buffers.get(lineId);
    if (!buffer) throw new Error(`no audio asset loaded for ${lineId}`);
    const source = this.context.createBufferSource();
    source.buffer = buffer;
    const panner = this.context.createStereoPanner();
    panner.pan.value = pan;
    source.connect(panner).connect(this.context.destination);
    source.onended = () => this.active.delete(lineId);
    source.start();
    this.active.set(lineId, { source });
  }

  stopLine(lineId: string): void {
    this.active.get(lineId)?.source.stop();
    this.active.delete(lineId);
  }

  stopAll(): void {
    for (const id of [...this.active.keys()]) this.stopLine(id);
  }

  activeDiscussionSources(): string[] {
    return [...this.active.keys()];
  }
}
