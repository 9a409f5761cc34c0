/**
 * Shake gesture detection.
 *
 * Mobile: device-motion acceleration with gravity excluded, treated as
 * a shake when the magnitude reaches 6 m/s². Desktop has no motion
 * sensor, so a dedicated key next to the spacebar routes through the
 * same gesture event.
 */

export const SHAKE_THRESHOLD_MS2 = 6;

/** Key code used as the desktop shake surrogate. */
export const SHAKE_KEY_CODE = 'KeyB';

export interface MotionSample {
  x: number;
  y: number;
  z: number;
}

/** True when a gravity-excluded acceleration sample counts as a shake. */
export function isShakeMotion(sample: MotionSample): boolean {
  const magnitude = Math.hypot(sample.x, sample.y, sample.z);
  return magnitude >= SHAKE_THRESHOLD_MS2;
}

/** True when a keyboard event code is the desktop shake fallback. */
export function isShakeKey(code: string): boolean {
  return code === SHAKE_KEY_CODE;
}

/**
 * Wire both input sources to one callback. Returns an unsubscribe
 * function. The callback receives the wall-clock time of the gesture.
 */
export function bindShakeSources(
  target: {
    addEventListener(type: string, fn: (ev: any) => void): void;
    removeEventListener(type: string, fn: (ev: any) => void): void;
  },
  onShake: (nowMs: number) => void,
  now: () => number = () => Date.now(),
): () => void {
  const onMotion = (ev: { acceleration?: MotionSample | null }) => {
    if (ev.acceleration && isShakeMotion(ev.acceleration)) onShake(now());
  };
  const onKey = (ev: { code: string }) => {
    if (isShakeKey(ev.code)) onShake(now());
  };
  target.addEventListener('devicemotion', onMotion);
  target.addEventListener('keydown', onKey);
  return () => {
    target.removeEventListener('devicemotion', onMotion);
    target.removeEventListener('keydown', onKey);
  };
}
