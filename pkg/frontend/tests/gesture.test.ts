import { describe, expect, it } from 'vitest';

import {
  SHAKE_KEY_CODE,
  bindShakeSources,
  isShakeKey,
  isShakeMotion,
} from '../src/gesture.js';

describe('motion classification', () => {
  it('treats 7 m/s2 gravity-excluded acceleration as a shake', () => {
    expect(isShakeMotion({ x: 7, y: 0, z: 0 })).toBe(true);
  });

  it('accepts exactly the 6 m/s2 threshold', () => {
    expect(isShakeMotion({ x: 0, y: 6, z: 0 })).toBe(true);
  });

  it('ignores gentler motion', () => {
    expect(isShakeMotion({ x: 3, y: 3, z: 3 })).toBe(false);
    expect(isShakeMotion({ x: 0, y: 0, z: 0 })).toBe(false);
  });

  it('uses the vector magnitude, not a single axis', () => {
    expect(isShakeMotion({ x: 4, y: 4, z: 2 })).toBe(true); // |v| = 6
  });
});

describe('keyboard fallback', () => {
  it('matches only the dedicated key', () => {
    expect(isShakeKey(SHAKE_KEY_CODE)).toBe(true);
    expect(isShakeKey('Space')).toBe(false);
    expect(isShakeKey('KeyA')).toBe(false);
  });
});

describe('bindShakeSources', () => {
  function fakeTarget() {
    const listeners = new Map<string, ((ev: any) => void)[]>();
    return {
      addEventListener(type: string, fn: (ev: any) => void) {
        listeners.set(type, [...(listeners.get(type) ?? []), fn]);
      },
      removeEventListener(type: string, fn: (ev: any) => void) {
        listeners.set(
          type,
          (listeners.get(type) ?? []).filter((f) => f !== fn),
        );
      },
      emit(type: string, ev: unknown) {
        for (const fn of listeners.get(type) ?? []) fn(ev);
      },
      count() {
        return [...listeners.values()].reduce((n, fns) => n + fns.length, 0);
      },
    };
  }

  it('routes both input sources to one callback', () => {
    const target = fakeTarget();
    const hits: number[] = [];
    bindShakeSources(target, (now) => hits.push(now), () => 42);
    target.emit('devicemotion', { acceleration: { x: 8, y: 0, z: 0 } });
    target.emit('devicemotion', { acceleration: { x: 1, y: 0, z: 0 } });
    target.emit('devicemotion', { acceleration: null });
    target.emit('keydown', { code: SHAKE_KEY_CODE });
    target.emit('keydown', { code: 'Space' });
    expect(hits).toEqual([42, 42]);
  });

  it('unsubscribe removes every listener', () => {
    const target = fakeTarget();
    const unsubscribe = bindShakeSources(target, () => {});
    expect(target.count()).toBe(2);
    unsubscribe();
    expect(target.count()).toBe(0);
  });
});
