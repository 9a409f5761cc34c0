export * from './manifest.js';
export * from './state.js';
export * from './gesture.js';
export * from './audio.js';
export * from './player.js';
