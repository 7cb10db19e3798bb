import { mkdtempSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

import { decoderManifest, encoderManifest, ConvEntry } from '../src/manifest.js';
import { writeSafetensors } from '../src/safetensors.js';

export function tempDir(): string {
  return mkdtempSync(join(tmpdir(), 'nstwconv-'));
}

/** Deterministic pseudo-random fill so fixtures are reproducible. */
export function patternData(n: number, seed: number): Float32Array {
  const out = new Float32Array(n);
  let state = (seed * 2654435761) >>> 0;
  for (let i = 0; i < n; i++) {
    state = (state * 1664525 + 1013904223) >>> 0;
    out[i] = (state / 0xffffffff) * 2 - 1;
  }
  return out;
}

function oihwToHwio(data: Float32Array, [co, ci, kh, kw]: number[]): Float32Array {
  const out = new Float32Array(data.length);
  for (let o = 0; o < co; o++) {
    for (let i = 0; i < ci; i++) {
      for (let h = 0; h < kh; h++) {
        for (let w = 0; w < kw; w++) {
          out[((h * kw + w) * ci + i) * co + o] = data[((o * ci + i) * kh + h) * kw + w];
        }
      }
    }
  }
  return out;
}

function checkpointTensors(entries: ConvEntry[], layout: 'oihw' | 'hwio', seedBase: number) {
  const tensors: { name: string; shape: number[]; data: Float32Array }[] = [];
  entries.forEach((e, i) => {
    const wShape = [e.outCh, e.inCh, 3, 3];
    let wData = patternData(e.outCh * e.inCh * 9, seedBase + 2 * i);
    let shape = wShape;
    if (layout === 'hwio') {
      wData = oihwToHwio(wData, wShape);
      shape = [3, 3, e.inCh, e.outCh];
    }
    tensors.push({ name: `${e.sourceName}.weight`, shape, data: wData });
    tensors.push({
      name: `${e.sourceName}.bias`,
      shape: [e.outCh],
      data: patternData(e.outCh, seedBase + 2 * i + 1),
    });
  });
  return tensors;
}

export function writeVggFixture(path: string, layout: 'oihw' | 'hwio' = 'oihw'): void {
  writeFileSync(path, writeSafetensors(checkpointTensors(encoderManifest(), layout, 1000)));
}

export function writeDecoderFixture(
  path: string,
  level: number,
  family: 'decoder' | 'udecoder' = 'decoder',
  layout: 'oihw' | 'hwio' = 'oihw',
): void {
  const seed = 2000 + 100 * level + (family === 'udecoder' ? 50 : 0);
  writeFileSync(path, writeSafetensors(checkpointTensors(decoderManifest(level, family), layout, seed)));
}
