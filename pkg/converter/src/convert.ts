/**
 * Checkpoint -> NSTW conversion and bit-exact verification.
 */

import { readFileSync } from 'node:fs';

import {
  ConvEntry,
  decoderManifest,
  encoderManifest,
  expectedBiasShape,
  expectedWeightShape,
} from './manifest.js';
import { NamedTensor, readNstw, writeNstw } from './nstw.js';
import { readSafetensors, SourceTensor } from './safetensors.js';

export type KernelLayout = 'oihw' | 'hwio';

export interface ConvertOptions {
  vggPath: string;
  /** level -> checkpoint path for the nearest-upsampling decoder family */
  decoderPaths: Map<number, string>;
  /** level -> checkpoint path for the unpooling decoder family */
  unpoolDecoderPaths: Map<number, string>;
  layout: KernelLayout;
  warn?: (msg: string) => void;
}

export interface ConvertSummary {
  tensorCount: number;
  totalBytes: number;
}

export class ConversionError extends Error {}

function shapesEqual(a: number[], b: number[]): boolean {
  return a.length === b.length && a.every((d, i) => d === b[i]);
}

/** (kH, kW, in, out) -> (out, in, kH, kW), row-major both sides. */
function hwioToOihw(t: SourceTensor): SourceTensor {
  const [kh, kw, ci, co] = t.shape;
  const out = new Float32Array(t.data.length);
  for (let h = 0; h < kh; h++) {
    for (let w = 0; w < kw; w++) {
      for (let i = 0; i < ci; i++) {
        for (let o = 0; o < co; o++) {
          out[((o * ci + i) * kh + h) * kw + w] =
            t.data[((h * kw + w) * ci + i) * co + o];
        }
      }
    }
  }
  return { ...t, shape: [co, ci, kh, kw], data: out };
}

function pick(
  source: Map<string, SourceTensor>,
  checkpoint: string,
  key: string,
  expected: number[],
  layout: KernelLayout,
): SourceTensor {
  let t = source.get(key);
  if (!t) {
    throw new ConversionError(`${checkpoint}: missing tensor ${key}`);
  }
  if (layout === 'hwio' && t.shape.length === 4) {
    t = hwioToOihw(t);
  }
  if (!shapesEqual(t.shape, expected)) {
    throw new ConversionError(
      `${checkpoint}: tensor ${key} has shape [${t.shape}], expected [${expected}]`,
    );
  }
  return t;
}

function gather(
  entries: ConvEntry[],
  source: Map<string, SourceTensor>,
  checkpoint: string,
  layout: KernelLayout,
  out: NamedTensor[],
): void {
  for (const e of entries) {
    const w = pick(source, checkpoint, `${e.sourceName}.weight`, expectedWeightShape(e), layout);
    const b = pick(source, checkpoint, `${e.sourceName}.bias`, expectedBiasShape(e), 'oihw');
    out.push({ name: `${e.engineName}.weight`, shape: w.shape, data: w.data });
    out.push({ name: `${e.engineName}.bias`, shape: b.shape, data: b.data });
  }
}

function loadCheckpoint(path: string, warn: (m: string) => void): Map<string, SourceTensor> {
  return readSafetensors(readFileSync(path), warn);
}

/** Assemble the full engine tensor list in canonical order. */
export function collectTensors(opts: ConvertOptions): NamedTensor[] {
  const warn = opts.warn ?? ((m) => console.warn(m));
  const tensors: NamedTensor[] = [];
  const vgg = loadCheckpoint(opts.vggPath, warn);
  gather(encoderManifest(), vgg, opts.vggPath, opts.layout, tensors);
  for (const [family, paths] of [
    ['decoder', opts.decoderPaths],
    ['udecoder', opts.unpoolDecoderPaths],
  ] as const) {
    for (const level of [...paths.keys()].sort()) {
      const source = loadCheckpoint(paths.get(level)!, warn);
      gather(decoderManifest(level, family), source, paths.get(level)!, opts.layout, tensors);
    }
  }
  return tensors;
}

export function convert(opts: ConvertOptions): { buf: Buffer; summary: ConvertSummary } {
  const tensors = collectTensors(opts);
  const buf = writeNstw(tensors);
  return {
    buf,
    summary: {
      tensorCount: tensors.length,
      totalBytes: buf.length,
    },
  };
}

export interface VerifyReport {
  pass: boolean;
  /** engine names whose bytes differ between NSTW and the checkpoints */
  mismatched: string[];
  /** expected engine names absent from the NSTW file */
  missing: string[];
  /** NSTW names not produced by the manifest */
  unexpected: string[];
}

export function verify(nstwBuf: Buffer, opts: ConvertOptions): VerifyReport {
  const expected = collectTensors(opts);
  const actual = readNstw(nstwBuf);
  const mismatched: string[] = [];
  const missing: string[] = [];
  for (const t of expected) {
    const got = actual.get(t.name);
    if (!got) {
      missing.push(t.name);
      continue;
    }
    const same =
      shapesEqual(got.shape, t.shape) &&
      Buffer.from(got.data.buffer, got.data.byteOffset, got.data.byteLength).equals(
        Buffer.from(t.data.buffer, t.data.byteOffset, t.data.byteLength),
      );
    if (!same) mismatched.push(t.name);
  }
  const expectedNames = new Set(expected.map((t) => t.name));
  const unexpected = [...actual.keys()].filter((n) => !expectedNames.has(n));
  return {
    pass: mismatched.length === 0 && missing.length === 0 && unexpected.length === 0,
    mismatched,
    missing,
    unexpected,
  };
}
