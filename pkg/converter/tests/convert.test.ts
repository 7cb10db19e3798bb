import { readFileSync, writeFileSync } from 'node:fs';
import { join } from 'node:path';

import { describe, expect, it } from 'vitest';

import { convert, ConversionError, ConvertOptions, verify } from '../src/convert.js';
import { decoderManifest, encoderManifest } from '../src/manifest.js';
import { readNstw } from '../src/nstw.js';
import { writeSafetensors } from '../src/safetensors.js';
import { patternData, tempDir, writeDecoderFixture, writeVggFixture } from './helpers.js';

function opts(vggPath: string, decoders: [number, string][] = []): ConvertOptions {
  return {
    vggPath,
    decoderPaths: new Map(decoders),
    unpoolDecoderPaths: new Map(),
    layout: 'oihw',
    warn: () => {},
  };
}

describe('manifest', () => {
  it('covers the full encoder slice', () => {
    const names = encoderManifest().map((e) => e.engineName);
    expect(names).toHaveLength(13);
    expect(names[0]).toBe('conv1_1');
    expect(names.at(-1)).toBe('conv5_1');
  });

  it('mirrors decoder channels', () => {
    const d4 = decoderManifest(4, 'decoder');
    expect(d4).toHaveLength(9);
    expect(d4[0]).toMatchObject({ engineName: 'decoder4.conv1', inCh: 512, outCh: 256 });
    expect(d4.at(-1)).toMatchObject({ engineName: 'decoder4.conv9', inCh: 64, outCh: 3 });
  });

  it('refuses an unpooling decoder at level 5', () => {
    expect(() => decoderManifest(5, 'udecoder')).toThrow(/level 4/);
  });
});

describe('convert', () => {
  it('produces the expected tensor set for encoder + decoder1', () => {
    const dir = tempDir();
    const vgg = join(dir, 'vgg.safetensors');
    const dec1 = join(dir, 'dec1.safetensors');
    writeVggFixture(vgg);
    writeDecoderFixture(dec1, 1);
    const { buf, summary } = convert(opts(vgg, [[1, dec1]]));
    expect(summary.tensorCount).toBe(26 + 2);
    const store = readNstw(buf);
    expect(store.get('conv3_2.weight')!.shape).toEqual([256, 256, 3, 3]);
    expect(store.get('decoder1.conv1.weight')!.shape).toEqual([3, 64, 3, 3]);
    expect(store.get('decoder1.conv1.bias')!.shape).toEqual([3]);
  });

  it('is byte-identical across runs', () => {
    const dir = tempDir();
    const vgg = join(dir, 'vgg.safetensors');
    writeVggFixture(vgg);
    const a = convert(opts(vgg)).buf;
    const b = convert(opts(vgg)).buf;
    expect(a.equals(b)).toBe(true);
  });

  it('normalizes hwio kernels to the same bytes as oihw', () => {
    const dir = tempDir();
    const vggO = join(dir, 'vgg-oihw.safetensors');
    const vggH = join(dir, 'vgg-hwio.safetensors');
    writeVggFixture(vggO, 'oihw');
    writeVggFixture(vggH, 'hwio');
    const a = convert(opts(vggO)).buf;
    const b = convert({ ...opts(vggH), layout: 'hwio' }).buf;
    expect(a.equals(b)).toBe(true);
  });

  it('aborts on a missing tensor, naming it', () => {
    const dir = tempDir();
    const vgg = join(dir, 'vgg.safetensors');
    writeFileSync(
      vgg,
      writeSafetensors([{ name: 'features.0.weight', shape: [64, 3, 3, 3], data: patternData(64 * 27, 9) }]),
    );
    expect(() => convert(opts(vgg))).toThrow(/features\.0\.bias/);
  });

  it('aborts on a shape mismatch, reporting both shapes', () => {
    const dir = tempDir();
    const vgg = join(dir, 'vgg.safetensors');
    writeFileSync(
      vgg,
      writeSafetensors([
        { name: 'features.0.weight', shape: [64, 3, 1, 1], data: patternData(64 * 3, 10) },
        { name: 'features.0.bias', shape: [64], data: patternData(64, 11) },
      ]),
    );
    expect(() => convert(opts(vgg))).toThrow(/\[64,3,1,1\].*\[64,3,3,3\]/);
  });

  it('casts f64 sources to f32 with a warning', () => {
    const dir = tempDir();
    const dec1 = join(dir, 'dec1.safetensors');
    const wide = new Float64Array(3 * 64 * 9).fill(0.5);
    const bias = new Float64Array(3).fill(0.25);
    writeFileSync(
      dec1,
      writeSafetensors([
        { name: 'conv1.weight', shape: [3, 64, 3, 3], data: wide },
        { name: 'conv1.bias', shape: [3], data: bias },
      ]),
    );
    const vgg = join(dir, 'vgg.safetensors');
    writeVggFixture(vgg);
    const warnings: string[] = [];
    const { buf } = convert({ ...opts(vgg, [[1, dec1]]), warn: (m) => warnings.push(m) });
    expect(warnings.some((w) => w.includes('F64'))).toBe(true);
    expect(readNstw(buf).get('decoder1.conv1.weight')!.data[0]).toBe(0.5);
  });
});

describe('verify', () => {
  function freshConversion() {
    const dir = tempDir();
    const vgg = join(dir, 'vgg.safetensors');
    const dec1 = join(dir, 'dec1.safetensors');
    writeVggFixture(vgg);
    writeDecoderFixture(dec1, 1);
    const o = opts(vgg, [[1, dec1]]);
    return { dir, o, buf: convert(o).buf };
  }

  it('passes on a freshly converted file', () => {
    const { o, buf } = freshConversion();
    expect(verify(buf, o)).toMatchObject({ pass: true, mismatched: [], missing: [] });
  });

  it('fails on a flipped payload byte, naming the tensor', () => {
    const { o, buf } = freshConversion();
    const flipped = Buffer.from(buf);
    flipped[flipped.length - 1] ^= 0xff; // inside the last tensor's payload
    const report = verify(flipped, o);
    expect(report.pass).toBe(false);
    expect(report.mismatched).toEqual(['decoder1.conv1.bias']);
  });

  it('fails with a format error on an empty file', () => {
    const { o } = freshConversion();
    expect(() => verify(Buffer.alloc(0), o)).toThrow(/truncated/);
  });
});
