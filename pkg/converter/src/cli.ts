#!/usr/bin/env node
/**
 * NSTW weight converter.
 *
 * Usage:
 *   nstw-convert convert --vgg vgg.safetensors \
 *       --decoders 1=d1.safetensors 2=d2.safetensors ... \
 *       [--unpool-decoders 1=u1.safetensors ...] \
 *       [--layout oihw|hwio] --out weights.nstw
 *   nstw-convert verify --nstw weights.nstw --vgg vgg.safetensors \
 *       --decoders 1=d1.safetensors ... [--unpool-decoders ...] [--layout ...]
 */

import { readFileSync, writeFileSync } from 'node:fs';

import { convert, ConvertOptions, ConversionError, KernelLayout, verify } from './convert.js';
import { NstwFormatError } from './nstw.js';
import { SafetensorsError } from './safetensors.js';

interface Args {
  command?: string;
  vgg?: string;
  out?: string;
  nstw?: string;
  layout: KernelLayout;
  decoders: Map<number, string>;
  unpoolDecoders: Map<number, string>;
}

function usage(): never {
  console.error(
    'usage: nstw-convert convert --vgg PATH --decoders L=PATH... ' +
      '[--unpool-decoders L=PATH...] [--layout oihw|hwio] --out OUT.nstw\n' +
      '       nstw-convert verify --nstw PATH --vgg PATH --decoders L=PATH... ' +
      '[--unpool-decoders L=PATH...] [--layout oihw|hwio]',
  );
  process.exit(64);
}

function parseLevelPaths(argv: string[], i: number, into: Map<number, string>): number {
  while (i < argv.length && !argv[i].startsWith('--')) {
    const m = argv[i].match(/^([1-5])=(.+)$/);
    if (!m) {
      console.error(`expected LEVEL=PATH, got ${argv[i]}`);
      usage();
    }
    into.set(Number(m[1]), m[2]);
    i++;
  }
  return i;
}

function parseArgs(argv: string[]): Args {
  const args: Args = { layout: 'oihw', decoders: new Map(), unpoolDecoders: new Map() };
  if (argv.length === 0) usage();
  args.command = argv[0];
  let i = 1;
  while (i < argv.length) {
    switch (argv[i]) {
      case '--vgg':
        args.vgg = argv[++i];
        i++;
        break;
      case '--out':
        args.out = argv[++i];
        i++;
        break;
      case '--nstw':
        args.nstw = argv[++i];
        i++;
        break;
      case '--layout': {
        const v = argv[++i];
        if (v !== 'oihw' && v !== 'hwio') usage();
        args.layout = v;
        i++;
        break;
      }
      case '--decoders':
        i = parseLevelPaths(argv, i + 1, args.decoders);
        break;
      case '--unpool-decoders':
        i = parseLevelPaths(argv, i + 1, args.unpoolDecoders);
        break;
      default:
        console.error(`unknown argument ${argv[i]}`);
        usage();
    }
  }
  return args;
}

function toOptions(args: Args): ConvertOptions {
  if (!args.vgg) usage();
  return {
    vggPath: args.vgg,
    decoderPaths: args.decoders,
    unpoolDecoderPaths: args.unpoolDecoders,
    layout: args.layout,
  };
}

export function main(argv: string[]): number {
  const args = parseArgs(argv);
  try {
    if (args.command === 'convert') {
      if (!args.out) usage();
      const { buf, summary } = convert(toOptions(args));
      writeFileSync(args.out, buf);
      console.log(
        `wrote ${summary.tensorCount} tensors (${(summary.totalBytes / 1e6).toFixed(1)} MB) to ${args.out}`,
      );
      return 0;
    }
    if (args.command === 'verify') {
      if (!args.nstw) usage();
      const report = verify(readFileSync(args.nstw), toOptions(args));
      if (report.pass) {
        console.log(`verify: PASS (${args.nstw} matches the checkpoints bit-exactly)`);
        return 0;
      }
      for (const n of report.mismatched) console.error(`verify: MISMATCH ${n}`);
      for (const n of report.missing) console.error(`verify: MISSING ${n}`);
      for (const n of report.unexpected) console.error(`verify: UNEXPECTED ${n}`);
      return 1;
    }
    usage();
  } catch (e) {
    if (e instanceof ConversionError || e instanceof SafetensorsError || e instanceof NstwFormatError) {
      console.error(`error: ${e.message}`);
      return 1;
    }
    if (e && typeof e === 'object' && (e as NodeJS.ErrnoException).code === 'ENOENT') {
      console.error(`error: ${(e as Error).message}`);
      return 1;
    }
    throw e;
  }
}

process.exitCode = main(process.argv.slice(2));
