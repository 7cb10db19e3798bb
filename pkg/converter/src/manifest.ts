/**
 * Mapping between source checkpoint tensor names and the engine's
 * canonical names, with the expected shape for every tensor.
 *
 * Encoder sources use torchvision-style sequential indices
 * (features.{i}.weight / .bias); decoder sources are flat sequential
 * checkpoints keyed conv{k}.weight / conv{k}.bias in forward order.
 * All kernels are 3x3 and stored (out, in, kH, kW).
 */

export interface ConvEntry {
  /** canonical engine name, e.g. conv3_1 or decoder4.conv2 */
  engineName: string;
  /** tensor key in the source checkpoint, without .weight/.bias */
  sourceName: string;
  inCh: number;
  outCh: number;
}

/** VGG-19 slice through conv5_1: [name, torchvision index, in, out]. */
const ENCODER_TABLE: [string, number, number, number][] = [
  ['conv1_1', 0, 3, 64],
  ['conv1_2', 2, 64, 64],
  ['conv2_1', 5, 64, 128],
  ['conv2_2', 7, 128, 128],
  ['conv3_1', 10, 128, 256],
  ['conv3_2', 12, 256, 256],
  ['conv3_3', 14, 256, 256],
  ['conv3_4', 16, 256, 256],
  ['conv4_1', 19, 256, 512],
  ['conv4_2', 21, 512, 512],
  ['conv4_3', 23, 512, 512],
  ['conv4_4', 25, 512, 512],
  ['conv5_1', 28, 512, 512],
];

/** Conv count of the encoder slice ending at relu{level}_1. */
const SLICE_LEN: Record<number, number> = { 1: 1, 2: 3, 3: 5, 4: 9, 5: 13 };

export function encoderManifest(): ConvEntry[] {
  return ENCODER_TABLE.map(([name, idx, inCh, outCh]) => ({
    engineName: name,
    sourceName: `features.${idx}`,
    inCh,
    outCh,
  }));
}

/**
 * Decoder manifest for one level: the encoder slice mirrored, channel
 * counts transposed, numbered conv1..convN from the deep end.
 */
export function decoderManifest(level: number, family: 'decoder' | 'udecoder'): ConvEntry[] {
  if (!(level in SLICE_LEN)) {
    throw new Error(`decoder level must be 1..5, got ${level}`);
  }
  if (family === 'udecoder' && level === 5) {
    throw new Error('the unpooling decoder family stops at level 4');
  }
  const slice = ENCODER_TABLE.slice(0, SLICE_LEN[level]);
  return slice
    .slice()
    .reverse()
    .map(([, , inCh, outCh], i) => ({
      engineName: `${family}${level}.conv${i + 1}`,
      sourceName: `conv${i + 1}`,
      inCh: outCh,
      outCh: inCh,
    }));
}

export function expectedWeightShape(e: ConvEntry): number[] {
  return [e.outCh, e.inCh, 3, 3];
}

export function expectedBiasShape(e: ConvEntry): number[] {
  return [e.outCh];
}
