/**
 * Minimal safetensors reader (plus a writer used by the tests).
 *
 * File layout: u64 LE header length, JSON header mapping tensor name to
 * { dtype, shape, data_offsets: [begin, end] } relative to the byte
 * buffer that follows the header.  Only F32/F64/F16 are accepted; the
 * non-f32 dtypes are cast to f32 with a warning, since the engine's
 * weight container is f32 only.
 */

export class SafetensorsError extends Error {}

export interface SourceTensor {
  name: string;
  shape: number[];
  data: Float32Array;
  /** dtype as found in the file, before any cast */
  sourceDtype: string;
}

interface HeaderEntry {
  dtype: string;
  shape: number[];
  data_offsets: [number, number];
}

function numel(shape: number[]): number {
  return shape.reduce((a, b) => a * b, 1);
}

function f16ToF32(bits: number): number {
  const sign = (bits & 0x8000) ? -1 : 1;
  const exp = (bits >> 10) & 0x1f;
  const frac = bits & 0x3ff;
  if (exp === 0) return sign * frac * 2 ** -24;
  if (exp === 0x1f) return frac ? NaN : sign * Infinity;
  return sign * (1 + frac / 1024) * 2 ** (exp - 15);
}

export function readSafetensors(
  buf: Buffer,
  warn: (msg: string) => void = (m) => console.warn(m),
): Map<string, SourceTensor> {
  if (buf.length < 8) {
    throw new SafetensorsError('file too short for safetensors header');
  }
  const headerLen = Number(buf.readBigUInt64LE(0));
  if (8 + headerLen > buf.length) {
    throw new SafetensorsError('safetensors header overruns the file');
  }
  let header: Record<string, HeaderEntry>;
  try {
    header = JSON.parse(buf.subarray(8, 8 + headerLen).toString('utf8'));
  } catch (e) {
    throw new SafetensorsError(`unparseable safetensors header: ${e}`);
  }
  const body = buf.subarray(8 + headerLen);
  const out = new Map<string, SourceTensor>();
  for (const [name, entry] of Object.entries(header)) {
    if (name === '__metadata__') continue;
    const { dtype, shape, data_offsets: [begin, end] } = entry;
    if (end > body.length || begin > end) {
      throw new SafetensorsError(`tensor ${name}: offsets [${begin}, ${end}] out of range`);
    }
    const raw = Uint8Array.prototype.slice.call(body.subarray(begin, end));
    const n = numel(shape);
    let data: Float32Array;
    if (dtype === 'F32') {
      if (raw.byteLength !== 4 * n) {
        throw new SafetensorsError(`tensor ${name}: ${raw.byteLength} bytes for ${n} f32 values`);
      }
      data = new Float32Array(raw.buffer);
    } else if (dtype === 'F64') {
      if (raw.byteLength !== 8 * n) {
        throw new SafetensorsError(`tensor ${name}: ${raw.byteLength} bytes for ${n} f64 values`);
      }
      warn(`tensor ${name}: casting F64 to f32`);
      data = Float32Array.from(new Float64Array(raw.buffer));
    } else if (dtype === 'F16') {
      if (raw.byteLength !== 2 * n) {
        throw new SafetensorsError(`tensor ${name}: ${raw.byteLength} bytes for ${n} f16 values`);
      }
      warn(`tensor ${name}: casting F16 to f32`);
      const half = new Uint16Array(raw.buffer);
      data = new Float32Array(n);
      for (let i = 0; i < n; i++) data[i] = f16ToF32(half[i]);
    } else {
      throw new SafetensorsError(`tensor ${name}: unsupported dtype ${dtype}`);
    }
    out.set(name, { name, shape: [...shape], data, sourceDtype: dtype });
  }
  return out;
}

/** Test helper: serialize f32 (or f64) tensors into a safetensors buffer. */
export function writeSafetensors(
  tensors: { name: string; shape: number[]; data: Float32Array | Float64Array }[],
): Buffer {
  const header: Record<string, HeaderEntry> = {};
  const bodies: Buffer[] = [];
  let offset = 0;
  for (const t of tensors) {
    const bytes = Buffer.from(t.data.buffer, t.data.byteOffset, t.data.byteLength);
    header[t.name] = {
      dtype: t.data instanceof Float64Array ? 'F64' : 'F32',
      shape: t.shape,
      data_offsets: [offset, offset + bytes.length],
    };
    bodies.push(bytes);
    offset += bytes.length;
  }
  const headerJson = Buffer.from(JSON.stringify(header), 'utf8');
  const lenBuf = Buffer.alloc(8);
  lenBuf.writeBigUInt64LE(BigInt(headerJson.length), 0);
  return Buffer.concat([lenBuf, headerJson, ...bodies]);
}
