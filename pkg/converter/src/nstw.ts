/**
 * NSTW named-tensor container: reader and writer.
 *
 * Layout (little-endian, no padding):
 *   magic "NSTW" | version u32 = 1 | count u32
 *   per tensor: nameLen u16, name utf8, dtype u8 (0 = f32), ndim u8,
 *               dims u32 each, raw row-major f32 payload
 */

export const NSTW_MAGIC = 'NSTW';
export const NSTW_VERSION = 1;
export const DTYPE_F32 = 0;

export interface NamedTensor {
  name: string;
  shape: number[];
  data: Float32Array;
}

export class NstwFormatError extends Error {}

function numel(shape: number[]): number {
  return shape.reduce((a, b) => a * b, 1);
}

export function writeNstw(tensors: NamedTensor[]): Buffer {
  const chunks: Buffer[] = [];
  const head = Buffer.alloc(12);
  head.write(NSTW_MAGIC, 0, 'ascii');
  head.writeUInt32LE(NSTW_VERSION, 4);
  head.writeUInt32LE(tensors.length, 8);
  chunks.push(head);
  for (const t of tensors) {
    if (t.data.length !== numel(t.shape)) {
      throw new NstwFormatError(
        `tensor ${t.name}: ${t.data.length} values but shape [${t.shape}]`,
      );
    }
    const nameBytes = Buffer.from(t.name, 'utf8');
    const meta = Buffer.alloc(2 + nameBytes.length + 2 + 4 * t.shape.length);
    let off = meta.writeUInt16LE(nameBytes.length, 0);
    off += nameBytes.copy(meta, off);
    off = meta.writeUInt8(DTYPE_F32, off);
    off = meta.writeUInt8(t.shape.length, off);
    for (const d of t.shape) {
      off = meta.writeUInt32LE(d, off);
    }
    chunks.push(meta);
    // Float32Array is little-endian on every platform node supports
    chunks.push(Buffer.from(t.data.buffer, t.data.byteOffset, t.data.byteLength));
  }
  return Buffer.concat(chunks);
}

class Cursor {
  constructor(private buf: Buffer, public pos = 0) {}

  take(n: number, what: string): Buffer {
    if (this.pos + n > this.buf.length) {
      throw new NstwFormatError(`truncated weight file while reading ${what}`);
    }
    const out = this.buf.subarray(this.pos, this.pos + n);
    this.pos += n;
    return out;
  }

  atEnd(): boolean {
    return this.pos === this.buf.length;
  }
}

export function readNstw(buf: Buffer): Map<string, NamedTensor> {
  const cur = new Cursor(buf);
  const magic = cur.take(4, 'magic').toString('ascii');
  if (magic !== NSTW_MAGIC) {
    throw new NstwFormatError(`bad magic ${JSON.stringify(magic)}, expected "NSTW"`);
  }
  const version = cur.take(4, 'version').readUInt32LE(0);
  if (version !== NSTW_VERSION) {
    throw new NstwFormatError(`unsupported NSTW version ${version}`);
  }
  const count = cur.take(4, 'tensor count').readUInt32LE(0);
  const out = new Map<string, NamedTensor>();
  for (let i = 0; i < count; i++) {
    const nameLen = cur.take(2, 'name length').readUInt16LE(0);
    const name = cur.take(nameLen, 'tensor name').toString('utf8');
    const dtype = cur.take(1, 'dtype').readUInt8(0);
    if (dtype !== DTYPE_F32) {
      throw new NstwFormatError(
        `tensor ${name}: dtype code ${dtype}, only f32 (0) is supported`,
      );
    }
    const ndim = cur.take(1, 'ndim').readUInt8(0);
    const shape: number[] = [];
    for (let d = 0; d < ndim; d++) {
      shape.push(cur.take(4, `dims of ${name}`).readUInt32LE(0));
    }
    const payload = cur.take(4 * numel(shape), `payload of ${name}`);
    if (out.has(name)) {
      throw new NstwFormatError(`duplicate tensor name ${name}`);
    }
    // copy so the tensor owns aligned memory independent of the file buffer
    const data = new Float32Array(numel(shape));
    data.set(new Float32Array(Uint8Array.prototype.slice.call(payload).buffer));
    out.set(name, { name, shape, data });
  }
  if (!cur.atEnd()) {
    throw new NstwFormatError('trailing bytes after last tensor');
  }
  return out;
}
