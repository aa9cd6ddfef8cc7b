/**
 * Binary embedding files (little-endian):
 *
 *   magic   4 bytes  "BLSE"
 *   version u16      1
 *   dim     u32
 *   count   u64
 *   payload count * dim float32, row-major
 *
 * The layout must match the scoring toolkit byte for byte; files written
 * here are consumed directly by its store.
 */

export const MAGIC = "BLSE";
export const VERSION = 1;
export const HEADER_SIZE = 4 + 2 + 4 + 8;

export function writeBlse(rows: Float32Array[], dim: number): Buffer {
  if (!Number.isInteger(dim) || dim < 1) {
    throw new Error(`dim must be a positive integer, got ${dim}`);
  }
  const header = Buffer.alloc(HEADER_SIZE);
  header.write(MAGIC, 0, "ascii");
  header.writeUInt16LE(VERSION, 4);
  header.writeUInt32LE(dim, 6);
  header.writeBigUInt64LE(BigInt(rows.length), 10);

  const payload = Buffer.alloc(rows.length * dim * 4);
  rows.forEach((row, i) => {
    if (row.length !== dim) {
      throw new Error(`row ${i} has length ${row.length}, expected ${dim}`);
    }
    for (let j = 0; j < dim; j++) {
      const v = row[j];
      if (!Number.isFinite(v)) {
        throw new Error(`row ${i} contains a non-finite value at index ${j}`);
      }
      payload.writeFloatLE(v, (i * dim + j) * 4);
    }
  });
  return Buffer.concat([header, payload]);
}

export interface BlseContents {
  dim: number;
  count: number;
  rows: Float32Array[];
}

/** Parse and validate a BLSE buffer; used to verify our own exports. */
export function readBlse(data: Buffer): BlseContents {
  if (data.length < HEADER_SIZE) {
    throw new Error(`file too short for header (${data.length} bytes)`);
  }
  if (data.toString("ascii", 0, 4) !== MAGIC) {
    throw new Error(`bad magic ${JSON.stringify(data.toString("ascii", 0, 4))}`);
  }
  const version = data.readUInt16LE(4);
  if (version !== VERSION) {
    throw new Error(`unsupported version ${version}`);
  }
  const dim = data.readUInt32LE(6);
  const count = Number(data.readBigUInt64LE(10));
  const expected = HEADER_SIZE + count * dim * 4;
  if (data.length !== expected) {
    throw new Error(`expected ${expected} bytes, found ${data.length}`);
  }
  const rows: Float32Array[] = [];
  for (let i = 0; i < count; i++) {
    const row = new Float32Array(dim);
    for (let j = 0; j < dim; j++) {
      row[j] = data.readFloatLE(HEADER_SIZE + (i * dim + j) * 4);
    }
    rows.push(row);
  }
  return { dim, count, rows };
}
