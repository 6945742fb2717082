/**
 * Minimal MetaImage (.mhd + .raw) reader/writer.
 *
 * Covers the uncompressed subset the main toolkit emits: 3D volumes,
 * MET_SHORT / MET_UCHAR / MET_FLOAT, little-endian unless the header says
 * otherwise, sidecar raw file or inline LOCAL data.
 */

import * as fs from 'fs';
import * as path from 'path';

export interface Volume {
  dims: [number, number, number]; // (nx, ny, nz)
  spacing: [number, number, number];
  origin: [number, number, number];
  values: Float64Array; // x-fastest flat order
}

const ELEMENT_BYTES: Record<string, number> = {
  MET_SHORT: 2,
  MET_UCHAR: 1,
  MET_FLOAT: 4,
};

function parseTriple(text: string): [number, number, number] {
  const parts = text.trim().split(/\s+/).map(Number);
  if (parts.length !== 3 || parts.some(Number.isNaN)) {
    throw new Error(`expected three numbers, got "${text}"`);
  }
  return [parts[0], parts[1], parts[2]];
}

export function readVolume(mhdPath: string): Volume {
  const buf = fs.readFileSync(mhdPath);
  const header: Record<string, string> = {};
  let offset = 0;
  let dataStart = -1;
  while (offset < buf.length) {
    const nl = buf.indexOf(0x0a, offset);
    const end = nl === -1 ? buf.length : nl;
    const line = buf.subarray(offset, end).toString('ascii').trim();
    offset = end + 1;
    if (!line) continue;
    const eq = line.indexOf('=');
    if (eq === -1) throw new Error(`malformed header line: "${line}"`);
    const key = line.slice(0, eq).trim();
    header[key] = line.slice(eq + 1).trim();
    if (key === 'ElementDataFile') {
      dataStart = offset;
      break;
    }
  }

  if (header['CompressedData']?.toLowerCase() === 'true') {
    throw new Error('CompressedData is not supported');
  }
  for (const key of ['DimSize', 'ElementType', 'ElementDataFile']) {
    if (!(key in header)) throw new Error(`missing MetaImage key ${key}`);
  }

  const dims = parseTriple(header['DimSize']);
  const spacing = parseTriple(header['ElementSpacing'] ?? '1 1 1');
  const origin = parseTriple(header['Offset'] ?? '0 0 0');
  const elemType = header['ElementType'];
  if (!(elemType in ELEMENT_BYTES)) {
    throw new Error(`unsupported ElementType ${elemType}`);
  }
  const msb =
    (header['BinaryDataByteOrderMSB'] ?? header['ElementByteOrderMSB'] ?? 'false')
      .toLowerCase() === 'true';

  let raw: Buffer;
  if (header['ElementDataFile'].toUpperCase() === 'LOCAL') {
    raw = buf.subarray(dataStart);
  } else {
    raw = fs.readFileSync(path.join(path.dirname(mhdPath), header['ElementDataFile']));
  }
  const n = dims[0] * dims[1] * dims[2];
  const expected = n * ELEMENT_BYTES[elemType];
  if (raw.length < expected) {
    throw new Error(`raw data has ${raw.length} bytes, expected ${expected}`);
  }

  const values = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    if (elemType === 'MET_UCHAR') {
      values[i] = raw.readUInt8(i);
    } else if (elemType === 'MET_SHORT') {
      values[i] = msb ? raw.readInt16BE(i * 2) : raw.readInt16LE(i * 2);
    } else {
      values[i] = msb ? raw.readFloatBE(i * 4) : raw.readFloatLE(i * 4);
    }
  }
  return { dims, spacing, origin, values };
}

/** Write a binary mask volume as MET_UCHAR, readable by the main toolkit. */
export function writeMask(vol: Volume, mhdPath: string): void {
  const rawName = path.basename(mhdPath).replace(/\.mhd$/, '') + '.raw';
  const header = [
    'ObjectType = Image',
    'NDims = 3',
    'BinaryData = True',
    'BinaryDataByteOrderMSB = False',
    'CompressedData = False',
    `DimSize = ${vol.dims.join(' ')}`,
    `ElementSpacing = ${vol.spacing.join(' ')}`,
    `Offset = ${vol.origin.join(' ')}`,
    'ElementType = MET_UCHAR',
    `ElementDataFile = ${rawName}`,
    '',
  ].join('\n');
  const payload = Buffer.alloc(vol.values.length);
  for (let i = 0; i < vol.values.length; i++) {
    payload[i] = vol.values[i] > 0.5 ? 1 : 0;
  }
  fs.writeFileSync(mhdPath, header);
  fs.writeFileSync(path.join(path.dirname(mhdPath), rawName), payload);
}
