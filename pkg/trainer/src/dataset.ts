/**
 * Loader for slice datasets exported by the main toolkit:
 * a manifest.json plus raw little-endian float32 image/mask files,
 * one pair per axial slice.
 */

import * as fs from 'fs';
import * as path from 'path';

export interface ManifestEntry {
  slice_id: number;
  image_path: string;
  mask_path: string;
  height: number;
  width: number;
}

export interface Manifest {
  format_version: number;
  hu_window: [number, number];
  entries: ManifestEntry[];
}

export interface SlicePair {
  image: Float32Array;
  mask: Float32Array;
  height: number;
  width: number;
}

export function readManifest(manifestPath: string): Manifest {
  const manifest = JSON.parse(fs.readFileSync(manifestPath, 'utf-8')) as Manifest;
  if (manifest.format_version !== 1) {
    throw new Error(`unsupported manifest format_version ${manifest.format_version}`);
  }
  if (!Array.isArray(manifest.entries) || manifest.entries.length === 0) {
    throw new Error('empty dataset: manifest has no slice entries');
  }
  return manifest;
}

function readFloats(filePath: string, expected: number): Float32Array {
  const buf = fs.readFileSync(filePath);
  if (buf.length !== expected * 4) {
    throw new Error(`${filePath}: ${buf.length} bytes, expected ${expected * 4}`);
  }
  return new Float32Array(buf.buffer, buf.byteOffset, expected);
}

export function loadSlices(manifestPath: string): SlicePair[] {
  const manifest = readManifest(manifestPath);
  const dir = path.dirname(manifestPath);
  const { height, width } = manifest.entries[0];
  return manifest.entries.map((entry) => {
    if (entry.height !== height || entry.width !== width) {
      throw new Error(
        `slice ${entry.slice_id}: ${entry.height}x${entry.width} differs from ${height}x${width}`,
      );
    }
    return {
      image: readFloats(path.join(dir, entry.image_path), height * width),
      mask: readFloats(path.join(dir, entry.mask_path), height * width),
      height,
      width,
    };
  });
}
