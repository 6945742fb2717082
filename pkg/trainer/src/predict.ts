/**
 * Inference: slice a CT volume axially, run the model per slice, threshold
 * the probabilities at 0.5 and write the stacked result as a MetaImage mask
 * that the main toolkit's combine/evaluate commands accept unchanged.
 */

import * as tf from '@tensorflow/tfjs';

import { loadModel, ModelRole } from './model_io.js';
import { readVolume, writeMask, Volume } from './mhd.js';

export const PROBABILITY_THRESHOLD = 0.5;

export async function predict(
  modelDir: string,
  ctPath: string,
  outPath: string,
  expectedRole?: ModelRole,
): Promise<Volume> {
  const { model, metadata } = await loadModel(modelDir);
  if (expectedRole && metadata.role !== expectedRole) {
    console.warn(
      `role mismatch: model was trained as "${metadata.role}", expected "${expectedRole}"`,
    );
  }

  const ct = readVolume(ctPath);
  const [nx, ny, nz] = ct.dims;
  if (ny !== metadata.height || nx !== metadata.width) {
    throw new Error(
      `volume slices are ${ny}x${nx}, model expects ${metadata.height}x${metadata.width}`,
    );
  }

  const [low, high] = metadata.hu_window;
  const sliceSize = nx * ny;
  const scaled = new Float32Array(ct.values.length);
  for (let i = 0; i < ct.values.length; i++) {
    const v = (ct.values[i] - low) / (high - low);
    scaled[i] = v < 0 ? 0 : v > 1 ? 1 : v;
  }

  const input = tf.tensor4d(scaled, [nz, ny, nx, 1]);
  const probs = model.predict(input) as tf.Tensor;
  const flat = await probs.data();
  input.dispose();
  probs.dispose();

  const bits = new Float64Array(nz * sliceSize);
  for (let i = 0; i < bits.length; i++) {
    bits[i] = flat[i] > PROBABILITY_THRESHOLD ? 1 : 0;
  }
  const mask: Volume = {
    dims: ct.dims,
    spacing: ct.spacing,
    origin: ct.origin,
    values: bits,
  };
  writeMask(mask, outPath);
  return mask;
}
