/**
 * Training entry point: fits the U-net on image/mask slice pairs from an
 * exported dataset and writes the model artifact plus an epoch/loss CSV.
 */

import * as fs from 'fs';
import * as path from 'path';
import * as tf from '@tensorflow/tfjs';

import { loadSlices, readManifest } from './dataset.js';
import { ModelRole, saveModel } from './model_io.js';
import { buildUnet } from './unet.js';

export interface TrainRunSpec {
  manifestPath: string;
  modelRole: ModelRole;
  epochs: number;
  batchSize: number;
  learningRate: number;
  rngSeed: number;
  outDir: string;
  baseFilters?: number;
  depth?: number;
}

export interface TrainResult {
  losses: number[];
  outDir: string;
}

export async function train(spec: TrainRunSpec): Promise<TrainResult> {
  const manifest = readManifest(spec.manifestPath);
  const slices = loadSlices(spec.manifestPath);
  const { height, width } = slices[0];

  const images = tf.tensor4d(
    Float32Array.from(slices.flatMap((s) => Array.from(s.image))),
    [slices.length, height, width, 1],
  );
  const masks = tf.tensor4d(
    Float32Array.from(slices.flatMap((s) => Array.from(s.mask))),
    [slices.length, height, width, 1],
  );

  const model = buildUnet({
    height,
    width,
    depth: spec.depth,
    baseFilters: spec.baseFilters,
    seed: spec.rngSeed,
  });
  model.compile({
    optimizer: tf.train.adam(spec.learningRate),
    loss: 'binaryCrossentropy',
  });

  const losses: number[] = [];
  const history = await model.fit(images, masks, {
    epochs: spec.epochs,
    batchSize: spec.batchSize,
    shuffle: false, // keep runs reproducible for a given seed
    verbose: 0,
  });
  for (const loss of history.history['loss'] as number[]) {
    if (!Number.isFinite(loss)) throw new Error(`non-finite loss ${loss}`);
    losses.push(loss);
  }

  await saveModel(model, spec.outDir, {
    role: spec.modelRole,
    hu_window: manifest.hu_window,
    height,
    width,
  });
  const log = ['epoch,loss', ...losses.map((l, i) => `${i + 1},${l}`)].join('\n') + '\n';
  fs.writeFileSync(path.join(spec.outDir, 'train_log.csv'), log);

  images.dispose();
  masks.dispose();
  return { losses, outDir: spec.outDir };
}
