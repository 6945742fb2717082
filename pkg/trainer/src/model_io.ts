/**
 * Model persistence without tfjs-node: topology and weights are captured
 * through an in-memory save handler and written to plain files, with a
 * metadata JSON recording the model role and the HU window it was trained on.
 */

import * as fs from 'fs';
import * as path from 'path';
import * as tf from '@tensorflow/tfjs';

export type ModelRole = 'lung' | 'healthy_tissue' | 'air';

export interface ModelMetadata {
  role: ModelRole;
  hu_window: [number, number];
  height: number;
  width: number;
}

export async function saveModel(
  model: tf.LayersModel,
  dir: string,
  metadata: ModelMetadata,
): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      fs.writeFileSync(
        path.join(dir, 'model.json'),
        JSON.stringify({
          modelTopology: artifacts.modelTopology,
          weightSpecs: artifacts.weightSpecs,
        }),
      );
      fs.writeFileSync(
        path.join(dir, 'weights.bin'),
        Buffer.from(artifacts.weightData as ArrayBuffer),
      );
      return { modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: 'JSON' } };
    }),
  );
  fs.writeFileSync(path.join(dir, 'metadata.json'), JSON.stringify(metadata, null, 2));
}

export async function loadModel(
  dir: string,
): Promise<{ model: tf.LayersModel; metadata: ModelMetadata }> {
  const spec = JSON.parse(fs.readFileSync(path.join(dir, 'model.json'), 'utf-8'));
  const weights = fs.readFileSync(path.join(dir, 'weights.bin'));
  const model = await tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: spec.modelTopology,
      weightSpecs: spec.weightSpecs,
      weightData: weights.buffer.slice(
        weights.byteOffset,
        weights.byteOffset + weights.byteLength,
      ),
    }),
  );
  const metadata = JSON.parse(
    fs.readFileSync(path.join(dir, 'metadata.json'), 'utf-8'),
  ) as ModelMetadata;
  return { model, metadata };
}
