/**
 * Compact 2D U-net: encoder-decoder with skip connections, sigmoid output.
 * All initializers are seeded so a rerun with the same seed builds the
 * same starting weights.
 */

import * as tf from '@tensorflow/tfjs';

export interface UnetOptions {
  height: number;
  width: number;
  depth?: number; // number of down/up-sampling stages
  baseFilters?: number;
  seed?: number;
}

function conv(
  x: tf.SymbolicTensor,
  filters: number,
  seed: number,
): tf.SymbolicTensor {
  return tf.layers
    .conv2d({
      filters,
      kernelSize: 3,
      padding: 'same',
      activation: 'relu',
      kernelInitializer: tf.initializers.heNormal({ seed }),
    })
    .apply(x) as tf.SymbolicTensor;
}

export function buildUnet(options: UnetOptions): tf.LayersModel {
  const depth = options.depth ?? 2;
  const baseFilters = options.baseFilters ?? 8;
  const seed = options.seed ?? 0;
  const stride = 2 ** depth;
  if (options.height % stride !== 0 || options.width % stride !== 0) {
    throw new Error(
      `input ${options.height}x${options.width} not divisible by ${stride}`,
    );
  }

  const input = tf.input({ shape: [options.height, options.width, 1] });
  let x = input;
  let s = seed;
  const skips: tf.SymbolicTensor[] = [];

  for (let level = 0; level < depth; level++) {
    const filters = baseFilters * 2 ** level;
    x = conv(x, filters, s++);
    x = conv(x, filters, s++);
    skips.push(x);
    x = tf.layers.maxPooling2d({ poolSize: 2 }).apply(x) as tf.SymbolicTensor;
  }

  const bottleneckFilters = baseFilters * 2 ** depth;
  x = conv(x, bottleneckFilters, s++);
  x = conv(x, bottleneckFilters, s++);

  for (let level = depth - 1; level >= 0; level--) {
    const filters = baseFilters * 2 ** level;
    x = tf.layers.upSampling2d({ size: [2, 2] }).apply(x) as tf.SymbolicTensor;
    x = conv(x, filters, s++);
    x = tf.layers.concatenate().apply([skips[level], x]) as tf.SymbolicTensor;
    x = conv(x, filters, s++);
    x = conv(x, filters, s++);
  }

  const output = tf.layers
    .conv2d({
      filters: 1,
      kernelSize: 1,
      activation: 'sigmoid',
      kernelInitializer: tf.initializers.glorotUniform({ seed: s }),
    })
    .apply(x) as tf.SymbolicTensor;

  return tf.model({ inputs: input, outputs: output });
}
