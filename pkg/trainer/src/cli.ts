/**
 * CLI: `train` fits one model role on an exported slice dataset,
 * `predict` applies a saved model to a CT volume and writes a mask.
 */

import { ModelRole } from './model_io.js';
import { predict } from './predict.js';
import { train } from './train.js';

function parseArgs(argv: string[]): Record<string, string> {
  const args: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    if (!argv[i].startsWith('--') || i + 1 >= argv.length) {
      throw new Error(`bad argument ${argv[i]}`);
    }
    args[argv[i].slice(2)] = argv[i + 1];
  }
  return args;
}

function required(args: Record<string, string>, key: string): string {
  if (!(key in args)) throw new Error(`missing --${key}`);
  return args[key];
}

const ROLES: ModelRole[] = ['lung', 'healthy_tissue', 'air'];

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  const args = parseArgs(rest);

  if (command === 'train') {
    const role = required(args, 'role') as ModelRole;
    if (!ROLES.includes(role)) throw new Error(`role must be one of ${ROLES.join(', ')}`);
    const result = await train({
      manifestPath: required(args, 'manifest'),
      modelRole: role,
      epochs: Number(args['epochs'] ?? 10),
      batchSize: Number(args['batch-size'] ?? 4),
      learningRate: Number(args['lr'] ?? 1e-3),
      rngSeed: Number(args['seed'] ?? 0),
      outDir: required(args, 'out-dir'),
      baseFilters: args['base-filters'] ? Number(args['base-filters']) : undefined,
      depth: args['depth'] ? Number(args['depth']) : undefined,
    });
    console.log(
      `trained ${role} for ${result.losses.length} epochs, ` +
        `final loss ${result.losses[result.losses.length - 1].toFixed(6)} -> ${result.outDir}`,
    );
    return 0;
  }

  if (command === 'predict') {
    await predict(
      required(args, 'model-dir'),
      required(args, 'ct'),
      required(args, 'out'),
      args['role'] as ModelRole | undefined,
    );
    console.log(`wrote mask -> ${args['out']}`);
    return 0;
  }

  console.error('usage: cli.js <train|predict> [options]');
  return 2;
}

main()
  .then((code) => process.exit(code))
  .catch((err) => {
    console.error(`error: ${err.message}`);
    process.exit(1);
  });
