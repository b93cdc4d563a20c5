/**
 * CLI entry: shufdetect-scorer [--model SPEC] [--device D] [--window W] [--stride S]
 *
 * Serves the wire protocol on stdin/stdout.  The default model is the
 * built-in deterministic byte-level LM; --device is accepted for interface
 * parity with accelerator-backed models and ignored by the builtin.
 */

import { loadModel } from "./model.js";
import { serve } from "./protocol.js";

interface CliOptions {
  model: string;
  device: string;
  window: number;
  stride: number;
}

export function parseArgs(argv: string[]): CliOptions {
  const options: CliOptions = {
    model: "builtin:bytelm-v1",
    device: "cpu",
    window: 2048,
    stride: 1024,
  };
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new Error(`${arg} needs a value`);
      return argv[i];
    };
    switch (arg) {
      case "--model":
        options.model = next();
        break;
      case "--device":
        options.device = next();
        break;
      case "--window":
        options.window = Number(next());
        break;
      case "--stride":
        options.stride = Number(next());
        break;
      default:
        throw new Error(`unknown flag ${arg}`);
    }
  }
  if (!Number.isInteger(options.window) || options.window < 2) {
    throw new Error("--window must be an integer >= 2");
  }
  if (!Number.isInteger(options.stride) || options.stride < 1 || options.stride > options.window) {
    throw new Error("--stride must satisfy 1 <= S <= W");
  }
  return options;
}

export async function main(argv: string[]): Promise<number> {
  let options: CliOptions;
  try {
    options = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  await serve(process.stdin, process.stdout, {
    window: options.window,
    stride: options.stride,
    loadModel: () => loadModel(options.model),
  });
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;

if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
