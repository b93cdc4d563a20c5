/**
 * Causal language models the adapter can serve.
 *
 * The built-in reference model is a byte-level causal LM with fixed, seeded
 * parameters: tokens are UTF-8 bytes, the state is a rolling hash of the
 * previous four bytes, and each state row holds softmax logits drawn once
 * from a deterministic PRNG.  It is untrained but it is a genuine
 * autoregressive distribution (positive probabilities summing to one), fully
 * reproducible across runs and platforms, which is what the conformance and
 * golden-trace tests need.  Real model backends can implement the same
 * interface and plug in via --model.
 */

export interface CausalModel {
  readonly modelId: string;
  /** Text to token ids; the model owns its tokenizer. */
  tokenize(text: string): number[];
  /**
   * Negative log-probabilities (nats) of tokens[start..end) given the
   * preceding tokens[contextStart..start).
   */
  scoreSpan(tokens: number[], contextStart: number, start: number, end: number): number[];
}

const STATE_ROWS = 4096;
const VOCAB = 256;
const CONTEXT_BYTES = 4;

/** xorshift64* PRNG: deterministic float stream for parameter generation. */
function* xorshift(seed: bigint): Generator<number> {
  let x = seed | 1n;
  const mask = (1n << 64n) - 1n;
  while (true) {
    x = (x ^ (x << 13n)) & mask;
    x = (x ^ (x >> 7n)) & mask;
    x = (x ^ (x << 17n)) & mask;
    yield Number((x * 0x2545f4914f6cdd1dn & mask) >> 11n) / 2 ** 53;
  }
}

export class BuiltinByteModel implements CausalModel {
  readonly modelId: string;
  private readonly logProbs: Float64Array; // STATE_ROWS x VOCAB, normalized

  constructor(seed = 1n, temperature = 2.0) {
    this.modelId = `builtin-bytelm-v1-seed${seed}`;
    const rng = xorshift(seed);
    this.logProbs = new Float64Array(STATE_ROWS * VOCAB);
    const row = new Float64Array(VOCAB);
    for (let r = 0; r < STATE_ROWS; r++) {
      let max = -Infinity;
      for (let v = 0; v < VOCAB; v++) {
        // Box-Muller pair from two uniforms; only the cosine branch is used
        const u1 = rng.next().value as number;
        const u2 = rng.next().value as number;
        const g = Math.sqrt(-2 * Math.log(1 - u1)) * Math.cos(2 * Math.PI * u2);
        row[v] = g * temperature;
        if (row[v] > max) max = row[v];
      }
      let total = 0;
      for (let v = 0; v < VOCAB; v++) total += Math.exp(row[v] - max);
      const logZ = max + Math.log(total);
      for (let v = 0; v < VOCAB; v++) this.logProbs[r * VOCAB + v] = row[v] - logZ;
    }
  }

  tokenize(text: string): number[] {
    return Array.from(Buffer.from(text, "utf-8"));
  }

  private stateRow(tokens: number[], position: number, contextStart: number): number {
    // rolling hash over up to CONTEXT_BYTES previous bytes, FNV-1a style
    let h = 0x811c9dc5 >>> 0;
    const lo = Math.max(contextStart, position - CONTEXT_BYTES);
    for (let i = lo; i < position; i++) {
      h = (h ^ tokens[i]) >>> 0;
      h = Math.imul(h, 0x01000193) >>> 0;
    }
    return h % STATE_ROWS;
  }

  scoreSpan(tokens: number[], contextStart: number, start: number, end: number): number[] {
    const out: number[] = [];
    for (let i = start; i < end; i++) {
      const row = this.stateRow(tokens, i, contextStart);
      out.push(-this.logProbs[row * VOCAB + tokens[i]]);
    }
    return out;
  }
}

export function loadModel(spec: string): CausalModel {
  if (spec === "builtin" || spec === "builtin:bytelm-v1") {
    return new BuiltinByteModel();
  }
  const seeded = /^builtin:bytelm-v1:seed=(\d+)$/.exec(spec);
  if (seeded) {
    return new BuiltinByteModel(BigInt(seeded[1]));
  }
  throw new Error(
    `unknown model ${JSON.stringify(spec)}; available: builtin:bytelm-v1[:seed=N]`,
  );
}
