/**
 * Document scoring: run the window plan over the model, one nll per target.
 *
 * The plan guarantees every position in {1..T-1} is predicted exactly once;
 * each segment consumes its own context span so truncation at window
 * boundaries behaves like real sliding-window evaluation.
 */

import type { CausalModel } from "./model.js";
import { windowPlan } from "./windows.js";

export interface ScoreResult {
  tokenCount: number;
  nlls: number[];
}

export class TokenizationTooShort extends Error {}

export function scoreText(
  model: CausalModel,
  text: string,
  window: number,
  stride: number,
): ScoreResult {
  const tokens = model.tokenize(text);
  if (tokens.length < 2) {
    throw new TokenizationTooShort(`token_count ${tokens.length} < 2`);
  }
  const nlls: number[] = [];
  for (const seg of windowPlan(tokens.length, window, stride)) {
    const span = model.scoreSpan(tokens, seg.contextStart, seg.targetStart, seg.targetEnd);
    for (const v of span) {
      if (!Number.isFinite(v) || v < 0) {
        throw new Error(`model produced an invalid nll ${v}`);
      }
      nlls.push(v);
    }
  }
  return { tokenCount: tokens.length, nlls };
}
