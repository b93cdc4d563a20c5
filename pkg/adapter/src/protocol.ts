/**
 * Newline-delimited JSON request loop over stdin/stdout.
 *
 * hello -> meta handshake, then score -> nll (or error).  One JSON object per
 * line, UTF-8, ids echoed verbatim.  Malformed input lines produce an error
 * object and the loop continues; the process never crashes on bad input.
 */

import * as readline from "node:readline";
import type { Readable, Writable } from "node:stream";
import type { CausalModel } from "./model.js";
import { scoreText, TokenizationTooShort } from "./scorer.js";

export const PROTOCOL_VERSION = 1;

export interface ServeOptions {
  window: number;
  stride: number;
  /** invoked lazily on the first message so load errors surface in-band */
  loadModel: () => CausalModel;
}

interface AnyMessage {
  op?: unknown;
  id?: unknown;
  text?: unknown;
  protocol?: unknown;
}

export async function serve(
  input: Readable,
  output: Writable,
  options: ServeOptions,
): Promise<void> {
  let model: CausalModel | null = null;
  const reply = (obj: unknown) => {
    output.write(JSON.stringify(obj) + "\n");
  };

  for await (const line of readline.createInterface({ input, terminal: false })) {
    if (!line.trim()) continue;
    let msg: AnyMessage;
    try {
      msg = JSON.parse(line) as AnyMessage;
    } catch {
      reply({ op: "error", id: null, message: "invalid JSON line" });
      continue;
    }
    const id = typeof msg.id === "number" ? msg.id : null;
    try {
      if (msg.op === "hello") {
        model ??= options.loadModel();
        reply({
          op: "meta",
          model_id: model.modelId,
          context_window: options.window,
          stride: options.stride,
        });
      } else if (msg.op === "score") {
        if (typeof msg.text !== "string") {
          reply({ op: "error", id, message: "score needs a string text field" });
          continue;
        }
        model ??= options.loadModel();
        const result = scoreText(model, msg.text, options.window, options.stride);
        reply({ op: "nll", id, token_count: result.tokenCount, nlls: result.nlls });
      } else {
        reply({ op: "error", id, message: `unknown op ${JSON.stringify(msg.op)}` });
      }
    } catch (err) {
      const message =
        err instanceof TokenizationTooShort
          ? err.message
          : `internal error: ${err instanceof Error ? err.message : String(err)}`;
      reply({ op: "error", id, message });
    }
  }
}
