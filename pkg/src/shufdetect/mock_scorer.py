"""Deterministic stdin/stdout scorer process for tests and offline demos.

Speaks the same wire protocol as a real model adapter: one JSON object per
line, ``hello`` -> ``meta`` handshake, then ``score`` -> ``nll``/``error``.
Run with ``python -m shufdetect.mock_scorer --kind constant --nll 0.693``.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import TokenizationEmpty
from .scoring import DEFAULT_STRIDE, DEFAULT_WINDOW, PROTOCOL_VERSION, _mock_trace


def serve(stdin, stdout, kind: str, value: float, window: int, stride: int,
          model_id: str | None = None) -> None:
    model_id = model_id or f"mock-{kind}"
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        req_id = None
        try:
            msg = json.loads(line)
            req_id = msg.get("id") if isinstance(msg, dict) else None
            op = msg.get("op")
            if op == "hello":
                reply = {
                    "op": "meta",
                    "model_id": model_id,
                    "context_window": window,
                    "stride": stride,
                }
            elif op == "score":
                trace = _mock_trace(kind, value, str(msg["text"]))
                reply = {
                    "op": "nll",
                    "id": req_id,
                    "token_count": trace.token_count,
                    "nlls": list(trace.nlls),
                }
            else:
                reply = {"op": "error", "id": req_id, "message": f"unknown op {op!r}"}
        except TokenizationEmpty as exc:
            reply = {"op": "error", "id": req_id, "message": str(exc)}
        except Exception as exc:  # malformed input must not kill the loop
            reply = {"op": "error", "id": req_id, "message": f"bad request: {exc}"}
        stdout.write(json.dumps(reply, ensure_ascii=False) + "\n")
        stdout.flush()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kind", choices=["constant", "position", "order"],
                        default="constant")
    parser.add_argument("--nll", type=float, default=0.6931471805599453)
    parser.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    parser.add_argument("--stride", type=int, default=DEFAULT_STRIDE)
    parser.add_argument("--model-id", default=None)
    parser.add_argument("--protocol-check", action="store_true",
                        help=f"print supported protocol version ({PROTOCOL_VERSION}) and exit")
    args = parser.parse_args(argv)
    if args.protocol_check:
        print(PROTOCOL_VERSION)
        return 0
    serve(sys.stdin, sys.stdout, args.kind, args.nll, args.window, args.stride,
          args.model_id)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
