"""Sliding-window document perplexity over a pluggable external scorer.

The scorer is a separate process speaking newline-delimited JSON on its
stdin/stdout: a ``hello``/``meta`` handshake, then one ``score`` request per
text answered by an ``nll`` response carrying exactly one non-negative scalar
per target token.  Tokenization and window execution live scorer-side; the
canonical window plan is defined here so both sides can be checked against a
single definition.

Built-in mock scorers (``mock:constant-nll=0.693``, ``mock:position``,
``mock:order``) provide deterministic traces for tests and demos with no
model runtime at all.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import shlex
import subprocess
import threading
from dataclasses import dataclass

from .errors import (
    BadGeometry,
    EmptyInput,
    EmptyTrace,
    ProtocolViolation,
    ScorerUnavailable,
    TokenizationEmpty,
)
from .features import PerplexityPair
from .shuffler import ShuffleSeed, shuffle_text

PROTOCOL_VERSION = 1
DEFAULT_WINDOW = 2048
DEFAULT_STRIDE = 1024


@dataclass(frozen=True)
class ScorerMeta:
    model_id: str
    context_window: int = DEFAULT_WINDOW
    stride: int = DEFAULT_STRIDE

    def __post_init__(self):
        if self.context_window < 2:
            raise ValueError("context_window must be >= 2")
        if not 1 <= self.stride <= self.context_window:
            raise ValueError("stride must satisfy 1 <= S <= W")


@dataclass(frozen=True)
class NllTrace:
    """Per-target-position negative log-likelihoods, in nats."""

    nlls: tuple[float, ...]
    token_count: int

    def __post_init__(self):
        if self.token_count < 1:
            raise ValueError("token_count must be positive")
        if len(self.nlls) != self.token_count - 1:
            raise ValueError("trace must hold token_count - 1 values")
        for v in self.nlls:
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"nll values must be finite and >= 0, got {v!r}")


@dataclass(frozen=True)
class WindowSegment:
    context_start: int
    target_start: int
    target_end: int  # half-open


def window_plan(token_count: int, window: int, stride: int) -> list[WindowSegment]:
    """Segments whose target ranges tile {1, ..., T-1} exactly once.

    The first window predicts positions 1..min(W,T)-1 from context starting
    at 0; each later window starts its context at k*S and predicts only the
    positions not yet covered.
    """
    if token_count < 2 or window < 2 or not 1 <= stride <= window:
        raise BadGeometry(
            f"need T >= 2, W >= 2, 1 <= S <= W; got T={token_count}, W={window}, S={stride}"
        )
    segments = [WindowSegment(0, 1, min(window, token_count))]
    k = 1
    while segments[-1].target_end < token_count:
        prev_end = segments[-1].target_end
        segments.append(
            WindowSegment(k * stride, prev_end, min(k * stride + window, token_count))
        )
        k += 1
    return segments


def perplexity(trace: NllTrace) -> float:
    """exp of the mean per-target nll; >= 1 because every nll is >= 0."""
    if not trace.nlls:
        raise EmptyTrace("no target positions (token_count < 2)")
    return math.exp(math.fsum(trace.nlls) / len(trace.nlls))


# ---------------------------------------------------------------------------
# Mock scorers (in-process)
# ---------------------------------------------------------------------------

def _mock_trace(kind: str, value: float, text: str) -> NllTrace:
    tokens = text.split()
    t = len(tokens)
    if t < 2:
        raise TokenizationEmpty(f"token_count {t} < 2")
    if kind == "constant":
        nlls = [value] * (t - 1)
    elif kind == "position":
        nlls = [math.log(1.0 + i) for i in range(1, t)]
    elif kind == "order":
        # Out-of-dictionary-order transitions are "surprising".
        nlls = [0.05 if tokens[i] >= tokens[i - 1] else 1.0 for i in range(1, t)]
    else:
        raise ValueError(f"unknown mock kind {kind!r}")
    return NllTrace(nlls=tuple(nlls), token_count=t)


class MockScorer:
    """Deterministic in-process scorer with the same surface as ScorerClient."""

    def __init__(self, kind: str = "constant", value: float = math.log(2.0),
                 window: int = DEFAULT_WINDOW, stride: int = DEFAULT_STRIDE):
        self.kind = kind
        self.value = value
        self.meta = ScorerMeta(model_id=f"mock-{kind}", context_window=window, stride=stride)
        self.requests = 0

    def score(self, text: str) -> NllTrace:
        self.requests += 1
        return _mock_trace(self.kind, self.value, text)

    def close(self):
        pass


def parse_mock_spec(spec: str) -> MockScorer | None:
    """Parse "mock:..." scorer specs; None if the spec is not a mock."""
    if not spec.startswith("mock:"):
        return None
    body = spec[len("mock:"):]
    if body.startswith("constant-nll="):
        return MockScorer("constant", float(body.split("=", 1)[1]))
    if body in ("position", "order"):
        return MockScorer(body)
    raise ValueError(f"unknown mock scorer spec {spec!r}")


# ---------------------------------------------------------------------------
# Wire-protocol client
# ---------------------------------------------------------------------------

class ScorerClient:
    """Client for one scorer process; strictly one in-flight request."""

    def __init__(self, cmd: str | list[str]):
        argv = shlex.split(cmd) if isinstance(cmd, str) else list(cmd)
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
            )
        except OSError as exc:
            raise ScorerUnavailable(f"cannot start scorer {argv!r}: {exc}") from exc
        self._lock = threading.Lock()
        self._next_id = 0
        self.meta = self._handshake()

    def _send(self, obj: dict) -> None:
        try:
            self._proc.stdin.write(json.dumps(obj, ensure_ascii=False) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ScorerUnavailable(f"scorer pipe closed: {exc}") from exc

    def _recv(self) -> dict:
        line = self._proc.stdout.readline()
        if not line:
            raise ScorerUnavailable("scorer closed its stdout")
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolViolation(f"scorer sent invalid JSON: {line!r}") from exc
        if not isinstance(obj, dict) or "op" not in obj:
            raise ProtocolViolation(f"scorer message missing op: {obj!r}")
        return obj

    def _handshake(self) -> ScorerMeta:
        self._send({"op": "hello", "protocol": PROTOCOL_VERSION})
        reply = self._recv()
        if reply.get("op") != "meta":
            raise ProtocolViolation(f"expected meta, got {reply!r}")
        try:
            return ScorerMeta(
                model_id=str(reply["model_id"]),
                context_window=int(reply["context_window"]),
                stride=int(reply["stride"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolViolation(f"bad meta message {reply!r}") from exc

    def score(self, text: str) -> NllTrace:
        with self._lock:
            req_id = self._next_id
            self._next_id += 1
            self._send({"op": "score", "id": req_id, "text": text})
            reply = self._recv()
        op = reply.get("op")
        if op == "error":
            message = str(reply.get("message", ""))
            if "token_count" in message:
                raise TokenizationEmpty(message)
            raise ProtocolViolation(f"scorer error: {message}")
        if op != "nll":
            raise ProtocolViolation(f"expected nll, got {reply!r}")
        if reply.get("id") != req_id:
            raise ProtocolViolation(
                f"response id {reply.get('id')!r} does not echo request id {req_id}"
            )
        try:
            token_count = int(reply["token_count"])
            nlls = tuple(float(v) for v in reply["nlls"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolViolation(f"bad nll message {reply!r}") from exc
        if token_count < 2:
            raise TokenizationEmpty(f"token_count {token_count} < 2")
        try:
            return NllTrace(nlls=nlls, token_count=token_count)
        except ValueError as exc:
            raise ProtocolViolation(str(exc)) from exc

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def make_scorer(spec: str) -> MockScorer | ScorerClient:
    """Build a scorer from a "mock:*" spec or a shell command line."""
    mock = parse_mock_spec(spec) if spec.startswith("mock:") else None
    return mock if mock is not None else ScorerClient(spec)


# ---------------------------------------------------------------------------
# Cache
# ---------------------------------------------------------------------------

class NllCache:
    """Append-only file of (key digest, nll array) records.

    Many readers may share the file; a single writer appends whole lines.
    """

    def __init__(self, path: str):
        self.path = path
        self._records: dict[str, NllTrace] = {}
        self._lock = threading.Lock()
        if os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    self._records[rec["key"]] = NllTrace(
                        nlls=tuple(float(v) for v in rec["nlls"]),
                        token_count=int(rec["token_count"]),
                    )

    @staticmethod
    def key_for(meta: ScorerMeta, text: str) -> str:
        text_digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        raw = f"{meta.model_id}\x00{meta.context_window}\x00{meta.stride}\x00{text_digest}"
        return hashlib.sha256(raw.encode("utf-8")).hexdigest()

    def get(self, key: str) -> NllTrace | None:
        return self._records.get(key)

    def put(self, key: str, trace: NllTrace) -> None:
        with self._lock:
            if key in self._records:
                return
            self._records[key] = trace
            line = json.dumps(
                {"key": key, "token_count": trace.token_count, "nlls": list(trace.nlls)}
            )
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def __len__(self) -> int:
        return len(self._records)


# ---------------------------------------------------------------------------
# High-level scoring
# ---------------------------------------------------------------------------

def score_document(text: str, scorer, cache: NllCache | None = None) -> float:
    """Perplexity of ``text`` under the scorer, via the cache when possible."""
    if not text or not text.strip():
        raise EmptyInput("cannot score blank text")
    key = NllCache.key_for(scorer.meta, text) if cache is not None else None
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return perplexity(hit)
    trace = scorer.score(text)
    if cache is not None:
        cache.put(key, trace)
    return perplexity(trace)


def score_pair(text: str, seed: ShuffleSeed | int, scorer,
               cache: NllCache | None = None) -> PerplexityPair:
    """Score the text and its shuffled counterpart."""
    ppl = score_document(text, scorer, cache)
    ppl_shuf = score_document(shuffle_text(text, seed), scorer, cache)
    return PerplexityPair(ppl=ppl, ppl_shuf=ppl_shuf)
