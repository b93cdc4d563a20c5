/**
 * Sliding-window plan over a token sequence.
 *
 * Mirrors the scoring core's canonical definition exactly: the first window
 * predicts positions 1..min(W,T)-1 from context starting at 0, and the k-th
 * subsequent window starts its context at k*S and predicts only positions not
 * yet covered.  Target ranges are half-open, disjoint, and tile {1..T-1}.
 * A shared fixture pins byte-for-byte agreement with the core.
 */

export interface WindowSegment {
  contextStart: number;
  targetStart: number;
  targetEnd: number; // half-open
}

export function windowPlan(tokenCount: number, window: number, stride: number): WindowSegment[] {
  if (tokenCount < 2 || window < 2 || stride < 1 || stride > window) {
    throw new RangeError(
      `need T >= 2, W >= 2, 1 <= S <= W; got T=${tokenCount}, W=${window}, S=${stride}`,
    );
  }
  const segments: WindowSegment[] = [
    { contextStart: 0, targetStart: 1, targetEnd: Math.min(window, tokenCount) },
  ];
  let k = 1;
  while (segments[segments.length - 1].targetEnd < tokenCount) {
    const prevEnd = segments[segments.length - 1].targetEnd;
    segments.push({
      contextStart: k * stride,
      targetStart: prevEnd,
      targetEnd: Math.min(k * stride + window, tokenCount),
    });
    k += 1;
  }
  return segments;
}
