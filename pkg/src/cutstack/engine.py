"""Offset-word counting for shifts far beyond any materializable column.

A level of the stage-n0 column appears in the stage-M column once per word
w = (choice at n0, ..., choice at M-1) of subcolumn copies, at position
pos(w) + base, where pos(w) is the sum of the chosen embed offsets. Every
index of the stage-M column decomposes uniquely this way, so the number of
coincidences behind any correlation is a count of word pairs with a
prescribed position difference.

Those counts are computed by a top-down walk over the stages. Offsets grow so
fast that once the partial difference leaves the window reachable by the
remaining lower stages the branch is dead; in practice a handful of states
survive per stage, which is what makes shifts of size 10^30 and more exact
and cheap. Per-stage "allowed position" maps restrict a side to chosen
subcolumn copies (used for intersections with whole subcolumn unions).
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import Counter, defaultdict
from itertools import product

from .errors import LiftError

# Guard against pathological families where scale separation fails to prune.
STATE_CAP = 2_000_000
LIFT_STAGE_CAP = 5_000


def minimal_valid_stage(family, n0: int, need: int) -> int:
    """Smallest stage M >= n0 whose column contains every base index plus shift.

    ``need`` is max(base index + shift) over the operands; lifting adds the
    top embed offset of each crossed stage to all indices.
    """
    M, acc = n0, 0
    while acc + need > family.height(M) - 1:
        acc += family.offsets_between(M)[-1]
        M += 1
        if M - n0 > LIFT_STAGE_CAP:
            raise LiftError(f"no valid lift stage within {LIFT_STAGE_CAP} stages")
    return M


def _reach(family, n0: int, M: int) -> list[int]:
    """reach[i - n0] = max |pos difference| achievable by stages n0..i-1."""
    out = [0]
    for t in range(n0, M):
        out.append(out[-1] + family.offsets_between(t)[-1])
    return out


def _positions(family, t: int, constraints: dict[int, tuple[int, ...]]) -> tuple[int, ...]:
    allowed = constraints.get(t)
    if allowed is None:
        return tuple(range(family.cuts_between(t)))
    return allowed


def _windowed_diffs(offs_a: tuple[int, ...], offs_b: tuple[int, ...],
                    d_lo: int, d_hi: int) -> Counter[int]:
    """Multiset of differences b - a restricted to [d_lo, d_hi].

    Offsets are sorted, so for each a the admissible b form a contiguous
    block; this keeps huge cut counts cheap when the window only reaches a
    few alignments (the usual case at high stages).
    """
    out: Counter[int] = Counter()
    j_lo = j_hi = 0
    m = len(offs_b)
    for a in offs_a:
        while j_lo < m and offs_b[j_lo] < a + d_lo:
            j_lo += 1
        j_hi = max(j_hi, j_lo)
        while j_hi < m and offs_b[j_hi] <= a + d_hi:
            j_hi += 1
        for k in range(j_lo, j_hi):
            out[offs_b[k] - a] += 1
    return out


def pair_diff_counts(family, n0: int, M: int, lo: int, hi: int,
                     constraints_a: dict[int, tuple[int, ...]] | None = None,
                     constraints_b: dict[int, tuple[int, ...]] | None = None,
                     ) -> dict[int, int]:
    """Counts of word pairs (w_a, w_b) over stages n0..M-1 with
    pos(w_b) - pos(w_a) = delta, for every delta in [lo, hi]."""
    if lo > hi:
        return {}
    ca = constraints_a or {}
    cb = constraints_b or {}
    reach = _reach(family, n0, M)
    cur: dict[int, int] = {0: 1}
    for i in range(M - 1, n0 - 1, -1):
        offs = family.offsets_between(i)
        offs_a = tuple(offs[u] for u in _positions(family, i, ca))
        offs_b = tuple(offs[v] for v in _positions(family, i, cb))
        r = reach[i - n0]
        s_min = min(cur)
        s_max = max(cur)
        # viable step sizes: some state must stay within window +- remaining reach
        diffs = _windowed_diffs(offs_a, offs_b, lo - r - s_max, hi + r - s_min)
        nxt: dict[int, int] = defaultdict(int)
        for s, ways in cur.items():
            for d, mult in diffs.items():
                t = s + d
                if t + r < lo or t - r > hi:
                    continue
                nxt[t] += ways * mult
        cur = nxt
        if not cur:
            break
        if len(cur) > STATE_CAP:
            raise LiftError("difference-count state explosion; "
                            "window too wide for this family")
    return dict(cur)


def multi_diff_counts(family, n0: int, M: int, boxes: list[tuple[int, int]],
                      constraints: list[dict[int, tuple[int, ...]] | None],
                      ) -> dict[tuple[int, ...], int]:
    """k-operand generalization: counts of word tuples (w_0..w_{k-1}) with
    pos(w_t) - pos(w_0) = delta_t inside boxes[t-1] for t = 1..k-1."""
    k = len(constraints)
    if k < 2 or len(boxes) != k - 1:
        raise ValueError("need k >= 2 operands and k-1 boxes")
    if any(lo > hi for lo, hi in boxes):
        return {}
    cons = [c or {} for c in constraints]
    reach = _reach(family, n0, M)
    cur: dict[tuple[int, ...], int] = {(0,) * (k - 1): 1}
    for i in range(M - 1, n0 - 1, -1):
        offs = family.offsets_between(i)
        pos_sets = [_positions(family, i, c) for c in cons]
        base_offs = tuple(offs[u] for u in pos_sets[0])
        side_offs = [tuple(offs[u] for u in pos_sets[t]) for t in range(1, k)]
        r = reach[i - n0]
        mins = [min(s[t] for s in cur) for t in range(k - 1)]
        maxs = [max(s[t] for s in cur) for t in range(k - 1)]
        # per-dimension viable step windows given the surviving states
        windows = [(boxes[t][0] - r - maxs[t], boxes[t][1] + r - mins[t])
                   for t in range(k - 1)]
        diffs: Counter[tuple[int, ...]] = Counter()
        for base in base_offs:
            slices = []
            for t in range(k - 1):
                lo_t = bisect_left(side_offs[t], base + windows[t][0])
                hi_t = bisect_right(side_offs[t], base + windows[t][1])
                slices.append(side_offs[t][lo_t:hi_t])
            if any(not s for s in slices):
                continue
            for combo in product(*slices):
                diffs[tuple(o - base for o in combo)] += 1
        nxt: dict[tuple[int, ...], int] = defaultdict(int)
        for state, ways in cur.items():
            for dvec, mult in diffs.items():
                new = tuple(s + d for s, d in zip(state, dvec))
                ok = True
                for (lo, hi), t in zip(boxes, new):
                    if t + r < lo or t - r > hi:
                        ok = False
                        break
                if ok:
                    nxt[new] += ways * mult
        cur = nxt
        if not cur:
            break
        if len(cur) > STATE_CAP:
            raise LiftError("difference-count state explosion; "
                            "window too wide for this family")
    return dict(cur)
