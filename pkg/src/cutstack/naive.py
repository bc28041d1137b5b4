"""Independent brute-force tower simulator.

Builds a cutting-and-stacking tower by literally laying the subcolumn copies
and spacer levels out in a Python list, one level per entry, and answers
measure questions by materializing index sets and shifting them. Deliberately
shares no arithmetic with the production column/correlation code: this module
is the reference oracle the fast implementation is tested against. Only
usable while column heights stay in the tens of thousands.
"""

from __future__ import annotations

from fractions import Fraction

SPACER = -1


class NaiveTower:
    """Explicit label arrays for every stage of a tower.

    ``levels[m][k]`` is the index of the stage-(m-1) level that level ``k``
    of the stage-``m`` column came from, or SPACER for a level added at
    stage ``m``. Stage numbering starts at ``first_stage`` with a single
    unit-width level.
    """

    def __init__(self, first_stage: int, cut_counts: list[int], layers: list[list[int]]):
        self.first_stage = first_stage
        self.cut_counts = cut_counts  # cut_counts[i] cuts stage first+i into subcolumns
        self.layers = layers  # layers[i] maps stage first+i+1 levels to stage first+i levels
        self.heights = [1] + [len(arr) for arr in layers]

    @classmethod
    def four_cut(cls, spacers: list[tuple[int, int, int, int]]) -> "NaiveTower":
        """Four equal-width subcolumns per stage; spacers[n] = (a, b, c, d) on top of each."""
        layers = []
        height = 1
        for a, b, c, d in spacers:
            arr: list[int] = []
            for extra in (a, b, c, d):
                arr.extend(range(height))
                arr.extend([SPACER] * extra)
            layers.append(arr)
            height = len(arr)
        return cls(0, [4] * len(spacers), layers)

    @classmethod
    def vector_spacers(cls, L: int, r_list: list[int], vectors: list[tuple[int, ...]]) -> "NaiveTower":
        """Stage n is cut into r_list[n-1] subcolumns (n starts at 1).

        With v = vectors[n-1] = (u_1..u_L): the first r-L-1 subcolumns get
        (2L+1)h + sigma spacers, the next L get h + u_d, the last gets none,
        and a block of g spacers (g = stack height) goes on top.
        """
        layers = []
        height = 1
        for r, v in zip(r_list, vectors):
            if r <= L:
                raise ValueError(f"need more than {L} subcolumns, got {r}")
            if len(v) != L:
                raise ValueError("vector arity mismatch")
            sigma = sum(v)
            arr: list[int] = []
            for i in range(1, r + 1):
                arr.extend(range(height))
                if i <= r - L - 1:
                    arr.extend([SPACER] * ((2 * L + 1) * height + sigma))
                elif i < r:
                    d = i - (r - L - 1)
                    arr.extend([SPACER] * (height + v[d - 1]))
            g = len(arr)
            arr.extend([SPACER] * g)
            layers.append(arr)
            height = len(arr)
        return cls(1, r_list, layers)

    # -- index-set plumbing ------------------------------------------------

    def stage_index(self, stage: int) -> int:
        i = stage - self.first_stage
        if not 0 <= i < len(self.heights):
            raise ValueError(f"stage {stage} not built")
        return i

    def height(self, stage: int) -> int:
        return self.heights[self.stage_index(stage)]

    def level_width(self, stage: int) -> Fraction:
        w = Fraction(1)
        for r in self.cut_counts[: self.stage_index(stage)]:
            w /= r
        return w

    def lift_indices(self, stage: int, indices: set[int], to_stage: int) -> set[int]:
        """Positions inside the stage ``to_stage`` column occupied by the given levels."""
        cur = set(indices)
        for i in range(self.stage_index(stage), self.stage_index(to_stage)):
            arr = self.layers[i]
            cur = {k for k, src in enumerate(arr) if src in cur}
        return cur

    def copies_of_previous(self, stage: int) -> list[int]:
        """Base positions of the copies of the stage-1 column inside ``stage``."""
        arr = self.layers[self.stage_index(stage) - 1]
        return [k for k, src in enumerate(arr) if src == 0]

    def marker_height(self, stage: int) -> int:
        """One past the top of the last copy of the previous column."""
        arr = self.layers[self.stage_index(stage) - 1]
        return max(k for k, src in enumerate(arr) if src != SPACER) + 1

    # -- oracle measurements -----------------------------------------------

    def valid_shift_stage(self, stage: int, indices: set[int], j: int) -> int:
        """Smallest built stage where shifting by j keeps all indices in range."""
        for m in range(stage, self.first_stage + len(self.heights)):
            lifted = self.lift_indices(stage, indices, m)
            if min(lifted) + j >= 0 and max(lifted) + j <= self.height(m) - 1:
                return m
        raise ValueError(f"shift {j} not valid at any built stage")

    def correlation(self, a_stage: int, a_idx: set[int], b_stage: int, b_idx: set[int], j: int) -> Fraction:
        if j < 0:
            return self.correlation(b_stage, b_idx, a_stage, a_idx, -j)
        base = max(a_stage, b_stage)
        a = self.lift_indices(a_stage, a_idx, base)
        b = self.lift_indices(b_stage, b_idx, base)
        m = self.valid_shift_stage(base, a, j)
        la = self.lift_indices(base, a, m)
        lb = self.lift_indices(base, b, m)
        hits = len({x + j for x in la} & lb)
        return hits * self.level_width(m)

    def triple_correlation(self, stage: int, idx: set[int], p: int, q: int, i: int) -> Fraction:
        m = self.valid_shift_stage(stage, idx, max(p, q) * abs(i))
        s = self.lift_indices(stage, idx, m)
        hit = {x + p * i for x in s} & {x + q * i for x in s} & s
        return len(hit) * self.level_width(m)

    def lambda_set(self, stage: int, idx: set[int], p: int, q: int, horizon: int,
                   target1: tuple[int, set[int]] | None = None,
                   target2: tuple[int, set[int]] | None = None) -> set[int]:
        """Brute-force {0 < i <= horizon : T^{pi}A meets B1 and T^{qi}A meets B2}."""
        t1_stage, t1_idx = target1 if target1 else (stage, idx)
        t2_stage, t2_idx = target2 if target2 else (stage, idx)
        out = set()
        for i in range(1, horizon + 1):
            if self.correlation(stage, idx, t1_stage, t1_idx, p * i) > 0 and \
               self.correlation(stage, idx, t2_stage, t2_idx, q * i) > 0:
                out.add(i)
        return out
