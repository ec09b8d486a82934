"""Independent brute-force solvers used as ground truth in tests.

Everything here trades speed for transparency: exhaustive candidate
enumeration with exact arithmetic, no shared code paths with the real
solvers beyond the basic geometric types.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Optional, Sequence

import numpy as np

from .core import (
    Color,
    LabeledPoint,
    LineR2,
    Orientation,
    PointR2,
    Separator,
    classify_mis,
    split_colors,
)
from .errors import CapExceeded
from .rat import R0, Rat, RatT, rat
from .sep1d import Orient1D, Point1D


@dataclass(frozen=True)
class OracleReport:
    problem: str
    value: Optional[RatT]          # max_sq / max_dist / k_min depending on problem
    witness: Optional[object]
    stats: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# 1D
# ---------------------------------------------------------------------------


def oracle_1d(pts: Sequence[Point1D], k: int) -> OracleReport:
    """Exhaustive scan over all candidate separator positions in R^1.

    Positions: every point coordinate, every midpoint of consecutive points,
    probes beyond both extremes, and both orientations' extremal midpoints
    (the MinMax separators, which need not be midpoints of consecutive
    points).  Value is the distance to the farthest misclassified point.
    """
    if not pts:
        return OracleReport("1d", R0, None, {"positions": 0})
    xs = sorted(p.x for p in pts)
    positions = list(xs)
    positions.append(xs[0] - 1)
    positions.append(xs[-1] + 1)
    for a, b in zip(xs, xs[1:]):
        positions.append((a + b) / 2)
    reds = sorted(p.x for p in pts if p.color is Color.RED)
    blues = sorted(p.x for p in pts if p.color is Color.BLUE)
    if reds and blues:
        positions.append((reds[-1] + blues[0]) / 2)   # red-left MinMax
        positions.append((blues[-1] + reds[0]) / 2)   # blue-left MinMax
    best = None
    for orient in (Orient1D.RED_LEFT, Orient1D.BLUE_LEFT):
        left, right = (reds, blues) if orient is Orient1D.RED_LEFT else (blues, reds)
        for s in positions:
            mis = _count_lt(right, s) + _count_gt(left, s)
            if mis > k:
                continue
            val = R0
            if left and left[-1] > s:
                val = max(val, left[-1] - s)
            if right and right[0] < s:
                val = max(val, s - right[0])
            key = (val, s, 0 if orient is Orient1D.RED_LEFT else 1)
            if best is None or key < best[0]:
                best = (key, (s, mis, val, orient))
    if best is None:
        return OracleReport("1d", None, None, {"positions": len(positions)})
    s, mis, val, orient = best[1]
    return OracleReport(
        "1d", val, {"separator_x": s, "mis": mis, "orientation": orient},
        {"positions": len(positions)},
    )


def _count_lt(sorted_xs: list, x) -> int:
    import bisect

    return bisect.bisect_left(sorted_xs, x)


def _count_gt(sorted_xs: list, x) -> int:
    import bisect

    return len(sorted_xs) - bisect.bisect_right(sorted_xs, x)


# ---------------------------------------------------------------------------
# LP with violations (dual plane brute force)
# ---------------------------------------------------------------------------


def _violations(p: PointR2, red: Sequence[LineR2], blue: Sequence[LineR2]) -> int:
    v = 0
    for l in red:
        if l.y_at(p.x) < p.y:
            v += 1
    for l in blue:
        if l.y_at(p.x) > p.y:
            v += 1
    return v


def _far_left_gap_counts(red: Sequence[LineR2], blue: Sequence[LineR2]) -> list[int]:
    """Violation count of every 'gap' between consecutive lines at x = -inf.

    At x -> -inf lines are ordered bottom-to-top by decreasing slope, ties by
    increasing intercept.  Gap i sits above the first i lines.
    """
    order = sorted(
        [(l, Color.RED) for l in red] + [(l, Color.BLUE) for l in blue],
        key=lambda t: (-t[0].m, t[0].c),
    )
    n = len(order)
    counts = []
    reds_below = 0
    blues_above = sum(1 for _, c in order if c is Color.BLUE)
    for i in range(n + 1):
        counts.append(reds_below + blues_above)
        if i < n:
            _, c = order[i]
            if c is Color.RED:
                reds_below += 1
            else:
                blues_above -= 1
    return counts


def _arrangement_vertices(
    red: Sequence[LineR2], blue: Sequence[LineR2]
) -> list[PointR2]:
    lines = list(red) + list(blue)
    verts = []
    seen = set()
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            a, b = lines[i], lines[j]
            if a.m == b.m:
                continue
            x = (b.c - a.c) / (a.m - b.m)
            y = a.y_at(x)
            key = (x, y)
            if key not in seen:
                seen.add(key)
                verts.append(PointR2(x, y))
    return verts


def oracle_leftmost_valid(
    red: Sequence[LineR2], blue: Sequence[LineR2], k: int
) -> OracleReport:
    """Brute-force leftmost point violating at most k constraints.

    Result value encodes the status: witness {"status": "unbounded" |
    "infeasible" | "feasible", ...}.
    """
    if not red or not blue:
        return OracleReport(
            "lp", None, {"status": "unbounded", "reason": "empty-side"}, {}
        )
    gaps = _far_left_gap_counts(red, blue)
    if min(gaps) <= k:
        return OracleReport("lp", None, {"status": "unbounded"}, {"gaps": len(gaps)})
    verts = _arrangement_vertices(red, blue)
    best = None
    for v in verts:
        m = _violations(v, red, blue)
        if m <= k:
            key = (v.x, v.y)
            if best is None or key < best[0]:
                best = (key, v, m)
    if best is None:
        return OracleReport("lp", None, {"status": "infeasible"},
                            {"vertices": len(verts)})
    _, v, m = best
    return OracleReport(
        "lp", None,
        {"status": "feasible", "point": v, "violations": m},
        {"vertices": len(verts)},
    )


def oracle_min_violations(
    red: Sequence[LineR2], blue: Sequence[LineR2]
) -> OracleReport:
    """Exact smallest violation count over all points in the dual plane.

    Evaluates every arrangement vertex, every edge midpoint sample, a sample
    point per far-left/right gap, and reports the minimum.
    """
    if not red or not blue:
        return OracleReport("minmis", 0, {"status": "unbounded",
                                          "reason": "empty-side"}, {})
    best = min(_far_left_gap_counts(red, blue))
    best = min(best, min(_far_right_gap_counts(red, blue)))
    verts = _arrangement_vertices(red, blue)
    for v in verts:
        best = min(best, _violations(v, red, blue))
    # edge midpoints between consecutive crossings along every line
    lines = [(l, Color.RED) for l in red] + [(l, Color.BLUE) for l in blue]
    for l, _ in lines:
        xs = sorted(
            (o.c - l.c) / (l.m - o.m)
            for o, _ in lines
            if o is not l and o.m != l.m
        )
        for a, b in zip(xs, xs[1:]):
            x = (a + b) / 2
            best = min(best, _violations(PointR2(x, l.y_at(x)), red, blue))
    res = oracle_leftmost_valid(red, blue, best)
    return OracleReport("minmis", best, res.witness, {"vertices": len(verts)})


def _far_right_gap_counts(red, blue) -> list[int]:
    order = sorted(
        [(l, Color.RED) for l in red] + [(l, Color.BLUE) for l in blue],
        key=lambda t: (t[0].m, t[0].c),
    )
    n = len(order)
    counts = []
    reds_below = 0
    blues_above = sum(1 for _, c in order if c is Color.BLUE)
    for i in range(n + 1):
        counts.append(reds_below + blues_above)
        if i < n:
            _, c = order[i]
            if c is Color.RED:
                reds_below += 1
            else:
                blues_above -= 1
    return counts


def oracle_minmis(pts: Sequence[LabeledPoint]) -> OracleReport:
    """k_min over both orientations for a primal bichromatic point set."""
    reds, blues = split_colors(pts)
    best = None
    for orient in (Orientation.BLUE_ABOVE, Orientation.RED_ABOVE):
        # with BLUE_ABOVE, red dual lines bound lower halfplanes
        if orient is Orientation.BLUE_ABOVE:
            r_lines = [LineR2(p.point.x, -p.point.y) for p in reds]
            b_lines = [LineR2(p.point.x, -p.point.y) for p in blues]
        else:
            r_lines = [LineR2(p.point.x, -p.point.y) for p in blues]
            b_lines = [LineR2(p.point.x, -p.point.y) for p in reds]
        if not r_lines or not b_lines:
            best = (0, orient) if best is None or best[0] > 0 else best
            continue
        rep = oracle_min_violations(r_lines, b_lines)
        if best is None or rep.value < best[0]:
            best = (rep.value, orient)
    if best is None:
        return OracleReport("minmis", 0, None, {})
    return OracleReport("minmis", best[0], {"orientation": best[1]}, {})


# ---------------------------------------------------------------------------
# k-mis MinMax (primal candidate families)
# ---------------------------------------------------------------------------


class KmmCandidateTable:
    """Precomputed evaluation of all candidate separator lines.

    Candidate families:
      a. lines through two input points;
      b. lines parallel to a same-color pair, midway (in signed vertical
         offset) between that pair's line and one other-color point;
      c. lines through one input point, parallel to a same-color pair;
      d. lines through one input point and through the midpoint of a
         red-blue pair.
    Equidistance of points from a common line is a linear condition in the
    line coefficients (the Euclidean normalizer is shared), so every family
    is rational.  Vertical candidates are skipped and counted.
    """

    def __init__(self, pts: Sequence[LabeledPoint], cap: int = 60):
        if len(pts) > cap:
            raise CapExceeded(f"{len(pts)} points exceeds oracle cap {cap}")
        self.pts = list(pts)
        self.skipped_vertical = 0
        self._build()

    def _build(self) -> None:
        pts = self.pts
        n = len(pts)
        # scale to integer coordinates
        denlcm = 1
        for lp in pts:
            for v in (lp.point.x, lp.point.y):
                d = int(rat(v).denominator)
                denlcm = denlcm * d // gcd(denlcm, d)
        PX = [int(rat(lp.point.x) * denlcm) for lp in pts]
        PY = [int(rat(lp.point.y) * denlcm) for lp in pts]
        self._scale = denlcm
        is_red = [lp.color is Color.RED for lp in pts]

        cands: set[tuple[int, int, int]] = set()

        def add(M: int, C: int, D: int) -> None:
            # line y = (M x + C) / D, D != 0 required (non-vertical)
            if D == 0:
                self.skipped_vertical += 1
                return
            if D < 0:
                M, C, D = -M, -C, -D
            g = gcd(gcd(abs(M), abs(C)), D)
            if g > 1:
                M, C, D = M // g, C // g, D // g
            cands.add((M, C, D))

        same_pairs = [
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if is_red[i] == is_red[j]
        ]
        cross_pairs = [
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if is_red[i] != is_red[j]
        ]

        # family a: through two points
        for i in range(n):
            for j in range(i + 1, n):
                dx = PX[j] - PX[i]
                dy = PY[j] - PY[i]
                add(dy, PY[i] * dx - dy * PX[i], dx)
        # families b and c: parallel to a same-color pair
        for (i, j) in same_pairs:
            dx = PX[j] - PX[i]
            dy = PY[j] - PY[i]
            if dx == 0:
                self.skipped_vertical += 1
                continue
            off_pair = PY[i] * dx - dy * PX[i]
            for q in range(n):
                off_q = PY[q] * dx - dy * PX[q]
                if is_red[q] != is_red[i]:
                    # b: halfway between the pair line and q (both sign roles
                    # coincide because the bisector is unique)
                    add(2 * dy, off_pair + off_q, 2 * dx)
                # c: through q
                if q != i and q != j:
                    add(dy, off_q, dx)
        # family d: through one point and the midpoint of a red-blue pair
        for (i, j) in cross_pairs:
            mx = PX[i] + PX[j]   # doubled midpoint
            my = PY[i] + PY[j]
            for q in range(n):
                if q == i or q == j:
                    continue
                dx = mx - 2 * PX[q]
                dy = my - 2 * PY[q]
                add(dy, PY[q] * dx - dy * PX[q], dx)

        self.cands = sorted(cands)
        self._evaluate(PX, PY, is_red)

    def _evaluate(self, PX, PY, is_red) -> None:
        cands = self.cands
        if not cands:
            self.table = []
            return
        max_coord = max((max(map(abs, PX), default=0),
                         max(map(abs, PY), default=0)))
        max_M = max(max(abs(m) for m, _, _ in cands),
                    max(d for _, _, d in cands))
        max_C = max(abs(c) for _, c, _ in cands)
        bound = max_coord * max_M * 2 + max_C
        use_numpy = bound < 3_000_000_000 and bound * bound < 2**62
        if use_numpy:
            M = np.array([c[0] for c in cands], dtype=np.int64)[:, None]
            C = np.array([c[1] for c in cands], dtype=np.int64)[:, None]
            D = np.array([c[2] for c in cands], dtype=np.int64)[:, None]
            px = np.array(PX, dtype=np.int64)[None, :]
            py = np.array(PY, dtype=np.int64)[None, :]
            red = np.array(is_red, dtype=bool)[None, :]
            S = py * D - M * px - C
            above = S > 0
            below = S < 0
            sq = S * S
            rows = []
            for wrong in (
                (above & red) | (below & ~red),   # BLUE_ABOVE
                (below & red) | (above & ~red),   # RED_ABOVE
            ):
                mis = wrong.sum(axis=1)
                msq = np.where(wrong, sq, 0).max(axis=1, initial=0)
                rows.append((mis, msq))
            self.table = []
            for idx, (m, c, d) in enumerate(cands):
                self.table.append(
                    (
                        int(rows[0][0][idx]), int(rows[0][1][idx]),
                        int(rows[1][0][idx]), int(rows[1][1][idx]),
                        m, c, d,
                    )
                )
        else:  # exact fallback for large coordinates
            self.table = []
            for (m, c, d) in cands:
                misba = misra = 0
                sqba = sqra = 0
                for x, y, r in zip(PX, PY, is_red):
                    s = y * d - m * x - c
                    if s == 0:
                        continue
                    sq = s * s
                    if (s > 0) == r:  # red above or blue below
                        misba += 1
                        sqba = max(sqba, sq)
                    else:
                        misra += 1
                        sqra = max(sqra, sq)
                self.table.append((misba, sqba, misra, sqra, m, c, d))

    def query(self, k: int) -> Optional[tuple[RatT, Separator, int]]:
        """Minimum exact max_sq over valid candidates; None when infeasible."""
        best = None  # (num, den, line, orient, mis)
        for misba, sqba, misra, sqra, m, c, d in self.table:
            w = m * m + d * d
            if misba <= k:
                if best is None or sqba * best[1] < best[0] * w:
                    best = (sqba, w, (m, c, d), Orientation.BLUE_ABOVE, misba)
            if misra <= k:
                if best is None or sqra * best[1] < best[0] * w:
                    best = (sqra, w, (m, c, d), Orientation.RED_ABOVE, misra)
        if best is None:
            return None
        num_, den_, (m, c, d), orient, mis = best
        L = self._scale
        max_sq = Rat(num_, den_) / (L * L)
        line = LineR2(Rat(m, d), Rat(c, d * L))
        return max_sq, Separator(line, orient), mis


def oracle_kmm(pts: Sequence[LabeledPoint], k: int, cap: int = 60) -> OracleReport:
    table = KmmCandidateTable(pts, cap=cap)
    res = table.query(k)
    stats = {
        "candidates": len(table.cands),
        "skipped_vertical": table.skipped_vertical,
    }
    if res is None:
        return OracleReport("kmm", None, None, stats)
    max_sq, sep, mis = res
    rep = classify_mis(sep, pts)
    assert rep.mis <= k and rep.max_sq == max_sq, "oracle self-check failed"
    return OracleReport("kmm", max_sq, {"separator": sep, "mis": mis}, stats)


def oracle_1d_table(pts: Sequence[Point1D]):
    """Shared position/value table for several k queries on one point set."""
    if not pts:
        return []
    xs = sorted(p.x for p in pts)
    positions = list(xs) + [xs[0] - 1, xs[-1] + 1]
    positions += [(a + b) / 2 for a, b in zip(xs, xs[1:])]
    reds = sorted(p.x for p in pts if p.color is Color.RED)
    blues = sorted(p.x for p in pts if p.color is Color.BLUE)
    if reds and blues:
        positions.append((reds[-1] + blues[0]) / 2)
        positions.append((blues[-1] + reds[0]) / 2)
    rows = []
    for oi, orient in enumerate((Orient1D.RED_LEFT, Orient1D.BLUE_LEFT)):
        left, right = (reds, blues) if orient is Orient1D.RED_LEFT else (blues, reds)
        for s in positions:
            mis = _count_lt(right, s) + _count_gt(left, s)
            val = R0
            if left and left[-1] > s:
                val = left[-1] - s
            if right and right[0] < s and s - right[0] > val:
                val = s - right[0]
            rows.append((mis, val, s, oi))
    return rows


def oracle_1d_multi(pts: Sequence[Point1D], ks) -> dict:
    """oracle_1d for several k values sharing one scan."""
    rows = oracle_1d_table(pts)
    out = {}
    for k in ks:
        best = None
        for mis, val, s, oi in rows:
            if mis <= k:
                key = (val, s, oi)
                if best is None or key < best:
                    best = key
        out[k] = best  # (value, separator_x, orientation rank) or None
    return out


class LpOracleTable:
    """Per-instance violation counts at every dual vertex, for many k."""

    def __init__(self, red: Sequence[LineR2], blue: Sequence[LineR2]):
        self.gap_min = min(_far_left_gap_counts(red, blue))
        self.rows = []
        for v in _arrangement_vertices(red, blue):
            self.rows.append((v.x, v.y, _violations(v, red, blue)))
        self.rows.sort()

    def leftmost_valid(self, k: int):
        """('unbounded', None) / ('feasible', (x, y, count)) / ('infeasible', None)."""
        if self.gap_min <= k:
            return "unbounded", None
        for x, y, c in self.rows:
            if c <= k:
                return "feasible", (x, y, c)
        return "infeasible", None
