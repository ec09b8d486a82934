"""Linear programming with at most k violations, static and semi-online.

Constraints are non-vertical lines: red lines bound lower halfplanes (a
point strictly above a red line violates it), blue lines bound upper
halfplanes (violated strictly below).  The objective is fixed to the
leftmost valid point; ties resolve to the smaller y.

The static path follows the chains-and-ply algorithm: the leftmost valid
point is a red-blue intersection of the concave/convex chain covers of the
two <=k-levels, and validity is decided by chromatic ply counts (exact
whenever the answer is <= k).  Unboundedness to the left is decided
symbolically from the line order at x -> -infinity.

The dynamic path layers the lines with the logarithmic method keyed to the
promised deletion times, keeps recent lines as trivial chains in a leftover
list, maintains the set I of bichromatic chain intersections with exact
violation counts, and answers queries from a buffered partition-tree forest
over I.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .chains import Chain, ChainKind, ChainPiece, ChainSet, DLine, Direction, \
    chain_decomposition, chain_pair_intersections
from .core import Color, PointR2
from .errors import EmptyInput, ScheduleViolation, UnknownId
from .parttree import PartitionForest, PTPoint, median_partitioner
from .rat import Rat, RatT


@dataclass(frozen=True)
class ConstraintSet:
    red: list[DLine]    # lower-halfplane boundaries
    blue: list[DLine]   # upper-halfplane boundaries


class LPStatus(enum.Enum):
    FEASIBLE = "feasible"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    point: Optional[PointR2] = None
    violations: Optional[int] = None
    reason: Optional[str] = None    # e.g. "empty-side" for the convention case


def violations_at(p: PointR2, red: Sequence[DLine], blue: Sequence[DLine]) -> int:
    v = 0
    for l in red:
        if l.y_at(p.x) < p.y:
            v += 1
    for l in blue:
        if l.y_at(p.x) > p.y:
            v += 1
    return v


def far_left_min(red: Sequence[DLine], blue: Sequence[DLine]) -> int:
    """Minimum violation count over the far-left gaps (symbolic order at
    x -> -infinity: bottom-to-top is decreasing slope, then increasing c)."""
    order = sorted(
        [(l, True) for l in red] + [(l, False) for l in blue],
        key=lambda t: (-t[0].m, t[0].c),
    )
    best = None
    rb = 0
    ba = sum(1 for _, isr in order if not isr)
    for i in range(len(order) + 1):
        cur = rb + ba
        if best is None or cur < best:
            best = cur
        if i < len(order):
            if order[i][1]:
                rb += 1
            else:
                ba -= 1
    return best


# ---------------------------------------------------------------------------
# Chromatic ply structures
# ---------------------------------------------------------------------------


class PlyStructure:
    """Interval start/end lists induced on a host chain by opposing chains.

    For a point p on the host chain, ply(p) = number of opposing chains
    strictly on their violating side of p = intervals ending strictly before
    p.x, plus intervals starting strictly after p.x, plus opposing chains
    whose interval is empty.
    """

    def __init__(self, host: Chain, opposing: Sequence[Chain]):
        self.starts: list[RatT] = []    # finite interval starts
        self.ends: list[RatT] = []      # finite interval ends
        self.empty = 0                  # chains always on the violating side
        host_concave = host.kind is ChainKind.CONCAVE
        for opp in opposing:
            iv = _safe_interval(host, opp, host_concave)
            if iv is None:
                self.empty += 1
                continue
            lo, hi = iv
            if lo is not None:
                self.starts.append(lo)
            if hi is not None:
                self.ends.append(hi)
        self.starts.sort()
        self.ends.sort()

    def ply(self, x: RatT) -> int:
        import bisect

        ends_before = bisect.bisect_left(self.ends, x)
        starts_after = len(self.starts) - bisect.bisect_right(self.starts, x)
        return self.empty + ends_before + starts_after


def _safe_interval(host: Chain, opp: Chain, host_concave: bool):
    """x-interval where the opposing chain is NOT strictly on its violating
    side of the host: {g >= 0} for the concave gap function g."""
    if host_concave:
        g_concave, g_convex = host, opp      # g = host - opp
    else:
        g_concave, g_convex = opp, host      # g = opp - host
    roots = chain_pair_intersections(g_concave, g_convex)

    def g(x: RatT) -> RatT:
        return g_concave.value_at(x) - g_convex.value_at(x)

    xs = [x for x, _ in roots]
    probes: list[tuple[Optional[RatT], RatT]] = []
    if not xs:
        sign = g(Rat(0))
        return (None, None) if sign >= 0 else None
    probes.append((None, xs[0] - 1))
    for a, b in zip(xs, xs[1:]):
        probes.append((None, (a + b) / 2))
    probes.append((None, xs[-1] + 1))
    signs = [g(p[1]) > 0 for p in probes]
    # concave g: the nonnegative region is one interval
    if not any(signs):
        # only touching roots; interval degenerates to a point (choose first)
        return (xs[0], xs[0])
    first = signs.index(True)
    last = len(signs) - 1 - signs[::-1].index(True)
    lo = None if first == 0 else xs[first - 1]
    hi = None if last == len(signs) - 1 else xs[last]
    return (lo, hi)


# ---------------------------------------------------------------------------
# Static solvers
# ---------------------------------------------------------------------------


def _chain_candidates(
    red_chains: Sequence[Chain], blue_chains: Sequence[Chain]
) -> list[PointR2]:
    pts = []
    seen = set()
    for cr in red_chains:
        for cb in blue_chains:
            for x, y in chain_pair_intersections(cr, cb):
                if (x, y) not in seen:
                    seen.add((x, y))
                    pts.append(PointR2(x, y))
    return pts


def static_leftmost_valid(cs: ConstraintSet, k: int) -> LPResult:
    """Leftmost point violating at most k constraints."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if not cs.red or not cs.blue:
        return LPResult(LPStatus.UNBOUNDED, reason="empty-side")
    if far_left_min(cs.red, cs.blue) <= k:
        return LPResult(LPStatus.UNBOUNDED)
    kk = min(k, len(cs.red) + len(cs.blue))
    red_chains = chain_decomposition(cs.red, kk, Direction.LOWER).chains
    blue_chains = chain_decomposition(cs.blue, kk, Direction.UPPER).chains
    best = None
    for p in _chain_candidates(red_chains, blue_chains):
        v = violations_at(p, cs.red, cs.blue)
        if v <= k:
            key = (p.x, p.y)
            if best is None or key < best[0]:
                best = (key, p, v)
    if best is None:
        return LPResult(LPStatus.INFEASIBLE)
    _, p, v = best
    return LPResult(LPStatus.FEASIBLE, p, v)


def static_min_violations(cs: ConstraintSet) -> tuple[int, LPResult]:
    """Smallest k with a non-infeasible answer, plus that answer."""
    if not cs.red or not cs.blue:
        return 0, LPResult(LPStatus.UNBOUNDED, reason="empty-side")
    gap_min = far_left_min(cs.red, cs.blue)
    n = len(cs.red) + len(cs.blue)
    k_guess = 1
    vertex_min = None
    while True:
        kk = min(k_guess, n)
        red_chains = chain_decomposition(cs.red, kk, Direction.LOWER).chains
        blue_chains = chain_decomposition(cs.blue, kk, Direction.UPPER).chains
        vals = [
            violations_at(p, cs.red, cs.blue)
            for p in _chain_candidates(red_chains, blue_chains)
        ]
        vals = [v for v in vals if v <= kk]
        if vals:
            vertex_min = min(vals)
            break
        if kk >= n:
            break
        k_guess *= 2
    k_min = gap_min if vertex_min is None else min(gap_min, vertex_min)
    return k_min, static_leftmost_valid(cs, k_min)


# ---------------------------------------------------------------------------
# Semi-online dynamic structure
# ---------------------------------------------------------------------------


@dataclass
class _Layer:
    index: int
    lines: list[DLine]
    chainsets: dict[int, ChainSet]   # level -> decomposition (built at creation)

    def chains_for(self, k_active: int) -> list[Chain]:
        if not self.lines:
            return []
        best = min((lv for lv in self.chainsets if lv >= k_active),
                   default=max(self.chainsets))
        return self.chainsets[best].chains


def _trivial_chain(line: DLine, kind: ChainKind) -> Chain:
    return Chain(kind, [ChainPiece(line, None, None)])


class DynState:
    """Semi-online LP-with-violations state (Insert carries its promised
    deletion update index; deletions must not arrive early).

    Single writer; queries are read-only between updates.
    """

    def __init__(
        self,
        cs: ConstraintSet,
        schedule: dict[int, Optional[int]],
        k: int,
        kmin_mode: bool = False,
        partitioner=median_partitioner,
    ):
        self.k = k
        self.kmin_mode = kmin_mode
        self.partitioner = partitioner
        self.live: dict[int, tuple[DLine, Color]] = {}
        self.delete_at: dict[int, Optional[int]] = {}
        self.u = 0
        self.updates_since_init = 0
        self.stats = {"expensive_updates": 0, "full_rebuilds": 0}
        for l in cs.red:
            self.live[l.id] = (l, Color.RED)
            self.delete_at[l.id] = schedule.get(l.id)
        for l in cs.blue:
            self.live[l.id] = (l, Color.BLUE)
            self.delete_at[l.id] = schedule.get(l.id)
        self._full_init()

    # -- bookkeeping ---------------------------------------------------------

    def _lines(self, color: Color) -> list[DLine]:
        return [l for l, c in self.live.values() if c is color]

    def _measure_kmin(self) -> int:
        red, blue = self._lines(Color.RED), self._lines(Color.BLUE)
        if not red or not blue:
            return 0
        forest_min = self.forest.min_count() if self.forest else None
        gap = far_left_min(red, blue)
        return gap if forest_min is None else min(gap, forest_min)

    def _cadence_from(self, k_target: int, n: int) -> int:
        logn = max(1, math.ceil(math.log2(max(n, 2))))
        return max(1, 1 << max(0, (k_target * logn - 1).bit_length()))

    def _full_init(self) -> None:
        n = max(len(self.live), 2)
        if self.kmin_mode:
            red, blue = self._lines(Color.RED), self._lines(Color.BLUE)
            if red and blue:
                k_cur, _ = static_min_violations(ConstraintSet(red, blue))
            else:
                k_cur = 0
            k_cur = max(k_cur, 1)
            self.cadence = self._cadence_from(k_cur, n)
            self.k_active = min(2 * self.cadence_exp_bound(k_cur), n)
        else:
            self.cadence = self._cadence_from(max(self.k, 1), n)
            self.k_active = min(self.k, n)
        self.leftover_cap = self.cadence
        self.layers: dict[Color, dict[int, _Layer]] = {
            Color.RED: {}, Color.BLUE: {}
        }
        self.leftover: dict[Color, dict[int, DLine]] = {
            Color.RED: {}, Color.BLUE: {}
        }
        self._distribute(list(self.live), upto=None)
        self.updates_since_init = 0
        self.stats["full_rebuilds"] += 1
        self._rebuild_candidates()

    def cadence_exp_bound(self, k_cur: int) -> int:
        # smallest power of two >= k_cur, doubled for the activation level
        p = 1
        while p < k_cur:
            p *= 2
        return p

    def _layer_levels(self, nlines: int) -> list[int]:
        if not self.kmin_mode:
            return [min(self.k, nlines)]
        out = []
        l = 1
        while True:
            out.append(min(1 << l, nlines))
            if (1 << l) >= nlines:
                break
            l += 1
        return sorted(set(out))

    def _build_layer(self, index: int, lines: list[DLine], color: Color) -> _Layer:
        direction = Direction.LOWER if color is Color.RED else Direction.UPPER
        sets = {}
        for lv in self._layer_levels(len(lines)):
            sets[lv] = chain_decomposition(lines, lv, direction,
                                           source=f"layer {index}")
        return _Layer(index, lines, sets)

    def _distribute(self, ids: list[int], upto: Optional[int]) -> None:
        """Place the given live line ids into leftover + layers by their
        remaining time to deletion; layers above `upto` are untouched."""
        entries = []
        for id_ in ids:
            if id_ not in self.live:
                continue
            da = self.delete_at[id_]
            d = (da - self.u) if da is not None else None
            entries.append((d if d is not None else float("inf"), id_))
        entries.sort(key=lambda t: (t[0], t[1]))
        soon = entries[: self.leftover_cap]
        rest = entries[self.leftover_cap:]
        for color in (Color.RED, Color.BLUE):
            self.leftover[color] = {}
        for _, id_ in soon:
            line, color = self.live[id_]
            self.leftover[color][id_] = line
        buckets: dict[tuple[Color, int], list[DLine]] = {}
        for d, id_ in rest:
            line, color = self.live[id_]
            if d == float("inf"):
                idx = 62
            else:
                idx = max(1, math.ceil(math.log2(max(d, 2)))) - 1
            idx = max(idx, self.cadence.bit_length() - 1)
            if upto is not None:
                idx = min(idx, upto)
            buckets.setdefault((color, idx), []).append(line)
        for (color, idx), lines in buckets.items():
            self.layers[color][idx] = self._build_layer(idx, lines, color)

    # -- candidate set I and the forest ---------------------------------------

    def _all_chains(self, color: Color) -> list[Chain]:
        kind = ChainKind.CONCAVE if color is Color.RED else ChainKind.CONVEX
        out = [
            _trivial_chain(l, kind) for l in self.leftover[color].values()
        ]
        for layer in self.layers[color].values():
            out.extend(layer.chains_for(self.k_active))
        return out

    def _register_point(self, x: RatT, y: RatT, ids: tuple[int, ...]) -> None:
        red, blue = self._lines(Color.RED), self._lines(Color.BLUE)
        cnt = violations_at(PointR2(x, y), red, blue)
        pt = PTPoint(x, y, cnt, True, payload=ids)
        self.forest.insert(pt)
        for id_ in ids:
            self.points_by_line.setdefault(id_, []).append(pt)

    def _rebuild_candidates(self) -> None:
        red_chains = self._all_chains(Color.RED)
        blue_chains = self._all_chains(Color.BLUE)
        red, blue = self._lines(Color.RED), self._lines(Color.BLUE)
        pts = []
        seen = set()
        for cr in red_chains:
            for cb in blue_chains:
                for x, y in chain_pair_intersections(cr, cb):
                    if (x, y) in seen:
                        continue
                    seen.add((x, y))
                    cnt = violations_at(PointR2(x, y), red, blue)
                    ids = (cr.piece_at(x).line.id, cb.piece_at(x).line.id)
                    pts.append(PTPoint(x, y, cnt, True, payload=ids))
        self.forest = PartitionForest(pts, partitioner=self.partitioner)
        self.points_by_line = {}
        for pt in pts:
            for id_ in pt.payload:
                self.points_by_line.setdefault(id_, []).append(pt)

    # -- updates ----------------------------------------------------------------

    def insert(self, line: DLine, color: Color, delete_at: Optional[int]) -> None:
        if line.id in self.live:
            raise UnknownId(f"line id {line.id} already live")
        if delete_at is not None and delete_at <= self.u + 1:
            raise ScheduleViolation(
                f"deletion time {delete_at} not after insertion update {self.u + 1}"
            )
        self.u += 1
        self.updates_since_init += 1
        self.live[line.id] = (line, color)
        self.delete_at[line.id] = delete_at
        self.leftover[color][line.id] = line
        # all counts of existing candidates shift where the new line is violated
        self.forest.halfplane_update(line, above=(color is Color.RED), delta=+1)
        kind = ChainKind.CONCAVE if color is Color.RED else ChainKind.CONVEX
        new_chain = _trivial_chain(line, kind)
        opposing = self._all_chains(color.other())
        for opp in opposing:
            if color is Color.RED:
                inters = chain_pair_intersections(new_chain, opp)
            else:
                inters = chain_pair_intersections(opp, new_chain)
            for x, y in inters:
                other_id = opp.piece_at(x).line.id
                self._register_point(x, y, (line.id, other_id))
        self._maybe_expensive()

    def delete(self, id_: int) -> None:
        if id_ not in self.live:
            raise UnknownId(f"no live line {id_}")
        self.u += 1
        self.updates_since_init += 1
        line, color = self.live[id_]
        da = self.delete_at[id_]
        if da is None or da > self.u:
            raise ScheduleViolation(
                f"line {id_} deleted at update {self.u}, promised {da}"
            )
        if id_ not in self.leftover[color]:
            raise ScheduleViolation(
                f"line {id_} is not in the leftover list (deletion out of order)"
            )
        del self.leftover[color][id_]
        del self.live[id_]
        del self.delete_at[id_]
        for pt in self.points_by_line.pop(id_, []):
            if pt.alive:
                self.forest.delete(pt)
        self.forest.halfplane_update(line, above=(color is Color.RED), delta=-1)
        self._maybe_expensive()

    def _maybe_expensive(self) -> None:
        if len(self.live) and self.updates_since_init > 2 * len(self.live):
            self._full_init()
            return
        if self.u % self.cadence != 0:
            return
        self.stats["expensive_updates"] += 1
        if self.kmin_mode:
            k_cur = max(self._measure_kmin(), 1)
            n = max(len(self.live), 2)
            self.cadence = self._cadence_from(k_cur, n)
            self.k_active = min(2 * self.cadence_exp_bound(k_cur), n)
            self.leftover_cap = self.cadence
        iprime = (self.u & -self.u).bit_length() - 1   # v2(u)
        moved = []
        for color in (Color.RED, Color.BLUE):
            moved.extend(self.leftover[color].keys())
            for idx in [i for i in self.layers[color] if i <= iprime]:
                moved.extend(l.id for l in self.layers[color][idx].lines)
                del self.layers[color][idx]
        self._distribute(moved, upto=iprime)
        self._rebuild_candidates()

    # -- queries ------------------------------------------------------------------

    def query(self, kq: Optional[int] = None) -> LPResult:
        kq = self.k if kq is None else kq
        if not self.kmin_mode and kq > self.k:
            raise ValueError(f"query k'={kq} exceeds structure k={self.k}")
        red, blue = self._lines(Color.RED), self._lines(Color.BLUE)
        if not red or not blue:
            return LPResult(LPStatus.UNBOUNDED, reason="empty-side")
        if far_left_min(red, blue) <= kq:
            return LPResult(LPStatus.UNBOUNDED)
        pt = self.forest.leftmost_valid(kq)
        if pt is None:
            return LPResult(LPStatus.INFEASIBLE)
        return LPResult(LPStatus.FEASIBLE, PointR2(pt.x, pt.y), pt.count)

    def query_kmin(self) -> tuple[int, LPResult]:
        if not self.kmin_mode:
            raise ValueError("structure was not built in k_min-tracking mode")
        red, blue = self._lines(Color.RED), self._lines(Color.BLUE)
        if not red or not blue:
            return 0, LPResult(LPStatus.UNBOUNDED, reason="empty-side")
        k_min = self._measure_kmin()
        if k_min > self.k_active:
            self._full_init()   # defensive; cannot happen within the contract
            k_min = self._measure_kmin()
        return k_min, self._kmin_result(k_min)

    def _kmin_result(self, k_min: int) -> LPResult:
        red, blue = self._lines(Color.RED), self._lines(Color.BLUE)
        if far_left_min(red, blue) <= k_min:
            return LPResult(LPStatus.UNBOUNDED)
        pt = self.forest.leftmost_valid(k_min)
        if pt is None:
            return LPResult(LPStatus.INFEASIBLE)
        return LPResult(LPStatus.FEASIBLE, PointR2(pt.x, pt.y), pt.count)

    # -- audits ---------------------------------------------------------------

    def audit(self) -> None:
        """Verify layer survival promises, leftover membership and buffers."""
        self.forest.audit()
        for color in (Color.RED, Color.BLUE):
            for idx, layer in self.layers[color].items():
                block = 1 << idx
                remaining = block - (self.u % block)
                for l in layer.lines:
                    da = self.delete_at.get(l.id)
                    if da is not None and da - self.u <= remaining - 1:
                        raise AssertionError(
                            f"layer {idx} line {l.id} deletable too soon"
                        )
                if len(layer.lines) > 2 * block:
                    raise AssertionError(f"layer {idx} overfull")


def dyn_build(
    cs: ConstraintSet, schedule: dict[int, Optional[int]], k: int, **kw
) -> DynState:
    return DynState(cs, schedule, k, **kw)


def dyn_update(st: DynState, op) -> None:
    """op: ("insert", DLine, Color, delete_at) or ("delete", id)."""
    if op[0] == "insert":
        st.insert(op[1], op[2], op[3])
    elif op[0] == "delete":
        st.delete(op[1])
    else:
        raise ValueError(f"unknown op {op!r}")


def dyn_query(st: DynState, k: Optional[int] = None) -> LPResult:
    return st.query(k)


def dyn_query_kmin(st: DynState) -> tuple[int, LPResult]:
    return st.query_kmin()


def halfplane_update(forest: PartitionForest, line: DLine, color: Color,
                     sign: int) -> None:
    """Adjust every candidate count on the violating side of `line`."""
    forest.halfplane_update(line, above=(color is Color.RED), delta=sign)


def tree_query(forest: PartitionForest, kq: int) -> Optional[PointR2]:
    """Leftmost candidate with current count <= kq."""
    pt = forest.leftmost_valid(kq)
    return PointR2(pt.x, pt.y) if pt is not None else None
