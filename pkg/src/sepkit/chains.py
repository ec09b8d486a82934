"""Envelopes and concave/convex chain decompositions of <=k-levels.

A chain is an x-monotone polyline whose pieces live on input lines.  The
lower <=k-level of a line set is covered by k+1 concave chains produced by a
sweep: chain j starts on the j-th lowest line at x = -infinity, and whenever
a line leaves the set of k+1 lowest lines (it is overtaken at the boundary),
its chain transfers to the overtaking line.  Transfers always decrease the
piece slope, so chains stay concave.  Upper levels are handled by negating
all lines, which swaps above/below.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import EmptyInput, ValidationError
from .rat import RatT


class Direction(enum.Enum):
    LOWER = "Lower"
    UPPER = "Upper"


class ChainKind(enum.Enum):
    CONCAVE = "Concave"
    CONVEX = "Convex"


@dataclass(frozen=True)
class DLine:
    """A dual line y = m*x + c carrying the id of its source point."""

    id: int
    m: RatT
    c: RatT

    def y_at(self, x: RatT) -> RatT:
        return self.m * x + self.c

    def neg(self) -> "DLine":
        return DLine(self.id, -self.m, -self.c)


def cross_x(a: DLine, b: DLine) -> Optional[RatT]:
    if a.m == b.m:
        return None
    return (b.c - a.c) / (a.m - b.m)


@dataclass(frozen=True)
class ChainPiece:
    line: DLine
    x_lo: Optional[RatT]  # None means -infinity
    x_hi: Optional[RatT]  # None means +infinity


class Chain:
    """x-monotone polyline; pieces abut exactly."""

    def __init__(self, kind: ChainKind, pieces: list[ChainPiece]):
        self.kind = kind
        self.pieces = pieces

    def __len__(self):
        return len(self.pieces)

    def value_at(self, x: RatT) -> RatT:
        return self.piece_at(x).line.y_at(x)

    def piece_at(self, x: RatT) -> ChainPiece:
        lo, hi = 0, len(self.pieces) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            xh = self.pieces[mid].x_hi
            if xh is not None and xh < x:
                lo = mid + 1
            else:
                hi = mid
        return self.pieces[lo]

    def breakpoints(self) -> list[RatT]:
        return [p.x_hi for p in self.pieces[:-1]]

    def x_range(self) -> tuple[Optional[RatT], Optional[RatT]]:
        return self.pieces[0].x_lo, self.pieces[-1].x_hi

    def check_shape(self) -> None:
        """Verify monotone slope ordering and that pieces abut."""
        for a, b in zip(self.pieces, self.pieces[1:]):
            if a.x_hi is None or b.x_lo is None or a.x_hi != b.x_lo:
                raise AssertionError("chain pieces do not abut")
            if self.kind is ChainKind.CONCAVE and b.line.m > a.line.m:
                raise AssertionError("concave chain with increasing slope")
            if self.kind is ChainKind.CONVEX and b.line.m < a.line.m:
                raise AssertionError("convex chain with decreasing slope")

    def negated(self, kind: ChainKind) -> "Chain":
        return Chain(
            kind, [ChainPiece(p.line.neg(), p.x_lo, p.x_hi) for p in self.pieces]
        )


@dataclass
class ChainSet:
    chains: list[Chain]
    direction: Direction
    k: int
    source: str = "static"

    def __iter__(self):
        return iter(self.chains)

    def __len__(self):
        return len(self.chains)


def envelope(lines: Sequence[DLine], direction: Direction) -> Chain:
    """Lower or upper envelope as a single chain."""
    if not lines:
        raise EmptyInput("envelope of empty line set")
    if direction is Direction.UPPER:
        low = envelope([l.neg() for l in lines], Direction.LOWER)
        return low.negated(ChainKind.CONVEX)
    # lower envelope: add lines by decreasing slope, keep a stack of pieces
    by_slope: dict[RatT, DLine] = {}
    for l in lines:
        cur = by_slope.get(l.m)
        if cur is None or l.c < cur.c:
            by_slope[l.m] = l
    order = sorted(by_slope.values(), key=lambda l: -l.m)
    stack: list[DLine] = []
    xs: list[RatT] = []  # xs[i] = crossing of stack[i] and stack[i+1]
    for l in order:
        while stack:
            x = cross_x(stack[-1], l)
            if xs and x <= xs[-1]:
                stack.pop()
                xs.pop()
            else:
                stack.append(l)
                xs.append(x)
                break
        if not stack:
            stack.append(l)
    pieces = []
    for i, l in enumerate(stack):
        lo = xs[i - 1] if i > 0 else None
        hi = xs[i] if i < len(xs) else None
        pieces.append(ChainPiece(l, lo, hi))
    return Chain(ChainKind.CONCAVE, pieces)


def chain_decomposition(
    lines: Sequence[DLine], k: int, direction: Direction, source: str = "static"
) -> ChainSet:
    """min(k+1, n) chains covering all edges of the <=k-level."""
    if not lines:
        raise EmptyInput("chain decomposition of empty line set")
    if k < 0:
        raise ValueError("k must be >= 0")
    if direction is Direction.UPPER:
        low = chain_decomposition([l.neg() for l in lines], k, Direction.LOWER)
        return ChainSet(
            [c.negated(ChainKind.CONVEX) for c in low.chains],
            Direction.UPPER,
            k,
            source,
        )
    n = len(lines)
    m = min(k + 1, n)
    # order at x = -infinity: bottom-to-top is decreasing slope, then
    # increasing intercept (parallel lines never swap)
    order = sorted(lines, key=lambda l: (-l.m, l.c))
    pos = {l.id: r for r, l in enumerate(order)}
    at = {r: l for r, l in enumerate(order)}
    events = []
    for i in range(n):
        for j in range(i + 1, n):
            x = cross_x(lines[i], lines[j])
            if x is not None:
                events.append((x, lines[i].y_at(x), lines[i].id, lines[j].id))
    events.sort(key=lambda e: (e[0], e[1]))
    by_id = {l.id: l for l in lines}
    # chain r rides the line currently at rank r while r < m; record the
    # (line, start_x) history per chain
    history: list[list[tuple[DLine, Optional[RatT]]]] = [
        [(at[r], None)] for r in range(m)
    ]
    chain_of: dict[int, int] = {at[r].id: r for r in range(m)}
    # process events grouped by crossing point: 3+ concurrent lines reverse
    # their contiguous rank block in one step
    e = 0
    while e < len(events):
        x, y = events[e][0], events[e][1]
        ids: set[int] = set()
        while e < len(events) and events[e][0] == x and events[e][1] == y:
            ids.add(events[e][2])
            ids.add(events[e][3])
            e += 1
        ranks = sorted(pos[i] for i in ids)
        if ranks != list(range(ranks[0], ranks[0] + len(ranks))):
            raise ValidationError(
                "non-contiguous concurrent crossing block (degenerate input)"
            )
        lo = ranks[0]
        block = [at[r] for r in ranks]            # bottom to top before x
        leaving = [l for r, l in zip(ranks, block)
                   if r < m <= lo + (ranks[-1] - r)]
        entering = [l for r, l in zip(ranks, block)
                    if r >= m > lo + (ranks[-1] - r)]
        for r, l in zip(ranks, reversed(block)):
            pos[l.id] = r
            at[r] = l
        entering.sort(key=lambda l: pos[l.id])
        for la, lb in zip(leaving, entering):
            idx = chain_of.pop(la.id)
            chain_of[lb.id] = idx
            history[idx].append((lb, x))
    chains = []
    for hist in history:
        pieces = []
        for i, (line, x0) in enumerate(hist):
            x1 = hist[i + 1][1] if i + 1 < len(hist) else None
            pieces.append(ChainPiece(line, x0, x1))
        chains.append(Chain(ChainKind.CONCAVE, pieces))
    return ChainSet(chains, Direction.LOWER, k, source)


def chain_pair_intersections(concave: Chain, convex: Chain) -> list[tuple[RatT, RatT]]:
    """Intersection points of a concave and a convex chain (at most 2).

    Walks the merged piece boundaries of f = concave - convex, which is a
    concave piecewise-linear function, and reports its zero crossings
    (including touching points).
    """
    bounds: list[RatT] = []
    for ch in (concave, convex):
        for p in ch.pieces[:-1]:
            bounds.append(p.x_hi)
    bounds = sorted(set(bounds))
    pts: list[tuple[RatT, RatT]] = []

    def f(x: RatT) -> RatT:
        return concave.value_at(x) - convex.value_at(x)

    def seg_roots(x0: Optional[RatT], x1: Optional[RatT]) -> None:
        # on (x0, x1) both chains are single lines
        xm = _interior_point(x0, x1)
        la = concave.piece_at(xm).line
        lb = convex.piece_at(xm).line
        x = cross_x(la, lb)
        if x is None:
            if la.c == lb.c and la.m == lb.m:
                pass  # identical on the interval: boundary handling covers it
            return
        if (x0 is None or x > x0) and (x1 is None or x < x1):
            pts.append((x, la.y_at(x)))

    prev: Optional[RatT] = None
    for b in bounds:
        seg_roots(prev, b)
        if f(b) == 0:
            pts.append((b, concave.value_at(b)))
        prev = b
    seg_roots(prev, None)
    # dedup, keep sorted by x
    seen = set()
    out = []
    for x, y in sorted(pts, key=lambda t: t[0]):
        if (x, y) not in seen:
            seen.add((x, y))
            out.append((x, y))
    return out


def chain_crossings_any(c1: Chain, c2: Chain) -> list[tuple[RatT, RatT]]:
    """Crossing/touching points of two arbitrary chains (no shape assumed):
    walks the merged piece boundaries and solves per-interval line pairs."""
    bounds: list[RatT] = sorted(
        {p.x_hi for p in c1.pieces[:-1]} | {p.x_hi for p in c2.pieces[:-1]}
    )
    pts: list[tuple[RatT, RatT]] = []

    def seg(x0: Optional[RatT], x1: Optional[RatT]) -> None:
        xm = _interior_point(x0, x1)
        la = c1.piece_at(xm).line
        lb = c2.piece_at(xm).line
        x = cross_x(la, lb)
        if x is None:
            return
        if (x0 is None or x > x0) and (x1 is None or x < x1):
            pts.append((x, la.y_at(x)))

    prev: Optional[RatT] = None
    for b in bounds:
        seg(prev, b)
        if c1.value_at(b) == c2.value_at(b):
            pts.append((b, c1.value_at(b)))
        prev = b
    seg(prev, None)
    seen = set()
    out = []
    for x, y in sorted(pts):
        if (x, y) not in seen:
            seen.add((x, y))
            out.append((x, y))
    return out


def _interior_point(
    x0: Optional[RatT], x1: Optional[RatT]
) -> RatT:
    from .rat import Rat

    if x0 is None and x1 is None:
        return Rat(0)
    if x0 is None:
        return x1 - 1
    if x1 is None:
        return x0 + 1
    return (x0 + x1) / 2
