"""(1+eps)-approximate k-mis MinMax via a regular t-gon convex distance.

The Euclidean distance is replaced by the convex distance induced by a
t-gon inscribed in the unit disk.  Each corner realizes the distance for one
angular wedge of separator directions; rotating that corner straight down
turns the metric into plain vertical distance, so each wedge reduces to an
exact vertical-error optimization over a slope slab in the dual plane.

Rotations are exact: corners are rational points on the unit circle
(tan-half-angle approximations of the ideal corner angles), and the realized
polygon is verified against 1/cos(max half-gap) <= 1+eps by exact rational
comparison.  Corners come in opposite pairs, so one in-frame orientation per
corner covers both primal orientations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .chains import Chain, ChainKind, ChainPiece, Direction, DLine, \
    chain_crossings_any, chain_decomposition, chain_pair_intersections, \
    cross_x, envelope
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
from .errors import EmptyColor, InfeasibleWedge, NonPositiveEps, SepkitError
from .exactkmm import OrientationAnalysis, midpoint_curve
from .lpviol import PlyStructure
from .rat import R0, Rat, RatLike, RatT, rat
from .scans import ColumnProfile, segment_valid_crossings


class Infeasible(SepkitError):
    """No valid separator exists for the requested k (k < k_min)."""


@dataclass(frozen=True)
class Wedge:
    index: int
    corner: tuple[RatT, RatT]        # rational unit vector
    m_lo: RatT                       # slab of separator slopes in the frame
    m_hi: RatT

    def rotate(self, p: PointR2) -> PointR2:
        """Map the frame so this corner points straight down."""
        wx, wy = self.corner
        return PointR2(-wy * p.x + wx * p.y, -wx * p.x - wy * p.y)

    def unrotate(self, p: PointR2) -> PointR2:
        wx, wy = self.corner
        return PointR2(-wy * p.x - wx * p.y, wx * p.x - wy * p.y)

    def vertical_slope_in_frame(self) -> Optional[RatT]:
        """Frame slope of originally-vertical lines (None if still vertical)."""
        wx, wy = self.corner
        if wx == 0:
            return None
        return -wy / wx


@dataclass(frozen=True)
class TGon:
    t: int                  # smallest t >= 3 with 1/cos(pi/t) <= 1+eps
    eps: RatT
    corners: list[tuple[RatT, RatT]]
    wedges: list[Wedge]

    @property
    def realized_corners(self) -> int:
        return len(self.corners)


def _circle_point(angle: float, prec: int) -> tuple[RatT, RatT]:
    u = Fraction(math.tan(angle / 2)).limit_denominator(prec)
    den = 1 + u * u
    return rat(Fraction(1 - u * u) / den), rat(Fraction(2 * u) / den)


def make_tgon(eps: RatLike) -> TGon:
    """Regular t-gon machinery for a given eps > 0.

    The reported t follows 1/cos(pi/t) <= 1+eps exactly; the realized corner
    set is the smallest even refinement whose rational corners provably
    satisfy the same bound (verified by exact comparison of
    (1 + <w_i, w_{i+1}>)/2 >= 1/(1+eps)^2).
    """
    eps = rat(eps)
    if eps <= 0:
        raise NonPositiveEps("eps must be > 0")
    feps = float(eps)
    t = 3
    while 1.0 / math.cos(math.pi / t) > (1.0 + feps) * (1 + 1e-12):
        t += 1
    t_eff = t if t % 2 == 0 else t + 1
    bound = 1 / ((1 + eps) * (1 + eps))   # need (1+dot)/2 >= bound per gap
    prec = 10**8
    for _ in range(64):
        half = t_eff // 2
        corners = []
        ok = True
        for j in range(half):
            ang = -math.pi / 2 + 2 * math.pi * j / t_eff
            wx, wy = _circle_point(ang, prec)
            assert wx * wx + wy * wy == 1
            corners.append((wx, wy))
        corners += [(-x, -y) for x, y in corners]
        for j in range(t_eff):
            ax, ay = corners[j]
            bx, by = corners[(j + 1) % t_eff]
            if ax * by - ay * bx <= 0:          # must advance counterclockwise
                ok = False
                break
            dot = ax * bx + ay * by
            if (1 + dot) < 2 * bound:
                ok = False
                break
        if ok:
            wedges = []
            for j in range(t_eff):
                w = corners[j]
                prv = corners[(j - 1) % t_eff]
                nxt = corners[(j + 1) % t_eff]
                m_lo = _bisector_slope(w, prv)
                m_hi = _bisector_slope(w, nxt)
                if m_lo > m_hi:
                    m_lo, m_hi = m_hi, m_lo
                wedges.append(Wedge(j, w, m_lo, m_hi))
            return TGon(t, eps, corners, wedges)
        prec *= 100
        if prec > 10**14:
            prec = 10**8
            t_eff += 2
    raise AssertionError("t-gon construction did not converge")


def _bisector_slope(w: tuple[RatT, RatT], nb: tuple[RatT, RatT]) -> RatT:
    """Slab bound: slope (in w's frame) of separators whose downward normal
    bisects corners w and nb."""
    wx, wy = w
    ux, uy = wx + nb[0], wy + nb[1]
    # rotate the bisector direction into the frame
    fx, fy = -wy * ux + wx * uy, -wx * ux - wy * uy
    return -fx / fy


# ---------------------------------------------------------------------------
# Per-wedge context
# ---------------------------------------------------------------------------


@dataclass
class DeltaContext:
    """Decision-problem data for one wedge in its rotated frame."""

    wedge: Wedge
    k: int
    below: list[DLine]                 # rotated red duals (misclassified below)
    above: list[DLine]                 # rotated blue duals
    red_chains: list[Chain]
    blue_chains: list[Chain]
    red_ply: list[PlyStructure]        # blue ply structure per red chain
    blue_ply: list[PlyStructure]       # red ply structure per blue chain
    env_lo: Chain
    env_hi: Chain
    p_min: Optional[tuple[RatT, RatT, int, RatT]]   # x, y, mis, err

    def vert_err(self, x: RatT, y: RatT) -> RatT:
        e = R0
        g = y - self.env_lo.value_at(x)
        if g > e:
            e = g
        g = self.env_hi.value_at(x) - y
        if g > e:
            e = g
        return e

    def in_slab(self, x: RatT) -> bool:
        return self.wedge.m_lo <= x <= self.wedge.m_hi

    def mis_at(self, x: RatT, y: RatT) -> int:
        from .lpviol import violations_at

        return violations_at(PointR2(x, y), self.below, self.above)


def rotated_duals(
    pts: Sequence[LabeledPoint], wedge: Wedge
) -> tuple[list[DLine], list[DLine]]:
    reds, blues = split_colors(pts)
    below = [
        DLine(p.id, q.x, -q.y) for p in reds for q in [wedge.rotate(p.point)]
    ]
    above = [
        DLine(p.id, q.x, -q.y) for p in blues for q in [wedge.rotate(p.point)]
    ]
    return below, above


def build_delta_context(
    pts: Sequence[LabeledPoint], k: int, wedge: Wedge,
    chains_override: Optional[tuple[list[Chain], list[Chain]]] = None,
) -> DeltaContext:
    below, above = rotated_duals(pts, wedge)
    if not below or not above:
        raise EmptyColor("both colors required")
    kk = min(k, len(below) + len(above))
    if chains_override is not None:
        red_chains, blue_chains = chains_override
    else:
        red_chains = chain_decomposition(below, kk, Direction.LOWER).chains
        blue_chains = chain_decomposition(above, kk, Direction.UPPER).chains
    red_ply = [PlyStructure(c, blue_chains) for c in red_chains]
    blue_ply = [PlyStructure(c, red_chains) for c in blue_chains]
    env_lo = envelope(below, Direction.LOWER)
    env_hi = envelope(above, Direction.UPPER)
    ctx = DeltaContext(
        wedge, k, below, above, red_chains, blue_chains,
        red_ply, blue_ply, env_lo, env_hi, None,
    )
    ctx.p_min = _find_p_min(ctx)
    return ctx


def _find_p_min(ctx: DeltaContext) -> Optional[tuple[RatT, RatT, int, RatT]]:
    """Valid red-blue chain intersection inside the slab with lowest error."""
    best = None
    for i, cr in enumerate(ctx.red_chains):
        for j, cb in enumerate(ctx.blue_chains):
            for x, y in chain_pair_intersections(cr, cb):
                if not ctx.in_slab(x):
                    continue
                mis = ctx.red_ply[i].ply(x) + ctx.blue_ply[j].ply(x)
                if mis > ctx.k:
                    continue
                err = ctx.vert_err(x, y)
                key = (err, x, y)
                if best is None or key < best[0]:
                    best = (key, (x, y, mis, err))
    return best[1] if best else None


def _shifted(chain: Chain, delta: RatT, up: bool) -> Chain:
    d = delta if up else -delta
    return Chain(
        chain.kind,
        [ChainPiece(DLine(p.line.id, p.line.m, p.line.c + d), p.x_lo, p.x_hi)
         for p in chain.pieces],
    )


def decide_delta(ctx: DeltaContext, delta: RatT) -> Optional[PointR2]:
    """A valid dual point in the wedge slab with vertical error <= delta, or
    None.  Candidates: p_min, intersections involving the delta-chains, and
    the slab walls (clipping can move the optimum onto a wall)."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    cands: list[tuple[RatT, RatT]] = []
    if ctx.p_min is not None:
        x, y, _, err = ctx.p_min
        if err <= delta:
            cands.append((x, y))
    concave_d = _shifted(ctx.env_lo, delta, up=True)     # red envelope + delta
    convex_d = _shifted(ctx.env_hi, delta, up=False)     # blue envelope - delta
    for cb in ctx.blue_chains:
        cands.extend(chain_pair_intersections(concave_d, cb))
    for cr in ctx.red_chains:
        cands.extend(chain_pair_intersections(cr, convex_d))
    cands.extend(chain_pair_intersections(concave_d, convex_d))
    for wall in (ctx.wedge.m_lo, ctx.wedge.m_hi):
        col = ColumnProfile(ctx.below, ctx.above, wall)
        cy = (ctx.env_lo.value_at(wall) + ctx.env_hi.value_at(wall)) / 2
        for y in (cy, col.nearest_valid_above(cy, ctx.k),
                  col.nearest_valid_below(cy, ctx.k)):
            if y is not None:
                cands.append((wall, y))
    best = None
    for x, y in cands:
        if not ctx.in_slab(x):
            continue
        err = ctx.vert_err(x, y)
        if err > delta:
            continue
        if ctx.mis_at(x, y) > ctx.k:
            continue
        key = (err, x, y)
        if best is None or key < best[0]:
            best = (key, PointR2(x, y))
    return best[1] if best else None


# ---------------------------------------------------------------------------
# Per-wedge exact optimization (vertical metric over a slope slab)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WedgeSolution:
    delta: RatT
    point: PointR2
    mis: int


class WedgeFrame:
    """Envelope/curve geometry of one wedge in its rotated frame."""

    def __init__(self, wedge: Wedge, below: list[DLine], above: list[DLine],
                 env_lo: Chain, env_hi: Chain, curve=None):
        self.wedge = wedge
        self.below = below
        self.above = above
        self.env_lo = env_lo
        self.env_hi = env_hi
        self.curve = curve if curve is not None else midpoint_curve(env_lo, env_hi)
        self._columns: dict = {}

    def column(self, x: RatT) -> ColumnProfile:
        col = self._columns.get(x)
        if col is None:
            col = ColumnProfile(self.below, self.above, x)
            self._columns[x] = col
        return col

    def vert_err(self, x: RatT, y: RatT) -> RatT:
        e = R0
        g = y - self.env_lo.value_at(x)
        if g > e:
            e = g
        g = self.env_hi.value_at(x) - y
        if g > e:
            e = g
        return e


def wedge_optimum(frame: WedgeFrame, vertex_cands, k: int) -> Optional[WedgeSolution]:
    """Exact minimum vertical error over valid separators in the wedge slab.

    vertex_cands supplies (x, y, mis) triples with mis <= k covering every
    valid arrangement vertex; curve, column, crossing and wall candidates are
    derived here.  Candidates whose separator would be vertical in the
    original frame are skipped (outside the solver's domain).
    """
    w = frame.wedge
    vskip = w.vertical_slope_in_frame()
    best = None

    def consider(x, y, mis):
        nonlocal best
        if not (w.m_lo <= x <= w.m_hi):
            return
        if vskip is not None and x == vskip:
            return
        err = frame.vert_err(x, y)
        key = (err, x, y)
        if best is None or key < best[0]:
            best = (key, PointR2(x, y), mis)

    for x, y, mis in vertex_cands:
        consider(x, y, mis)
    for v in frame.curve.vertices:
        if not (w.m_lo <= v.x <= w.m_hi):
            continue
        col = frame.column(v.x)
        mis_v = col.mis_at(v.y)
        if mis_v <= k:
            consider(v.x, v.y, mis_v)
        up = col.nearest_valid_above(v.y, k)
        if up is not None:
            consider(v.x, up, col.mis_at(up))
        dn = col.nearest_valid_below(v.y, k)
        if dn is not None:
            consider(v.x, dn, col.mis_at(dn))
    for p in frame.curve.pieces:
        x1 = p.x_lo if p.x_lo is not None and p.x_lo > w.m_lo else w.m_lo
        x2 = p.x_hi if p.x_hi is not None and p.x_hi < w.m_hi else w.m_hi
        if x1 > x2:
            continue
        for (x, y, mis) in segment_valid_crossings(
            p.line.m, p.line.c, x1, x2, frame.below, frame.above, k
        ):
            consider(x, y, mis)
    for wall in (w.m_lo, w.m_hi):
        col = frame.column(wall)
        cy = frame.curve.value_at(wall)
        for y in (cy, col.nearest_valid_above(cy, k),
                  col.nearest_valid_below(cy, k)):
            if y is not None and col.mis_at(y) <= k:
                consider(wall, y, col.mis_at(y))
    if best is None:
        return None
    (err, _, _), pt, mis = best
    return WedgeSolution(err, pt, mis)


def solve_wedge(
    frame: WedgeFrame, vertex_cands, k: int, tol: RatLike = Rat(1, 10**12),
    certify_ctx: Optional[DeltaContext] = None,
) -> WedgeSolution:
    """Wedge optimum plus the decision-contract certificate: the returned
    delta is exact, so decide_delta(delta) succeeds while
    decide_delta(delta/(1+tol)) finds nothing strictly better."""
    sol = wedge_optimum(frame, vertex_cands, k)
    if sol is None:
        raise InfeasibleWedge(f"no valid separator in wedge {frame.wedge.index}")
    if certify_ctx is not None:
        assert decide_delta(certify_ctx, sol.delta) is not None
        lo = sol.delta / (1 + rat(tol))
        if lo < sol.delta:
            r = decide_delta(certify_ctx, lo)
            assert r is None
    return sol


@dataclass
class ApproxReport:
    separator: Separator
    mis: int
    approx_err: RatT            # t-gon metric value of the reported separator
    euclid_max_sq: RatT
    eps: RatT
    t: int
    wedge: int
    dual_point: PointR2


class ApproxSolver:
    """Shared per-wedge analyses; reusable across several k values."""

    def __init__(self, pts: Sequence[LabeledPoint], kmax: int, eps: RatLike):
        reds, blues = split_colors(pts)
        if not reds or not blues:
            raise EmptyColor("both colors required")
        self.pts = list(pts)
        self.eps = rat(eps)
        self.tgon = make_tgon(eps)
        kmax = min(kmax, len(self.pts))
        self.frames: list[WedgeFrame] = []
        self.analyses: list[OrientationAnalysis] = []
        for w in self.tgon.wedges:
            below, above = rotated_duals(pts, w)
            ana = OrientationAnalysis(below, above, kmax)
            self.analyses.append(ana)
            self.frames.append(
                WedgeFrame(w, below, above, ana.env_lo, ana.env_hi, ana.curve)
            )

    def solve(self, k: int, tol: RatLike = Rat(1, 10**12)) -> ApproxReport:
        k = min(k, len(self.pts))
        best = None
        for frame, ana in zip(self.frames, self.analyses):
            verts = [(v.x, v.y, v.mis) for v in ana.scan.vertices if v.mis <= k]
            try:
                sol = solve_wedge(frame, verts, k, tol)
            except InfeasibleWedge:
                continue
            key = (sol.delta, frame.wedge.index)
            if best is None or key < best[0]:
                best = (key, sol, frame.wedge)
        if best is None:
            raise Infeasible(f"no separator misclassifies at most {k} points")
        _, sol, wedge = best
        sep = _unrotate_separator(sol.point, wedge)
        rep = classify_mis(sep, self.pts)
        assert rep.mis <= k, "approx witness exceeds the outlier budget"
        return ApproxReport(
            separator=sep,
            mis=rep.mis,
            approx_err=sol.delta,
            euclid_max_sq=rep.max_sq,
            eps=self.eps,
            t=self.tgon.t,
            wedge=wedge.index,
            dual_point=sol.point,
        )


def _unrotate_separator(dual_pt: PointR2, wedge: Wedge) -> Separator:
    m, c = dual_pt.x, -dual_pt.y
    a = wedge.unrotate(PointR2(R0, c))
    b = wedge.unrotate(PointR2(Rat(1), m + c))
    line = LineR2.through(a, b)
    # in the frame, blues lie above the separator; carry the side back
    probe = wedge.unrotate(PointR2(R0, c + 1))
    above = probe.y - line.y_at(probe.x) > 0
    orient = Orientation.BLUE_ABOVE if above else Orientation.RED_ABOVE
    return Separator(line, orient)


def solve_approx(
    pts: Sequence[LabeledPoint], k: int, eps: RatLike,
    tol: RatLike = Rat(1, 10**12),
) -> ApproxReport:
    if k < 0:
        raise ValueError("k must be >= 0")
    return ApproxSolver(pts, k, eps).solve(k, tol)


# ---------------------------------------------------------------------------
# Semi-online dynamic maintenance
# ---------------------------------------------------------------------------


def _envelope_from_hull(points: list[PointR2], direction: Direction,
                        duals: dict[int, DLine],
                        id_of: dict[tuple, int]) -> Chain:
    """Envelope of the duals of a point set from its maintained hull chain:
    the lower envelope of the dual lines consists of the duals of the upper
    hull vertices (in decreasing slope), and symmetrically for the upper."""
    if direction is Direction.LOWER:
        verts = list(reversed(points))      # upper hull, decreasing x = slope
        kind = ChainKind.CONCAVE
    else:
        verts = points                      # lower hull, increasing x = slope
        kind = ChainKind.CONVEX
    lines = [duals[id_of[(p.x, p.y)]] for p in verts]
    pieces = []
    prev = None
    for i, l in enumerate(lines):
        hi = cross_x(l, lines[i + 1]) if i + 1 < len(lines) else None
        pieces.append(ChainPiece(l, prev, hi))
        prev = hi
    return Chain(kind, pieces)


class DynApprox:
    """Maintains a (1+eps)-approximate optimal separator under semi-online
    updates: per wedge, the chains/intersection machinery of the LP module
    runs on the rotated duals and the envelopes come from dynamically
    maintained convex hulls of the rotated points."""

    def __init__(
        self,
        pts: Sequence[LabeledPoint],
        k: int,
        eps: RatLike,
        schedule: dict[int, Optional[int]],
    ):
        from .hullmargin import DynHull
        from .lpviol import ConstraintSet, DynState

        self.k = k
        self.eps = rat(eps)
        self.tgon = make_tgon(eps)
        self.live: dict[int, LabeledPoint] = {}
        self.states: list[DynState] = []
        self.hulls: list[tuple[DynHull, DynHull]] = []
        for w in self.tgon.wedges:
            below, above = rotated_duals(pts, w)
            st = DynState(ConstraintSet(below, above), schedule, min(k, max(len(pts), 1)))
            self.states.append(st)
            hr, hb = DynHull(), DynHull()
            for p in pts:
                q = w.rotate(p.point)
                (hr if p.color is Color.RED else hb).insert(q, p.id)
            self.hulls.append((hr, hb))
        for p in pts:
            self.live[p.id] = p

    def insert(self, p: LabeledPoint, delete_at: Optional[int]) -> ApproxReport:
        for w, st, (hr, hb) in zip(self.tgon.wedges, self.states, self.hulls):
            q = w.rotate(p.point)
            st.insert(DLine(p.id, q.x, -q.y), p.color, delete_at)
            (hr if p.color is Color.RED else hb).insert(q, p.id)
        self.live[p.id] = p
        return self.report()

    def delete(self, id_: int) -> ApproxReport:
        p = self.live.pop(id_)
        for st, (hr, hb) in zip(self.states, self.hulls):
            st.delete(id_)
            (hr if p.color is Color.RED else hb).delete(id_)
        return self.report()

    def _wedge_frame(self, idx: int) -> WedgeFrame:
        from .hullmargin import hull_chains

        w = self.tgon.wedges[idx]
        st = self.states[idx]
        below = st._lines(Color.RED)
        above = st._lines(Color.BLUE)
        duals = {l.id: l for l in below + above}
        hr, hb = self.hulls[idx]
        red_pts = [PointR2(x, y) for x, y, _ in hr._pts]
        blue_pts = [PointR2(x, y) for x, y, _ in hb._pts]
        _, red_upper = hull_chains(red_pts)
        blue_lower, _ = hull_chains(blue_pts)
        env_lo = _envelope_from_hull(red_upper, Direction.LOWER, duals, hr.id_map())
        env_hi = _envelope_from_hull(blue_lower, Direction.UPPER, duals, hb.id_map())
        return WedgeFrame(w, below, above, env_lo, env_hi)

    def _vertex_candidates(self, idx: int, k: int):
        """Valid-vertex candidates from the maintained structures: the
        red-blue intersection set I (exact counts) plus same-color chain
        crossings and piece breakpoints."""
        st = self.states[idx]
        out = []
        for t in st.forest.trees:
            for pt in t.alive_points():
                if pt.count <= k:
                    out.append((pt.x, pt.y, pt.count))
        below = st._lines(Color.RED)
        above = st._lines(Color.BLUE)

        def mis(x, y):
            from .lpviol import violations_at

            return violations_at(PointR2(x, y), below, above)

        for color in (Color.RED, Color.BLUE):
            chains = st._all_chains(color)
            cands = set()
            for c in chains:
                for p in c.pieces[:-1]:
                    cands.add((p.x_hi, p.line.y_at(p.x_hi)))
            for i in range(len(chains)):
                for j in range(i + 1, len(chains)):
                    cands.update(chain_crossings_any(chains[i], chains[j]))
            for x, y in cands:
                m = mis(x, y)
                if m <= k:
                    out.append((x, y, m))
        return out

    def report(self, k: Optional[int] = None) -> ApproxReport:
        k = self.k if k is None else k
        if not self.live:
            raise EmptyColor("no live points")
        best = None
        for idx in range(len(self.tgon.wedges)):
            frame = self._wedge_frame(idx)
            if not frame.below or not frame.above:
                raise EmptyColor("both colors required")
            sol = wedge_optimum(frame, self._vertex_candidates(idx, k), k)
            if sol is None:
                continue
            key = (sol.delta, idx)
            if best is None or key < best[0]:
                best = (key, sol, self.tgon.wedges[idx])
        if best is None:
            raise Infeasible(f"no separator misclassifies at most {k} points")
        _, sol, wedge = best
        sep = _unrotate_separator(sol.point, wedge)
        rep = classify_mis(sep, list(self.live.values()))
        assert rep.mis <= k
        return ApproxReport(
            separator=sep,
            mis=rep.mis,
            approx_err=sol.delta,
            euclid_max_sq=rep.max_sq,
            eps=self.eps,
            t=self.tgon.t,
            wedge=wedge.index,
            dual_point=sol.point,
        )


def dyn_approx_build(
    pts: Sequence[LabeledPoint], k: int, eps: RatLike,
    schedule: dict[int, Optional[int]],
) -> DynApprox:
    return DynApprox(pts, k, eps, schedule)


def dyn_approx_update(state: DynApprox, op) -> ApproxReport:
    """op: ("insert", LabeledPoint, delete_at) or ("delete", id)."""
    if op[0] == "insert":
        return state.insert(op[1], op[2])
    if op[0] == "delete":
        return state.delete(op[1])
    raise ValueError(f"unknown op {op!r}")
