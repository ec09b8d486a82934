"""Command-line front end.

Subcommands: solve, oracle, simulate, bench, plot.  Exit codes: 0 ok,
2 usage/parse error, 3 infeasible, 4 schedule violation, 5 internal
invariant failure.  SEPKIT_SEED overrides --seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from typing import Optional

from . import dataio
from .approxkmm import Infeasible, solve_approx
from .chains import DLine
from .core import Color, LabeledPoint, Orientation, split_colors, validate_points, \
    perturb_points
from .errors import ParseError, ScheduleViolation, SepkitError, UnknownId, \
    ValidationError
from .exactkmm import duals, minmax_curve, solve_exact
from .hullmargin import StripStatus, max_margin_static
from .levels import overlay_and_label
from .lpviol import ConstraintSet, DynState, LPStatus, static_leftmost_valid, \
    static_min_violations
from .oracle import oracle_1d, oracle_kmm, oracle_minmis
from .rat import Rat, rat, rat_str, sqrt_decimal_str
from .sep1d import Point1D, Tree1D

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_SCHEDULE = 4
EXIT_INTERNAL = 5

PROBLEMS = ("maxstrip", "minmax", "minmis", "kmm", "kmm-approx")


@dataclass
class RunConfig:
    problem: str
    dim: int = 2
    k: Optional[int] = None
    eps: Optional[str] = None
    tol: str = "1/1000000000000"
    seed: int = 0
    perturb: bool = False
    input: Optional[str] = None
    output: Optional[str] = None
    svg: Optional[str] = None
    mode: str = "solve"
    strict: bool = False

    def validate(self) -> None:
        if self.problem in ("kmm", "kmm-approx") and self.k is None:
            raise ParseError(f"--k is required for problem {self.problem}")
        if self.problem == "kmm-approx" and self.eps is None:
            raise ParseError("--eps is required for problem kmm-approx")
        if self.problem != "kmm-approx" and self.eps is not None:
            raise ParseError("--eps only applies to kmm-approx")


def _load(cfg: RunConfig, strict: bool = False) -> list[LabeledPoint]:
    pts = dataio.load_points(cfg.input)
    if cfg.perturb:
        pts = perturb_points(pts)
    validate_points(pts, strict=strict or cfg.perturb)
    return pts


def _emit(cfg: RunConfig, doc: dict) -> None:
    text = json.dumps(doc)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _line_doc(line) -> dict:
    return {"m": rat_str(line.m), "c": rat_str(line.c)}


def _solve_2d(cfg: RunConfig, pts, use_oracle: bool) -> tuple[dict, int]:
    if cfg.problem == "maxstrip":
        res = max_margin_static(pts)
        if res.status is StripStatus.SEPARABLE:
            return {
                "status": "ok", "problem": "maxstrip",
                "width_sq": rat_str(res.width_sq),
                "width": sqrt_decimal_str(res.width_sq),
                "line": _line_doc(res.separator.line),
                "orientation": res.separator.orientation.value,
                "witness": list(res.witness),
            }, EXIT_OK
        return {"status": "not-separable" if res.status is StripStatus.NOT_SEPARABLE
                else "empty-side", "problem": "maxstrip"}, EXIT_INFEASIBLE

    if cfg.problem == "minmis":
        if use_oracle:
            rep = oracle_minmis(pts)
            return {"status": "ok", "problem": "minmis", "k_min": rep.value}, EXIT_OK
        best = None
        for orient in (Orientation.BLUE_ABOVE, Orientation.RED_ABOVE):
            reds, blues = split_colors(pts)
            if orient is Orientation.RED_ABOVE:
                reds, blues = blues, reds
            cs = ConstraintSet(duals(reds), duals(blues))
            km, res = static_min_violations(cs)
            if best is None or km < best[0]:
                best = (km, res, orient)
        km, res, orient = best
        doc = {"status": "ok", "problem": "minmis", "k_min": km,
               "orientation": orient.value}
        if res.status is LPStatus.FEASIBLE:
            doc["line"] = {"m": rat_str(res.point.x), "c": rat_str(-res.point.y)}
        return doc, EXIT_OK

    if cfg.problem in ("minmax", "kmm"):
        k = len(pts) if cfg.problem == "minmax" else cfg.k
        if use_oracle:
            rep = oracle_kmm(pts, k)
            if rep.value is None:
                return {"status": "infeasible", "problem": cfg.problem,
                        "k_min": oracle_minmis(pts).value}, EXIT_INFEASIBLE
            sep = rep.witness["separator"]
            return {
                "status": "ok", "problem": cfg.problem,
                "mis": rep.witness["mis"], "max_sq": rat_str(rep.value),
                "max": sqrt_decimal_str(rep.value),
                "line": _line_doc(sep.line), "orientation": sep.orientation.value,
                "counts": {"candidates": rep.stats["candidates"]},
                "k_min": oracle_minmis(pts).value,
            }, EXIT_OK
        rep = solve_exact(pts, k)
        if rep.best is None:
            return {"status": "infeasible", "problem": cfg.problem,
                    "k_min": rep.k_min}, EXIT_INFEASIBLE
        return {
            "status": "ok", "problem": cfg.problem,
            "mis": rep.mis, "max_sq": rat_str(rep.max_sq),
            "max": sqrt_decimal_str(rep.max_sq),
            "line": _line_doc(rep.best.line),
            "orientation": rep.orientation.value,
            "k_min": rep.k_min, "counts": rep.counts,
        }, EXIT_OK

    # kmm-approx
    try:
        rep = solve_approx(pts, cfg.k, rat(cfg.eps), rat(cfg.tol))
    except Infeasible:
        k_min = solve_exact(pts, len(pts)).k_min
        return {"status": "infeasible", "problem": "kmm-approx",
                "k_min": k_min}, EXIT_INFEASIBLE
    return {
        "status": "ok", "problem": "kmm-approx",
        "mis": rep.mis, "max_sq": rat_str(rep.euclid_max_sq),
        "max": sqrt_decimal_str(rep.euclid_max_sq),
        "line": _line_doc(rep.separator.line),
        "orientation": rep.separator.orientation.value,
        "eps": rat_str(rep.eps), "t": rep.t,
        "approx_err": rat_str(rep.approx_err), "wedge": rep.wedge,
    }, EXIT_OK


def _solve_1d(cfg: RunConfig, pts, use_oracle: bool) -> tuple[dict, int]:
    pts1 = [Point1D(p.point.x, p.color, p.id) for p in pts]
    k = cfg.k if cfg.k is not None else len(pts1)
    if use_oracle:
        rep = oracle_1d(pts1, k)
        if rep.value is None:
            return {"status": "infeasible", "problem": "kmm-1d",
                    "dim": 1, "k_min": 0}, EXIT_INFEASIBLE
        w = rep.witness or {}
        return {"status": "ok", "problem": "kmm-1d", "dim": 1,
                "separator_x": rat_str(w["separator_x"]) if w else None,
                "mis": w.get("mis", 0),
                "max_dist": rat_str(rep.value)}, EXIT_OK
    t = Tree1D()
    for p in pts1:
        t.insert(p)
    res = t.query(k)
    if res is None:
        return {"status": "infeasible", "problem": "kmm-1d", "dim": 1,
                "k_min": t.min_mis()}, EXIT_INFEASIBLE
    return {"status": "ok", "problem": "kmm-1d", "dim": 1,
            "separator_x": None if res.separator_x is None
            else rat_str(res.separator_x),
            "mis": res.mis, "max_dist": rat_str(res.max_dist)}, EXIT_OK


def cmd_solve(cfg: RunConfig, use_oracle: bool = False) -> int:
    cfg.validate()
    pts = _load(cfg, strict=cfg.strict)
    if not pts:
        raise ParseError("empty dataset")
    if cfg.dim == 1:
        doc, code = _solve_1d(cfg, pts, use_oracle)
    else:
        doc, code = _solve_2d(cfg, pts, use_oracle)
    _emit(cfg, doc)
    return code


def cmd_simulate(cfg: RunConfig, verify: bool) -> int:
    """Drive the semi-online LP structure over a JSONL update stream."""
    k = cfg.k if cfg.k is not None else 0
    with open(cfg.input, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    out_lines = []
    st = DynState(ConstraintSet([], []), {}, k)
    live_red: dict[int, DLine] = {}
    live_blue: dict[int, DLine] = {}
    next_id = 0
    for ln in lines:
        try:
            op = json.loads(ln)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad stream line: {exc}") from exc
        if op["op"] == "insert":
            line = DLine(op.get("id", next_id), rat(str(op["m"])), rat(str(op["c"])))
            next_id = max(next_id, line.id) + 1
            color = Color.RED if op["color"] == "R" else Color.BLUE
            st.insert(line, color, op.get("delete_at"))
            (live_red if color is Color.RED else live_blue)[line.id] = line
        elif op["op"] == "delete":
            id_ = op["id"]
            if id_ in live_red:
                del live_red[id_]
            elif id_ in live_blue:
                del live_blue[id_]
            else:
                raise UnknownId(f"no live line {id_}")
            st.delete(id_)
        elif op["op"] == "query":
            res = st.query(min(op.get("k", k), k))
            out_lines.append(_lp_doc(res, st.u))
            continue
        else:
            raise ParseError(f"unknown op {op['op']!r}")
        res = st.query(k)
        out_lines.append(_lp_doc(res, st.u))
        if verify:
            want = static_leftmost_valid(
                ConstraintSet(list(live_red.values()), list(live_blue.values())), k
            )
            if (res.status, res.point, res.violations) != (
                want.status, want.point, want.violations
            ):
                raise AssertionError(
                    f"simulate verify failed at update {st.u}: {res} != {want}"
                )
    text = "\n".join(json.dumps(d) for d in out_lines)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text + ("\n" if text else ""))
    elif text:
        print(text)
    return EXIT_OK


def _lp_doc(res, u) -> dict:
    doc = {"update": u, "status": res.status.value}
    if res.point is not None:
        doc["point"] = {"x": rat_str(res.point.x), "y": rat_str(res.point.y)}
        doc["violations"] = res.violations
    if res.reason:
        doc["reason"] = res.reason
    return doc


def cmd_bench(cfg: RunConfig, sizes: list[int]) -> int:
    import random

    rng = random.Random(cfg.seed)
    rows = ["n,k,solver,wall_time,candidates"]
    for n in sizes:
        pts = _random_instance(rng, n)
        k = cfg.k if cfg.k is not None else 8
        t0 = time.perf_counter()
        rep = solve_exact(pts, k)
        dt = time.perf_counter() - t0
        rows.append(
            f"{n},{k},exact,{dt:.6f},{sum(rep.counts.values())}"
        )
    text = "\n".join(rows)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _random_instance(rng, n: int) -> list[LabeledPoint]:
    pts = []
    used_x, used_y = set(), set()
    while len(pts) < n:
        x = rng.randint(-100000, 100000)
        y = rng.randint(-100000, 100000)
        if x in used_x or y in used_y:
            continue
        used_x.add(x)
        used_y.add(y)
        color = Color.RED if rng.random() < 0.5 else Color.BLUE
        pts.append(LabeledPoint.of(x, y + (1 if color is Color.BLUE else 0), color,
                                   len(pts)))
    return pts


def cmd_plot(cfg: RunConfig) -> int:
    from .svg import plot_overlay

    pts = _load(cfg)
    if not pts:
        raise ParseError("empty dataset")
    reds, blues = split_colors(pts)
    if not reds or not blues:
        raise ParseError("plot requires both colors")
    k = cfg.k if cfg.k is not None else 1
    overlay = overlay_and_label(duals(reds), duals(blues), k)
    curve = minmax_curve(pts)
    rep = solve_exact(pts, k)
    svg, _ = plot_overlay(pts, overlay, curve, rep.best)
    path = cfg.svg or (cfg.input + ".svg")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sepkit", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, needs_input=True):
        sp.add_argument("--problem", choices=PROBLEMS, default="kmm")
        sp.add_argument("--dim", type=int, choices=(1, 2), default=2)
        sp.add_argument("--k", type=int)
        sp.add_argument("--eps")
        sp.add_argument("--tol", default="1/1000000000000")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--perturb", action="store_true")
        sp.add_argument("--strict", action="store_true",
                        help="enforce full general position at ingestion")
        sp.add_argument("--out")
        sp.add_argument("--svg")
        if needs_input:
            sp.add_argument("input")

    common(sub.add_parser("solve", help="solve one instance"))
    common(sub.add_parser("oracle", help="solve via the brute-force oracle"))
    sim = sub.add_parser("simulate", help="drive the semi-online LP structure")
    common(sim)
    sim.add_argument("--verify", action="store_true",
                     help="re-solve statically after every update")
    ben = sub.add_parser("bench", help="timing CSV over random instances")
    common(ben, needs_input=False)
    ben.add_argument("--sizes", default="100,200,400")
    common(sub.add_parser("plot", help="render the dual overlay as SVG"))
    return p


def _config_from(args) -> RunConfig:
    seed = int(os.environ.get("SEPKIT_SEED", args.seed))
    cfg = RunConfig(
        problem=args.problem, dim=args.dim, k=args.k, eps=args.eps,
        tol=args.tol, seed=seed, perturb=args.perturb,
        input=getattr(args, "input", None), output=args.out, svg=args.svg,
        mode=args.cmd,
    )
    cfg.strict = getattr(args, "strict", False)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        cfg = _config_from(args)
        if args.cmd == "solve":
            return cmd_solve(cfg)
        if args.cmd == "oracle":
            return cmd_solve(cfg, use_oracle=True)
        if args.cmd == "simulate":
            return cmd_simulate(cfg, args.verify)
        if args.cmd == "bench":
            sizes = [int(s) for s in args.sizes.split(",") if s]
            return cmd_bench(cfg, sizes)
        if args.cmd == "plot":
            return cmd_plot(cfg)
        return EXIT_USAGE
    except (ParseError, ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ScheduleViolation, UnknownId) as exc:
        print(f"schedule violation: {exc}", file=sys.stderr)
        return EXIT_SCHEDULE
    except AssertionError as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except SepkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
