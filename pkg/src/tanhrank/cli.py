"""Command-line interface over JSON documents.

Exit codes: 0 success / affirmative decision, 1 negative decision,
2 usage or document-format error, 3 size limit exceeded.

Output on stdout is byte-stable across runs on the same input; timing lives
only in the optional --report file.  Rationals print as p/q strings; the only
floating-point output is the SVG emitted by `plot`.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction

from . import cover as cov
from . import gadgets as gad
from . import params as par
from . import proximate as prox
from . import reductions as red
from .compress import (
    compress,
    compress_biasless,
    compressed_to_json,
    rank,
    rank_biasless,
)
from .params import FORMAT, FormatError, LimitError, rat, rat_str


class _Negative(Exception):
    """Signals a negative decision (exit code 1)."""


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e}") from e


def _load_parameter(text: str):
    """Parameter, BiaslessParameter, or embedded reduction output.

    Returns (parameter, embedded_eps, embedded_r); the latter two are None
    for bare parameter documents.
    """
    doc = json.loads(text)
    if isinstance(doc, dict) and "parameter" in doc:
        inner = json.dumps(doc["parameter"])
        eps = rat(doc["eps"]) if "eps" in doc else None
        r = int(doc["r"]) if "r" in doc else None
        return _load_parameter(inner)[0], eps, r
    if isinstance(doc, dict) and "n" in doc:
        return par.parameter_from_json(text), None, None
    return par.biasless_from_json(text), None, None


def _eps_arg(args, embedded=None) -> Fraction:
    if args.eps is not None:
        return rat(args.eps)
    if embedded is not None:
        return embedded
    raise FormatError("--eps is required")


def _emit(text: str, report: dict) -> None:
    sys.stdout.write(text)
    report["outputs"]["stdout_sha256"] = hashlib.sha256(text.encode()).hexdigest()


# --- subcommand implementations ----------------------------------------------


def _cmd_compress(args, report):
    w, _, _ = _load_parameter(_read(args.param))
    if isinstance(w, par.BiaslessParameter):
        out = par.biasless_to_json(compress_biasless(w))
    else:
        out = compressed_to_json(compress(w))
    _emit(out, report)
    return 0


def _cmd_rank(args, report):
    w, _, _ = _load_parameter(_read(args.param))
    value = (
        rank_biasless(w) if isinstance(w, par.BiaslessParameter) else rank(w)
    )
    report["outputs"]["rank"] = value
    _emit(f"{value}\n", report)
    return 0


def _cmd_prank_bound(args, report):
    w, embedded_eps, _ = _load_parameter(_read(args.param))
    if isinstance(w, par.BiaslessParameter):
        raise FormatError("greedy bound needs a biased parameter document")
    eps = _eps_arg(args, embedded_eps)
    g = prox.greedy_bound(eps, w)
    doc = {
        "format": FORMAT,
        "bound": g.bound,
        "eliminated": [i + 1 for i in g.eliminated],
        "groups": [[i + 1 for i in grp] for grp in g.groups],
        "starters": [[rat_str(x) for x in v] for v in g.starters],
        "merged": [[rat_str(x) for x in v] for v in g.merged],
    }
    report["outputs"]["bound"] = g.bound
    _emit(json.dumps(doc, indent=2) + "\n", report)
    return 0


def _cmd_prank_exact(args, report):
    w, embedded_eps, embedded_r = _load_parameter(_read(args.param))
    eps = _eps_arg(args, embedded_eps)
    limit = args.limit if args.limit is not None else prox.DEFAULT_UNIT_LIMIT
    if limit > prox.DEFAULT_UNIT_LIMIT:
        print(
            f"warning: unit limit {limit} above default {prox.DEFAULT_UNIT_LIMIT}; "
            "trace enumeration grows steeply",
            file=sys.stderr,
        )
    if isinstance(w, par.BiaslessParameter):
        value = prox.exact_prank_biasless(eps, w, unit_limit=limit)
    else:
        value = prox.exact_prank(eps, w, unit_limit=limit)
    report["outputs"]["prank"] = value
    _emit(f"{value}\n", report)
    r = args.r if args.r is not None else embedded_r
    if r is not None and value > r:
        raise _Negative
    return 0


def _cmd_prank_witness(args, report):
    w, embedded_eps, _ = _load_parameter(_read(args.param))
    if isinstance(w, par.BiaslessParameter):
        raise FormatError("witness construction needs a biased parameter document")
    eps = _eps_arg(args, embedded_eps)
    witness = prox.construct_witness(eps, w, prox.greedy_bound(eps, w))
    _emit(par.parameter_to_json(witness), report)
    return 0


def _cmd_cover(args, report):
    points = cov.points_from_json(_read(args.points))
    eps = rat(args.eps)
    if args.mode == "scalar":
        if points.p != 1:
            raise FormatError("scalar cover needs 1-dimensional points")
        ys = cov.solve_scalar_cover(eps, [x[0] for x in points.points])
        report["outputs"]["size"] = len(ys)
        _emit(cov.cover_points_to_json(tuple((y,) for y in ys)), report)
        size = len(ys)
    else:
        solver = cov.greedy_upp if args.mode == "greedy" else cov.solve_upp_exact
        partition = solver(points, eps)
        report["outputs"]["size"] = len(partition)
        _emit(cov.partition_to_json(partition), report)
        size = len(partition)
    if args.r is not None and size > args.r:
        raise _Negative
    return 0


def _cmd_cover_transform(args, report):
    points = cov.points_from_json(_read(args.points))
    eps = rat(args.eps)
    if args.to == "cover":
        partition = cov.partition_from_json(_read(args.object))
        cover = cov.partition_to_cover(points, partition, eps)
        _emit(cov.cover_points_to_json(cover), report)
    elif args.to == "partition":
        cover = cov.cover_points_from_json(_read(args.object))
        partition = cov.cover_to_partition(points, cover, eps)
        _emit(cov.partition_to_json(partition), report)
    else:
        graph = cov.build_graph(points, eps)
        doc = {
            "format": FORMAT,
            "n": graph.n,
            "edges": sorted([i + 1, j + 1] for i, j in graph.edges),
        }
        _emit(json.dumps(doc, indent=2) + "\n", report)
    return 0


def _cmd_verify(args, report):
    eps = rat(args.eps)
    if args.kind == "par-cert":
        w, _, _ = _load_parameter(_read(args.instance))
        cert = prox.certificate_from_json(_read(args.cert))
        if isinstance(w, par.BiaslessParameter):
            ok = prox.verify_upar_certificate(eps, args.r, w, cert)
        else:
            ok = prox.verify_par_certificate(eps, args.r, w, cert)
    else:
        points = cov.points_from_json(_read(args.instance))
        partition = cov.partition_from_json(_read(args.cert))
        ok = (
            len(partition) <= args.r
            and cov.verify_partition(points, partition, eps)
        )
    report["outputs"]["verified"] = ok
    _emit(("verified\n" if ok else "not verified\n"), report)
    if not ok:
        raise _Negative
    return 0


def _cmd_reduce(args, report):
    if args.reduction == "upc-to-par":
        inst = cov.instance_from_json(_read(args.input))
        w, eps, r = red.upc_to_par(inst)
        doc = {
            "format": FORMAT,
            "kind": "par-instance",
            "h": w.h,
            "eps": rat_str(eps),
            "r": r,
            "parameter": json.loads(par.parameter_to_json(w)),
        }
    elif args.reduction == "ssum-to-ssz":
        inst = red.ssum_from_json(_read(args.input))
        out = red.ssum_to_ssz(inst)
        _emit(red.ssz_to_json(out), report)
        return 0
    elif args.reduction == "ssz-to-upar":
        inst = red.ssz_from_json(_read(args.input))
        u, eps, r = red.ssz_to_upar(inst)
        doc = {
            "format": FORMAT,
            "kind": "upar-instance",
            "h": u.h,
            "eps": rat_str(eps),
            "r": r,
            "parameter": json.loads(par.biasless_to_json(u)),
        }
    else:  # xsat-to-upp
        if args.bundled:
            f, layout = red.load_bundled(args.bundled)
        else:
            f = red.formula_from_json(_read(args.input))
            if not args.layout:
                raise FormatError("xsat-to-upp needs --layout (or --bundled)")
            layout = red.layout_from_json(_read(args.layout))
        inst = red.xsat_to_upp(f, layout)
        _emit(cov.instance_to_json(inst), report)
        report["outputs"]["h"] = inst.points.h
        report["outputs"]["r"] = inst.budget
        return 0
    report["outputs"]["h"] = doc["h"]
    report["outputs"]["r"] = doc["r"]
    _emit(json.dumps(doc, indent=2) + "\n", report)
    return 0


def _cmd_gadget_check(args, report):
    gadgets = gad.library_from_json(_read(args.library))
    lines = []
    all_ok = True
    for g in gadgets:
        rep = gad.check_gadget(g)
        all_ok = all_ok and rep.ok
        status = "PASS" if rep.ok else "FAIL"
        detail = "" if rep.ok else f"  (C1 {'ok' if rep.c1_ok else 'FAIL'}, C2 {'ok' if rep.c2_ok else 'FAIL'})"
        lines.append(f"{status} {g.name}{detail}\n")
    _emit("".join(lines), report)
    report["outputs"]["all_ok"] = all_ok
    if not all_ok:
        raise _Negative
    return 0


def _cmd_plot(args, report):
    points = cov.points_from_json(_read(args.points))
    cover = (
        cov.cover_points_from_json(_read(args.cover)) if args.cover else ()
    )
    eps = rat(args.eps) if args.eps else None
    svg = _render_svg(points, cover, eps)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(svg)
    report["outputs"]["svg_bytes"] = len(svg)
    report["exact"] = False
    _emit(f"wrote {args.output}\n", report)
    return 0


def _render_svg(points: cov.PointSet, cover, eps) -> str:
    if points.p != 2:
        raise FormatError("plot needs 2-dimensional points")
    xs = [float(p[0]) for p in points.points] + [float(y[0]) for y in cover]
    ys = [float(p[1]) for p in points.points] + [float(y[1]) for y in cover]
    if not xs:
        xs, ys = [0.0], [0.0]
    e = float(eps) if eps else 0.0
    pad = max(e, 0.5)
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad
    width = 480.0
    scale = width / max(x1 - x0, 1e-9)
    height = (y1 - y0) * scale
    sx = lambda x: (x - x0) * scale
    sy = lambda y: height - (y - y0) * scale  # flip: grid north is up
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.2f} {height:.2f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if eps is not None:
        for y in cover:
            cxp, cyp = sx(float(y[0])), sy(float(y[1]))
            side = 2 * e * scale
            parts.append(
                f'<rect x="{cxp - side / 2:.2f}" y="{cyp - side / 2:.2f}" '
                f'width="{side:.2f}" height="{side:.2f}" fill="none" '
                'stroke="#c33" stroke-width="1"/>'
            )
    for y in cover:
        parts.append(
            f'<rect x="{sx(float(y[0])) - 3:.2f}" y="{sy(float(y[1])) - 3:.2f}" '
            'width="6" height="6" fill="#c33"/>'
        )
    for p in points.points:
        parts.append(
            f'<circle cx="{sx(float(p[0])):.2f}" cy="{sy(float(p[1])):.2f}" '
            'r="3" fill="#238"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# --- parser -------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tanhrank",
        description="Lossless compression, rank, and proximate-rank analysis "
        "for one-hidden-layer tanh networks; uniform point covers; hardness "
        "reductions.",
    )
    p.add_argument("--threads", type=int, default=1,
                   help="worker budget; results never depend on it")
    p.add_argument("--report", metavar="FILE",
                   help="write a JSON run report (includes timing) to FILE")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("compress", help="losslessly compress a parameter")
    s.add_argument("param")
    s.set_defaults(func=_cmd_compress)

    s = sub.add_parser("rank", help="rank of a parameter")
    s.add_argument("param")
    s.set_defaults(func=_cmd_rank)

    pr = sub.add_parser("prank", help="proximate rank operations")
    prs = pr.add_subparsers(dest="mode", required=True)
    s = prs.add_parser("bound", help="greedy upper bound")
    s.add_argument("--eps", required=True)
    s.add_argument("param")
    s.set_defaults(func=_cmd_prank_bound)
    s = prs.add_parser("exact", help="exact proximate rank (exhaustive)")
    s.add_argument("--eps")
    s.add_argument("--limit", type=int)
    s.add_argument("--r", type=int, help="decide prank <= r via the exit code")
    s.add_argument("param")
    s.set_defaults(func=_cmd_prank_exact)
    s = prs.add_parser("witness", help="nearby parameter achieving the greedy bound")
    s.add_argument("--eps", required=True)
    s.add_argument("param")
    s.set_defaults(func=_cmd_prank_witness)

    cv = sub.add_parser("cover", help="point cover / partition solvers")
    cvs = cv.add_subparsers(dest="mode", required=True)
    for mode, txt in (
        ("scalar", "optimal 1-D cover (eps is a radius)"),
        ("greedy", "greedy partition (eps is a diameter)"),
        ("exact", "minimum partition (eps is a diameter)"),
    ):
        s = cvs.add_parser(mode, help=txt)
        s.add_argument("--eps", required=True)
        s.add_argument("--r", type=int, help="decide size <= r via the exit code")
        s.add_argument("points")
        s.set_defaults(func=_cmd_cover, mode=mode)
    s = cvs.add_parser("transform", help="move between cover/partition/clique views")
    s.add_argument("--to", choices=("cover", "partition", "clique"), required=True)
    s.add_argument("--eps", required=True,
                   help="partition diameter (covers use radius eps/2)")
    s.add_argument("points")
    s.add_argument("object", nargs="?",
                   help="partition file (--to cover) or cover file (--to partition)")
    s.set_defaults(func=_cmd_cover_transform, mode="transform")

    vf = sub.add_parser("verify", help="verify certificates")
    vfs = vf.add_subparsers(dest="kind", required=True)
    for kind, inst_help in (
        ("par-cert", "parameter document"),
        ("upp-cert", "point-set document"),
    ):
        s = vfs.add_parser(kind)
        s.add_argument("--eps", required=True)
        s.add_argument("--r", type=int, required=True)
        s.add_argument("instance", help=inst_help)
        s.add_argument("cert")
        s.set_defaults(func=_cmd_verify, kind=kind)

    rd = sub.add_parser("reduce", help="executable reductions")
    rds = rd.add_subparsers(dest="reduction", required=True)
    for name in ("upc-to-par", "ssum-to-ssz", "ssz-to-upar"):
        s = rds.add_parser(name)
        s.add_argument("input")
        s.set_defaults(func=_cmd_reduce, reduction=name)
    s = rds.add_parser("xsat-to-upp")
    s.add_argument("input", nargs="?", help="formula document")
    s.add_argument("--layout", help="grid layout document")
    s.add_argument("--bundled", choices=("phi1", "phi2", "phi3"),
                   help="use a shipped formula/layout pair")
    s.set_defaults(func=_cmd_reduce, reduction="xsat-to-upp")

    gd = sub.add_parser("gadget", help="gadget library operations")
    gds = gd.add_subparsers(dest="mode", required=True)
    s = gds.add_parser("check", help="exhaustively check gadget contracts")
    s.add_argument("library")
    s.set_defaults(func=_cmd_gadget_check)

    s = sub.add_parser("plot", help="emit a static SVG of a point set")
    s.add_argument("points")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--cover", help="overlay covering points")
    s.add_argument("--eps", help="draw eps-squares around covering points")
    s.set_defaults(func=_cmd_plot)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    report = {
        "format": FORMAT,
        "command": args.command,
        "inputs": {},
        "outputs": {},
        "exact": True,
    }
    for attr in ("param", "points", "instance", "cert", "input", "layout",
                 "library", "object", "cover"):
        path = getattr(args, attr, None)
        if path:
            try:
                digest = hashlib.sha256(_read(path).encode()).hexdigest()
                report["inputs"][path] = f"sha256:{digest}"
            except FormatError:
                pass  # the command itself reports unreadable inputs
    start = time.perf_counter()
    try:
        code = args.func(args, report)
    except _Negative:
        code = 1
    except LimitError as e:
        print(f"error: {e}", file=sys.stderr)
        code = 3
    except (FormatError, ValueError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        code = 2
    report["timing_ms"] = round((time.perf_counter() - start) * 1000.0, 3)
    report["exit_code"] = code
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
