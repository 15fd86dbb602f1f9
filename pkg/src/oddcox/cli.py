"""Command-line entry point: classify, construct, verify, search, render."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .chambers import DEFAULT_NODE_BUDGET, search_coxeter_polytopes
from .constructor import (
    Certificate,
    CertificateFormatError,
    VerificationError,
    construct,
    parse_certificate,
    verify_certificate_data,
)
from .criterion import Verdict, classify
from .diagrams import CoxeterMatrix, MatrixError, parse_coxeter_matrix
from .render import RenderError, SceneParams, render_rank3
from .words import DEFAULT_LENGTH_CAP, CoxeterGroup, LengthCapExceeded, WordError, format_word

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2

THREADS_ENV = "ODDCOX_THREADS"


class InputError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


def _read_system(path: str) -> CoxeterMatrix:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError("io", f"{path}: {exc.strerror}") from None
    try:
        return parse_coxeter_matrix(text)
    except MatrixError as exc:
        raise InputError("matrix", f"{path}: {exc}") from None


def _read_certificate(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError("io", f"{path}: {exc.strerror}") from None
    try:
        return parse_certificate(text)
    except CertificateFormatError as exc:
        raise InputError("certificate", f"{path}: {exc}") from None


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError("io", f"{path}: {exc.strerror}") from None


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise InputError("environment", f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _verdict_json(v: Verdict) -> dict:
    out = {
        "answer": v.answer.value,
        "reason": v.reason.value,
        "component": list(v.component),
        "summary": v.describe(),
    }
    if v.component_reason is not None:
        out["component_reason"] = v.component_reason.value
    if v.triangle is not None:
        out["triangle"] = list(v.triangle)
    if v.forbidden:
        out["forbidden"] = [
            {
                "vertices": list(f.vertices),
                "labels": [[i, j, "inf" if lab is None else lab] for (i, j), lab in f.labels.items()],
            }
            for f in v.forbidden
        ]
    return out


def _certificate_json(c: Certificate) -> dict:
    return {
        "index": c.index,
        "provenance": c.provenance.value,
        "verified": c.verified,
        "generators": [format_word(r.word) for r in c.generators],
        "chambers": [format_word(w) for w in c.chamber_words()],
    }


# -- commands ------------------------------------------------------------------


def cmd_classify(args) -> tuple[dict, list[str]]:
    verdict = classify(_read_system(args.system))
    return _verdict_json(verdict), [verdict.describe()]


def cmd_construct(args) -> tuple[dict, list[str]]:
    system = _read_system(args.system)
    outcome = construct(system, args.length_cap)
    if isinstance(outcome, Verdict):
        return {"verdict": _verdict_json(outcome)}, [outcome.describe()]
    if args.out:
        _write(args.out, outcome.to_text())
    lines = [
        f"certificate: index {outcome.index}, {len(outcome.generators)} bounding reflections, "
        f"construction {outcome.provenance.value}, verified"
    ]
    if args.out:
        lines.append(f"written to {args.out}")
    else:
        lines.append(outcome.to_text().rstrip("\n"))
    return {"certificate": _certificate_json(outcome)}, lines


def cmd_verify(args) -> tuple[dict, list[str]]:
    system = _read_system(args.system)
    data = _read_certificate(args.certificate)
    outcome = verify_certificate_data(system, data, args.radius, args.length_cap)
    result = {"pass": outcome.ok, "stage": outcome.stage, "message": outcome.message}
    if outcome.tiling is not None:
        t = outcome.tiling
        result["tiling"] = {
            "radius": t.radius,
            "chambers_checked": t.region_size,
            "translates": t.translates,
            "covered": t.covered,
            "overlap": t.overlap,
            "index": t.index,
        }
    if not outcome.ok:
        raise InputError("verification-failed", f"certificate rejected at {outcome.stage}: {outcome.message}")
    t = outcome.tiling
    return result, [f"PASS: index {data.index}, tiling confirmed on {t.region_size} chambers (radius {t.radius})"]


def cmd_search(args) -> tuple[dict, list[str]]:
    system = _read_system(args.system)
    group = CoxeterGroup(system, args.length_cap)
    res = search_coxeter_polytopes(group, args.max_size, args.radius, args.node_budget)
    found = [[format_word(w) for w in I.words()] for I in res.polytopes]
    result = {
        "status": res.status,
        "max_size": args.max_size,
        "radius": args.radius,
        "expansions": res.expansions,
        "polytopes": found,
    }
    verdict = classify(system)
    baseline = None
    if verdict.has_subgroup:
        outcome = construct(system, args.length_cap)
        baseline = outcome.index
        result["construction_index"] = baseline
        result["smaller_than_construction"] = [p for p in found if len(p) < baseline]
    if not found:
        lines = [f"none up to size {args.max_size} ({res.status})"]
    else:
        lines = [f"{len(found)} Coxeter polytope(s) up to size {args.max_size} ({res.status})"]
        for p in found:
            note = ""
            if baseline is not None and len(p) < baseline:
                note = "  [smaller than construction]"
            lines.append(f"  size {len(p)}: " + ", ".join(p) + note)
    return result, lines


def cmd_render(args) -> tuple[dict, list[str]]:
    system = _read_system(args.system)
    highlight = frozenset()
    if args.highlight:
        highlight = frozenset(_read_certificate(args.highlight).chambers)
    try:
        svg = render_rank3(system, SceneParams(args.depth, highlight, args.canvas))
    except RenderError as exc:
        raise InputError("render", str(exc)) from None
    if args.out:
        _write(args.out, svg)
        return {"out": args.out, "bytes": len(svg.encode())}, [f"wrote {args.out}"]
    return {"bytes": len(svg.encode())}, [svg.rstrip("\n")]


# -- plumbing ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oddcox",
        description="Finite-index reflection subgroups of odd-angled Coxeter groups.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument(
        "--length-cap", type=int, default=DEFAULT_LENGTH_CAP, help="longest element the word engine may build"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="decide existence from the divisibility diagram")
    p.add_argument("system", help="Coxeter matrix file")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("construct", parents=[common], help="build and verify a fundamental domain")
    p.add_argument("system", help="Coxeter matrix file")
    p.add_argument("--out", help="certificate file to write")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common], help="re-check an untrusted certificate")
    p.add_argument("system", help="Coxeter matrix file")
    p.add_argument("certificate", help="certificate file from construct")
    p.add_argument("--radius", type=int, help="ball radius for the tiling check (default 2*maxlen+2)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", parents=[common], help="exhaustive search for small Coxeter polytopes")
    p.add_argument("system", help="Coxeter matrix file")
    p.add_argument("--max-size", type=int, default=8, help="largest chamber set tried (default 8)")
    p.add_argument("--radius", type=int, default=8, help="ball radius for candidate chambers (default 8)")
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET, help="search nodes before truncating")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("render", parents=[common], help="draw a rank-3 tessellation as SVG")
    p.add_argument("system", help="Coxeter matrix file")
    p.add_argument("--depth", type=int, default=6, help="word length of the drawn ball (default 6)")
    p.add_argument("--highlight", help="certificate whose chambers are filled in")
    p.add_argument("--canvas", type=int, default=800, help="SVG width and height in pixels (default 800)")
    p.add_argument("--out", help="SVG file to write")
    p.set_defaults(func=cmd_render)
    return parser


def _validate(args) -> None:
    if args.length_cap < 1:
        raise InputError("usage", "--length-cap must be >= 1")
    for name in ("radius", "max_size", "node_budget", "depth", "canvas"):
        value = getattr(args, name, None)
        if value is not None and value < 0:
            raise InputError("usage", f"--{name.replace('_', '-')} must be >= 0")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    report = {"command": args.command, "argv": list(argv if argv is not None else sys.argv[1:])}
    start = time.perf_counter()
    code = EXIT_OK
    lines: list[str] = []
    try:
        _validate(args)
        report["threads"] = _threads()
        result, lines = args.func(args)
        report["status"] = "ok"
        report["result"] = result
    except InputError as exc:
        code = EXIT_INPUT
        report["status"] = "error"
        report["error"] = {"code": exc.code, "message": str(exc)}
    except (LengthCapExceeded, WordError, RenderError) as exc:
        code = EXIT_INPUT
        report["status"] = "error"
        report["error"] = {"code": "input", "message": str(exc)}
    except VerificationError as exc:
        code = EXIT_INTERNAL
        report["status"] = "error"
        report["error"] = {"code": "internal-verification", "message": str(exc)}
    report["timings"] = {"total_seconds": round(time.perf_counter() - start, 6)}
    report["version"] = __version__
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    elif code == EXIT_OK:
        print("\n".join(lines))
    else:
        print(f"error: {report['error']['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
