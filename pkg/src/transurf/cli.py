"""Command line interface.

Every subcommand prints an aligned table by default and canonical JSON with
``--json``.  Exit status is 0 on success (undetermined results included),
1 on invalid input and 2 when a verification fails.
"""

from __future__ import annotations

import argparse
import ast
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .exactfield import FieldElement, NumberField
from .family import (FamilyError, Origami, build_xn, origami6, origami_cusps, origami_surface,
                     theta_report, verify_xn)
from .flatsurf import TranslationSurface, Vec, stratum, validate
from .flow import (ConfigurationError, DEFAULT_BUDGET, NAMES, classify_configuration, configuration_signature,
                   decompose, enumerate_cp_directions, weierstrass_count)
from .invariants import certify_direction, saf_direction
from .render import render

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CHECK = 2
SCHEMA_VERSION = 1


class InputError(ValueError):
    pass


def default_budget() -> int:
    raw = os.environ.get("FLATSURF_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"FLATSURF_BUDGET must be an integer, got {raw!r}")
    if value <= 0:
        raise InputError("FLATSURF_BUDGET must be positive")
    return value


# ---------------------------------------------------------------------------
# canonical JSON


def _plain(obj):
    if isinstance(obj, Fraction):
        return [obj.numerator, obj.denominator]
    if isinstance(obj, FieldElement):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def canonical_json(obj) -> str:
    """Sorted keys, two-space indent, rationals as [num, den]."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def table(rows: Sequence[Sequence], headers: Sequence[str]) -> str:
    cells = [[str(h) for h in headers]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# inputs


def load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not JSON: {e}")


def surface_from_json(obj: dict) -> TranslationSurface:
    """A surface file, or an origami given as {h, v}."""
    try:
        if "polygons" in obj:
            return TranslationSurface.from_json(obj)
        if "h" in obj and "v" in obj:
            return origami_surface(Origami.from_json(obj))
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise InputError(f"malformed surface: {e}")
    raise InputError("expected a surface (polygons, gluings) or an origami (h, v)")


def load_surface(path: str) -> TranslationSurface:
    return surface_from_json(load_json(path))


def load_origami(path: str) -> Origami:
    obj = load_json(path)
    try:
        return Origami.from_json(obj)
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"malformed origami: {e}")


_BINOPS: Dict[type, Callable] = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
}


def parse_scalar(text: str, K: NumberField) -> FieldElement:
    """Rational expression in the field generator, written ``a`` or ``alpha``."""
    try:
        tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
    except SyntaxError:
        raise InputError(f"cannot parse {text!r}")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return K(node.value)
        if isinstance(node, ast.Name) and node.id in ("a", "alpha"):
            if K.degree == 1:
                raise InputError("the surface is defined over Q; it has no generator")
            return K.gen
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
            e = node.right
            if isinstance(e, ast.Constant) and isinstance(e.value, int) and e.value >= 0:
                return ev(node.left) ** e.value
        raise InputError(f"unsupported expression {text!r}")

    try:
        return ev(tree)
    except ZeroDivisionError:
        raise InputError(f"division by zero in {text!r}")


def parse_direction(text: str, K: NumberField) -> Vec:
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError(f"direction must be X,Y, got {text!r}")
    v = Vec(parse_scalar(parts[0], K), parse_scalar(parts[1], K))
    if v.x.is_zero() and v.y.is_zero():
        raise InputError("direction must be non-zero")
    return v


def parse_range(text: str) -> List[int]:
    try:
        a, b = (int(x) for x in text.split(".."))
    except ValueError:
        raise InputError(f"range must be A..B, got {text!r}")
    if a < 1 or b < a:
        raise InputError(f"empty or non-positive range {text!r}")
    return list(range(a, b + 1))


# ---------------------------------------------------------------------------
# subcommands; each returns (payload, human text, exit status)


Result = Tuple[dict, str, int]


def _emit_surface(s: TranslationSurface, out: Optional[str], extra: dict) -> Result:
    data = s.to_json()
    if out is None:
        return data, canonical_json(data), EXIT_OK
    with open(out, "w") as fh:
        fh.write(canonical_json(data))
    st = stratum(s)
    summary = dict(extra, version=SCHEMA_VERSION, path=out, polygons=len(s.polygons), genus=st.genus,
                   stratum=list(st.orders))
    rows = [(k, summary[k]) for k in sorted(summary)]
    return summary, table(rows, ["field", "value"]), EXIT_OK


def cmd_build_family(args) -> Result:
    if args.n < 1:
        raise InputError("--n must be at least 1")
    fd, s = build_xn(args.n)
    return _emit_surface(s, args.output, {"command": "build-family", "n": args.n})


def cmd_build_origami(args) -> Result:
    o = origami6()
    if args.surface:
        return _emit_surface(origami_surface(o), args.output, {"command": "build-origami"})
    data = dict(o.to_json(), version=SCHEMA_VERSION)
    if args.output is not None:
        with open(args.output, "w") as fh:
            fh.write(canonical_json(data))
    return data, canonical_json(data), EXIT_OK


def cmd_validate(args) -> Result:
    s = load_surface(args.file)
    rep = validate(s)
    data = {"command": "validate", "version": SCHEMA_VERSION, "valid": rep.valid, "errors": rep.errors,
            "genus": rep.genus, "stratum": None}
    if rep.valid:
        data["stratum"] = list(stratum(s).orders)
    rows = [("valid", rep.valid), ("genus", rep.genus), ("stratum", data["stratum"])]
    rows += [("error", e) for e in rep.errors]
    return data, table(rows, ["field", "value"]), EXIT_OK if rep.valid else EXIT_CHECK


def _decompose(args):
    s = load_surface(args.file)
    d = parse_direction(args.dir, s.field)
    return s, d, decompose(s, d, args.budget)


def _cylinder_rows(dec) -> List[tuple]:
    rows = []
    for c in dec.cylinders:
        inv = "?" if c.fixed is None else ("fixed" if c.fixed else f"-> {c.image}")
        rows.append((c.id, f"{float(c.circumference):.6g}", f"{float(c.height):.6g}",
                     f"{float(c.ratio):.6g}", "yes" if c.simple else "no", inv))
    return rows


def cmd_decompose(args) -> Result:
    s, d, dec = _decompose(args)
    data = dict(dec.to_json(), command="decompose", weierstrass_points=weierstrass_count(dec),
                area=dec.area().to_json() if dec.complete else None)
    text = f"status: {dec.status}\n" + table(_cylinder_rows(dec), ["cyl", "c", "h", "c/h", "simple", "involution"])
    return data, text, EXIT_OK


def cmd_classify(args) -> Result:
    s, d, dec = _decompose(args)
    data = {"command": "classify", "version": SCHEMA_VERSION, "direction": dec.direction.to_json(),
            "status": dec.status, "label": None, "name": None, "signature": None, "reason": None}
    if not dec.complete:
        data["reason"] = "decomposition incomplete within budget"
    else:
        try:
            data["signature"] = configuration_signature(dec).to_json()
            data["label"] = classify_configuration(dec)
            data["name"] = NAMES.get(data["label"])
        except ConfigurationError as e:
            data["reason"] = str(e)
    rows = [(k, data[k]) for k in ("status", "label", "name", "reason")]
    return data, table(rows, ["field", "value"]), EXIT_OK


def cmd_saf(args) -> Result:
    s = load_surface(args.file)
    d = parse_direction(args.dir, s.field)
    w = saf_direction(s, d)
    data = {"command": "saf", "version": SCHEMA_VERSION, "saf": w.to_json(), "saf_zero": w.is_zero()}
    return data, table([("saf", repr(w)), ("saf_zero", w.is_zero())], ["field", "value"]), EXIT_OK


def cmd_certify(args) -> Result:
    s = load_surface(args.file)
    d = parse_direction(args.dir, s.field)
    cert = certify_direction(s, d, args.budget)
    data = dict(cert.to_json(), command="certify")
    return data, table([("status", cert.status), ("step", cert.step)], ["field", "value"]), EXIT_OK


def _family_entry(n: int, theta: bool, budget: int) -> dict:
    rep = verify_xn(n, budget)
    out = rep.to_json()
    if theta:
        out["theta"] = theta_report(n, budget).to_json()
    return out


def cmd_verify_family(args) -> Result:
    ns = parse_range(args.n_range)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            reports = list(ex.map(_family_entry, ns, [args.theta] * len(ns), [args.budget] * len(ns)))
    else:
        reports = [_family_entry(n, args.theta, args.budget) for n in ns]
    ok = all(r["ok"] and ("theta" not in r or r["theta"]["ok"]) for r in reports)
    data = {"command": "verify-family", "version": SCHEMA_VERSION, "ok": ok, "reports": reports}
    rows = []
    for r in reports:
        failed = [c["name"] for c in r["checks"] if c["status"] != "pass"]
        th = "" if "theta" not in r else ("pass" if r["theta"]["ok"] else "fail")
        rows.append((r["n"], "pass" if r["ok"] else "fail", r["trace_degree"], r["factorization"], th,
                     ", ".join(failed)))
    text = table(rows, ["n", "checks", "trace degree", "P_n", "theta", "failed"])
    return data, text, EXIT_OK if ok else EXIT_CHECK


def cmd_origami_cusps(args) -> Result:
    rep = origami_cusps(load_origami(args.file))
    data = dict(rep.to_json(), command="origami-cusps", version=SCHEMA_VERSION)
    rows = [(k, r.to_json()["h"], r.to_json()["v"], w) for k, (r, w) in enumerate(zip(rep.representatives, rep.widths))]
    text = f"cusps: {rep.cusps}, orbit size: {rep.orbit_size}\n" + table(rows, ["cusp", "h", "v", "width"])
    return data, text, EXIT_OK


def cmd_enumerate(args) -> Result:
    s = load_surface(args.file)
    length = parse_scalar(args.length, s.field)
    found = enumerate_cp_directions(s, length, args.budget)
    data = {"command": "enumerate", "version": SCHEMA_VERSION, "length": length.to_json(),
            "count": len(found), "directions": [e.to_json() for e in found]}
    rows = [(f"{e.direction.approx()[0]:.6g}", f"{e.direction.approx()[1]:.6g}", len(e.decomposition.cylinders),
             e.label or "-") for e in found]
    return data, table(rows, ["x", "y", "cylinders", "label"]), EXIT_OK


def cmd_render(args) -> Result:
    s = load_surface(args.file)
    dec = None
    if args.dir is not None:
        dec = decompose(s, parse_direction(args.dir, s.field), args.budget)
    svg = render(s, dec)
    with open(args.svg, "w") as fh:
        fh.write(svg)
    data = {"command": "render", "version": SCHEMA_VERSION, "path": args.svg,
            "polygons": len((dec.model if dec else s).polygons),
            "cylinders": None if dec is None else len(dec.cylinders)}
    return data, table([(k, data[k]) for k in ("path", "polygons", "cylinders")], ["field", "value"]), EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _budget(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"budget must be an integer, got {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError("budget must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="transurf", description="Exact computations on translation surfaces.")
    p.add_argument("--json", action="store_true", help="print canonical JSON")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print canonical JSON")
        sp.set_defaults(func=func)
        return sp

    sp = add("build-family", cmd_build_family, "build the surface X_n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("-o", "--output")
    sp = add("build-origami", cmd_build_origami, "write the 6-square origami")
    sp.add_argument("--surface", action="store_true", help="write the polygon surface instead of {h, v}")
    sp.add_argument("-o", "--output")
    sp = add("validate", cmd_validate, "validate a surface file")
    sp.add_argument("file")
    for name, func, text in (("decompose", cmd_decompose, "cylinder decomposition in a direction"),
                             ("classify", cmd_classify, "configuration label of a direction"),
                             ("saf", cmd_saf, "SAF invariant of a direction"),
                             ("certify", cmd_certify, "decide complete periodicity of a direction")):
        sp = add(name, func, text)
        sp.add_argument("file")
        sp.add_argument("--dir", required=True, help="direction X,Y; 'a' is the field generator")
        sp.add_argument("--budget", type=_budget, default=None)
    sp = add("verify-family", cmd_verify_family, "run the exact checks on X_n")
    sp.add_argument("--n-range", required=True, help="A..B")
    sp.add_argument("--theta", action="store_true", help="also check the direction (alpha, n)")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--budget", type=_budget, default=None)
    sp = add("origami-cusps", cmd_origami_cusps, "cusps of the Veech group of an origami")
    sp.add_argument("file")
    sp = add("enumerate", cmd_enumerate, "completely periodic directions up to a length")
    sp.add_argument("file")
    sp.add_argument("--length", default="10")
    sp.add_argument("--budget", type=_budget, default=None)
    sp = add("render", cmd_render, "draw a surface as SVG")
    sp.add_argument("file")
    sp.add_argument("--dir")
    sp.add_argument("--svg", required=True)
    sp.add_argument("--budget", type=_budget, default=None)
    return p


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    try:
        if hasattr(args, "budget") and args.budget is None:
            args.budget = default_budget()
        data, text, status = args.func(args)
    except (InputError, FamilyError) as e:
        print(f"error: {e}", file=stderr)
        return EXIT_INPUT
    stdout.write(canonical_json(data) if args.json else text)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
