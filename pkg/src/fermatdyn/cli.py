"""Command-line front end with reproducible JSON reports.

Config-driven batch commands over the library: heights, orbits,
Fermat-property scans, threshold certificates, density scans, and
system validation.  Payload files are byte-identical across runs and
worker counts; timing lives only in the side manifest.

Exit codes: 0 success, 1 counterexample/validation failure, 2 config or
parse error, 3 mathematical domain error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .density import empirical_density
from .elliptic import InvalidCurveError
from .fermat import (
    Hypersurface,
    InvalidCertificateError,
    certify_threshold,
    check_fermat_property,
    scan_indices,
    verify_certificate_empirically,
)
from .forms import SingularMapError
from .heights import (
    BoundTooSmallError,
    UnsupportedSystemError,
    canonical_height,
    is_height_zero,
    min_positive_height,
)
from .parallel import effective_workers
from .points import (
    DimensionError,
    InvalidPointError,
    MultiIndex,
    ProductPoint,
    ProjectivePoint,
)
from .systems import EndoSystem, InvalidSystemError, system_from_descriptor, verify_index_law

MATH_ERRORS = (
    BoundTooSmallError,
    UnsupportedSystemError,
    InvalidCertificateError,
    InvalidCurveError,
    InvalidSystemError,
    SingularMapError,
    DimensionError,
    InvalidPointError,
    ValueError,
    ZeroDivisionError,
    ArithmeticError,
)


class ConfigError(Exception):
    """Bad command line, missing file, or unparsable input."""


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _load_system(path: str) -> EndoSystem:
    data = _load_json(path)
    try:
        return system_from_descriptor(data)
    except Exception as exc:
        raise ConfigError(f"invalid system descriptor {path}: {exc}") from exc


def _load_surface(path: str) -> Hypersurface:
    data = _load_json(path)
    try:
        return Hypersurface.from_json(data)
    except Exception as exc:
        raise ConfigError(f"invalid surface {path}: {exc}") from exc


def _load_points(path: str, system: EndoSystem):
    data = _load_json(path)
    out = []
    try:
        for entry in data:
            if len(system.dims) == 1:
                out.append(ProjectivePoint.from_json(entry))
            else:
                out.append(ProductPoint.from_json(entry))
    except Exception as exc:
        raise ConfigError(f"invalid points file {path}: {exc}") from exc
    return out


def _parse_index(text: str, system: EndoSystem):
    try:
        if "," in text:
            return MultiIndex(tuple(int(t) for t in text.split(",")))
        value = int(text)
    except ValueError as exc:
        raise ConfigError(f"bad index {text!r}") from exc
    if len(system.dims) > 1:
        return MultiIndex((value,) * len(system.dims))
    return value


def _dump_payload(path: str, payload) -> bytes:
    blob = (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode()
    Path(path).write_bytes(blob)
    return blob


def _dump_lines(path: str, rows: Sequence[dict]) -> bytes:
    blob = "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows).encode()
    Path(path).write_bytes(blob)
    return blob


def _write_manifest(out: str, args_digest: str, started: float, summary: dict) -> None:
    manifest = {
        "tool_version": __version__,
        "config_digest": args_digest,
        "wall_time_s": round(time.time() - started, 3),
        "summary": summary,
    }
    Path(out + ".manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _digest(args: argparse.Namespace) -> str:
    payload = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True, default=str).encode()).hexdigest()


# ---------------------------------------------------------------------------
# commands


def cmd_height(args) -> int:
    system = _load_system(args.system)
    points = _load_points(args.points, system)
    started = time.time()
    rows = []
    for pt in points:
        res = canonical_height(system, pt, args.tolerance,
                               index=args.index)
        row = {"point": pt.to_json()}
        row.update(res.to_json())
        rows.append(row)
    _dump_lines(args.out, rows)
    _write_manifest(args.out, _digest(args), started, {"points": len(rows)})
    return 0


def cmd_orbit(args) -> int:
    system = _load_system(args.system)
    points = _load_points(args.points, system)
    started = time.time()
    rows = []
    for pt in points:
        cert = is_height_zero(system, pt)
        rows.append({"point": pt.to_json(), "verdict": cert.verdict,
                     "certificate": cert.to_json()})
    _dump_lines(args.out, rows)
    _write_manifest(args.out, _digest(args), started, {"points": len(rows)})
    return 0


def cmd_check_fermat(args) -> int:
    system = _load_system(args.system)
    surface = _load_surface(args.surface)
    index = _parse_index(args.index, system)
    started = time.time()
    report = check_fermat_property(system, index, surface, args.bound,
                                   workers=args.workers)
    _dump_payload(args.out, report.to_json())
    if args.csv:
        lines = ["point,verdict"]
        for h in report.hits:
            lines.append(f"\"{h.point}\",{h.certificate.verdict}")
        Path(args.csv).write_text("\n".join(lines) + "\n", encoding="utf-8")
    _write_manifest(args.out, _digest(args), started,
                    {"verdict": report.verdict, "hits": len(report.hits)})
    return 0 if report.counterexample is None else 1


def cmd_certify(args) -> int:
    system = _load_system(args.system)
    surface = _load_surface(args.surface)
    source = _parse_index(args.source_index, system)
    started = time.time()
    base = check_fermat_property(system, source, surface, args.bound,
                                 workers=args.workers)
    s_points = [h.point for h in base.hits]
    if len(system.dims) == 1:
        minimum = min_positive_height(system, args.min_bound)
    else:
        minimum = [min_positive_height(f, args.min_bound)
                   for f in system.factors]
    law = {"default": None, "square": lambda m: m * m}[args.degree_law]
    cert = certify_threshold(system, s_points, minimum,
                             source_index=source, degree_law=law)
    payload = cert.to_json()
    if args.verify_samples:
        emp = verify_certificate_empirically(
            cert, system, surface, args.bound,
            workers=args.workers)
        payload["empirical"] = emp.to_json()
    _dump_payload(args.out, payload)
    _write_manifest(args.out, _digest(args), started,
                    {"threshold_index": payload["threshold_index"]})
    return 0


def cmd_scan_density(args) -> int:
    system = _load_system(args.system)
    surface = _load_surface(args.surface)
    box = [int(t) for t in args.box.split(",")]
    start = [int(t) for t in args.start.split(",")] if args.start else [1] * len(box)
    if len(box) != len(system.dims) or len(start) != len(box):
        raise ConfigError("box/start arity does not match the system")
    if (args.mode == "single") != (len(box) == 1):
        raise ConfigError("mode does not match the box arity")
    started = time.time()

    if len(box) == 1:
        indices = list(range(start[0], box[0] + 1))
    else:
        from itertools import product as iproduct
        ranges = [range(s, m + 1) for s, m in zip(start, box)]
        indices = [MultiIndex(t) for t in iproduct(*ranges)]
    reports = scan_indices(system, surface, indices, args.bound,
                           workers=args.workers)
    verdicts = {}
    for idx, rep in zip(indices, reports):
        key = str(idx) if isinstance(idx, MultiIndex) else str(idx)
        verdicts[key] = rep.counterexample is None

    def member(mi: MultiIndex) -> bool:
        key = str(mi) if len(box) > 1 else str(mi(1))
        return verdicts[key]

    def collect(mi: MultiIndex, inside: bool) -> dict:
        key = str(mi) if len(box) > 1 else str(mi(1))
        return {"index": key, "fermat_holds_within_bound": inside}

    report = empirical_density(member, box, start=start, collect=collect)
    payload = report.to_json()
    payload["search_bound"] = args.bound
    payload["note"] = "desk-scale evidence at the stated search bound, not proof"
    _dump_payload(args.out, payload)
    _write_manifest(args.out, _digest(args), started,
                    {"density": payload["density"]})
    return 0


def cmd_min_height(args) -> int:
    system = _load_system(args.system)
    started = time.time()
    result = min_positive_height(system, args.bound, tolerance=args.tolerance)
    _dump_payload(args.out, result.to_json())
    _write_manifest(args.out, _digest(args), started,
                    {"a_lower": result.a_lower, "certified": result.certified})
    return 0


def cmd_systems_validate(args) -> int:
    system = _load_system(args.system)
    started = time.time()
    if len(system.dims) == 1:
        base = system.start_index
        indices = [base, base + 1, base + 2]
        from .points import enumerate_projective
        pts = list(enumerate_projective(system.dims[0], args.bound))[: args.samples]
    else:
        base = system.start_index
        one = MultiIndex((1,) * base.arity)
        indices = [base, base.add(one)]
        from .points import enumerate_product
        pts = list(enumerate_product(system.dims, [args.bound] * len(system.dims)))
        pts = pts[: args.samples]
    report = verify_index_law(system, indices, pts)
    degrees_ok = True
    if len(system.dims) == 1:
        degrees_ok = all(system.degree_law(i) >= 2 for i in indices)
    payload = report.to_json()
    payload["degree_law_ok"] = degrees_ok
    _dump_payload(args.out, payload)
    _write_manifest(args.out, _digest(args), started,
                    {"passed": report.passed and degrees_ok})
    return 0 if report.passed and degrees_ok else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fermatdyn",
        description="Exact heights, Fermat-property scans and density sieves "
                    "for commuting endomorphism systems over Q.")
    p.add_argument("--workers", type=int, default=None,
                   help="worker count (default: FERMATDYN_WORKERS or 1)")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("height", help="canonical heights for a point list")
    sp.add_argument("--system", required=True)
    sp.add_argument("--points", required=True)
    sp.add_argument("--tolerance", type=float, default=1e-8)
    sp.add_argument("--index", type=int, default=None)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_height)

    sp = sub.add_parser("orbit", help="height-zero certificates for points")
    sp.add_argument("--system", required=True)
    sp.add_argument("--points", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_orbit)

    sp = sub.add_parser("check-fermat", help="scan Y_N up to a bound")
    sp.add_argument("--system", required=True)
    sp.add_argument("--surface", required=True)
    sp.add_argument("--index", required=True)
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--csv", default=None)
    sp.set_defaults(func=cmd_check_fermat)

    sp = sub.add_parser("certify", help="key-lemma threshold certificate")
    sp.add_argument("--system", required=True)
    sp.add_argument("--surface", required=True)
    sp.add_argument("--source-index", required=True)
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--min-bound", type=int, default=5)
    sp.add_argument("--degree-law", choices=["default", "square"],
                    default="default")
    sp.add_argument("--verify-samples", action="store_true")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("scan-density", help="per-index Fermat density scan")
    sp.add_argument("--mode", choices=["single", "multi"], default="single")
    sp.add_argument("--system", required=True)
    sp.add_argument("--surface", required=True)
    sp.add_argument("--box", required=True)
    sp.add_argument("--start", default=None)
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_scan_density)

    sp = sub.add_parser("min-height", help="certified minimum positive height")
    sp.add_argument("--system", required=True)
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--tolerance", type=float, default=1e-10)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_min_height)

    sp = sub.add_parser("systems", help="system tooling")
    ssub = sp.add_subparsers(dest="systems_command", required=True)
    sv = ssub.add_parser("validate", help="check index and degree laws")
    sv.add_argument("--system", required=True)
    sv.add_argument("--bound", type=int, default=3)
    sv.add_argument("--samples", type=int, default=10)
    sv.add_argument("--out", required=True)
    sv.set_defaults(func=cmd_systems_validate)

    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers is None:
        args.workers = effective_workers(None)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MATH_ERRORS as exc:
        print(f"math error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
