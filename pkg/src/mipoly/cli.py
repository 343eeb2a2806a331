"""Command-line front end.

Every subcommand prints one JSON document:

    {"schema_version", "command", "inputs", "result", "provenance"}

with sorted keys and all integers as decimal strings.

Exit codes: 0 computed (whatever the verdict), 2 invalid input,
3 search exhausted, 4 base family not intersective, 5 document failed
verification (``verify`` only).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from datetime import datetime, timezone
from typing import Any, Sequence

from . import __version__
from .certifier import DEFAULT_SCAN_BOUND, certify_intersective
from .constructor import ConstructionParams, Policy, construct
from .errors import FamilyError, MipolyError, NotIntersectiveBase, SearchExhausted
from .family import validate_family
from .minimality import MIN_MINIMALITY_SIZE, certify_minimal
from .ntheory import ResidueClass, primality_provenance
from .oracle import density_scan, first_root, sweep, verify_certificate

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_EXHAUSTED = 3
EXIT_NOT_INTERSECTIVE = 4
EXIT_REJECTED = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _scan_bound_default() -> int:
    raw = os.environ.get("MIP_SCAN_BOUND")
    if raw is None:
        return DEFAULT_SCAN_BOUND
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"MIP_SCAN_BOUND={raw!r} is not an integer") from None


def _parse_coeffs(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise UsageError(f"--coeffs must be comma-separated integers, got {text!r}") from None


def _read_file(path: str) -> Any:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _coeffs_from(args) -> list[int]:
    if args.coeffs is not None:
        return _parse_coeffs(args.coeffs)
    if args.file is not None:
        data = _read_file(args.file)
        if isinstance(data, dict):
            data = data.get("coeffs") or data.get("inputs", {}).get("coeffs") or data.get("family")
        if not isinstance(data, list):
            raise UsageError("JSON input must be a list of integers or an object with 'coeffs'")
        try:
            return [int(v) for v in data]
        except (TypeError, ValueError):
            raise UsageError("JSON coefficients must be integers or decimal strings") from None
    raise UsageError("one of --coeffs or --file is required")


def _document(command: str, inputs: dict, result: dict, extra: dict, timestamp: bool) -> dict:
    provenance = {"tool": "mipoly", "version": __version__, "primality": primality_provenance(), **extra}
    if timestamp:
        provenance["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "result": result,
        "provenance": provenance,
    }


def cmd_certify(args) -> dict:
    coeffs = _coeffs_from(args)
    cert = certify_intersective(validate_family(coeffs), args.scan_bound)
    return _document(
        "certify",
        {"coeffs": [str(c) for c in coeffs]},
        cert.to_dict(),
        {"scan_bound": str(args.scan_bound)},
        args.timestamp,
    )


def cmd_minimal(args) -> dict:
    coeffs = _coeffs_from(args)
    report = certify_minimal(validate_family(coeffs, MIN_MINIMALITY_SIZE), args.scan_bound)
    return _document(
        "minimal",
        {"coeffs": [str(c) for c in coeffs]},
        report.to_dict(),
        {"scan_bound": str(args.scan_bound)},
        args.timestamp,
    )


def _parse_offsets(items: Sequence[str]) -> dict[int, Policy]:
    out = {}
    for item in items:
        try:
            i, k = item.split("=")
            out[int(i)] = Policy(int(k))
        except ValueError:
            raise UsageError(f"--offset-at expects INDEX=K, got {item!r}") from None
    return out


def cmd_construct(args) -> dict:
    params = ConstructionParams(
        n=args.n,
        p1=args.p1,
        p2=args.p2,
        policy=Policy.parse(args.policy),
        step_policies=_parse_offsets(args.offset_at),
        search_cap=args.search_cap,
    )
    family, trace, report = construct(params, args.scan_bound)
    inputs = {
        "n": str(args.n),
        "p1": str(args.p1),
        "p2": str(args.p2),
        "policy": str(params.policy),
        "offset_at": {str(i): str(p.offset) for i, p in sorted(params.step_policies.items())},
        "search_cap": str(args.search_cap),
    }
    result = {
        "kind": "construction",
        "family": [str(v) for v in family.values],
        "trace": trace.to_dict(),
        "minimality_report": report.to_dict(),
    }
    extra = {"choice_policy": str(params.policy), "scan_bound": str(args.scan_bound)}
    return _document("construct", inputs, result, extra, args.timestamp)


def cmd_sweep(args) -> dict:
    coeffs = _coeffs_from(args)
    validate_family(coeffs)
    if args.max_m < 2:
        raise UsageError("--max-m must be >= 2")
    res = sweep(coeffs, args.max_m, args.method)
    return _document(
        "sweep",
        {"coeffs": [str(c) for c in coeffs], "max_m": str(args.max_m)},
        res.to_dict(),
        {"method": args.method},
        args.timestamp,
    )


def cmd_density(args) -> dict:
    if args.modulus < 2 or args.limit <= args.lower_bound:
        raise UsageError("need --modulus >= 2 and --limit > --lower-bound")
    est = density_scan(ResidueClass.of(args.residue, args.modulus), args.lower_bound, args.limit)
    inputs = {
        "modulus": str(args.modulus),
        "residue": str(args.residue),
        "lower_bound": str(args.lower_bound),
        "limit": str(args.limit),
    }
    return _document("density", inputs, est.to_dict(), {}, args.timestamp)


def verify_document(doc: Any) -> bool:
    """Re-check a document produced by any subcommand."""
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        return False
    command, result = doc.get("command"), doc.get("result")
    if command in ("certify", "minimal"):
        return verify_certificate(result)
    if command == "construct":
        report = result["minimality_report"]
        return report["family"] == result["family"] and verify_certificate(report)
    if command == "sweep":
        coeffs = [int(c) for c in doc["inputs"]["coeffs"]]
        for m, r in result["roots_sample"].items():
            m, r = int(m), int(r)
            prod = 1
            for a in coeffs:
                prod = prod * ((r * r - a) % m) % m
            if prod:
                return False
        ff = result["first_failure"]
        return ff is None or first_root(coeffs, int(ff)) is None
    if command == "density":
        cls = ResidueClass.of(int(doc["inputs"]["residue"]), int(doc["inputs"]["modulus"]))
        est = density_scan(cls, int(doc["inputs"]["lower_bound"]), int(doc["inputs"]["limit"]))
        return est.to_dict() == result
    return False


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mipoly", description="Minimally intersective polynomials prod(x^2 - a_i).")
    parser.add_argument("--version", action="version", version=f"mipoly {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, family=True, scan=True):
        if family:
            g = p.add_mutually_exclusive_group()
            g.add_argument("--coeffs", help="comma-separated a_1,...,a_n")
            g.add_argument("--file", help="JSON list of coefficients, or '-' for stdin")
        if scan:
            p.add_argument("--scan-bound", type=int, default=_scan_bound_default(),
                           help="largest prime tried when searching for a witness modulus "
                                "(default: $MIP_SCAN_BOUND or %d)" % DEFAULT_SCAN_BOUND)
        p.add_argument("--no-timestamp", dest="timestamp", action="store_false")
        p.add_argument("--output", "-o", help="write the document here instead of stdout")

    p = sub.add_parser("construct", help="build a minimally intersective family")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p1", type=int, default=3)
    p.add_argument("--p2", type=int, default=5)
    p.add_argument("--policy", default="smallest", help="smallest | offset:k")
    p.add_argument("--offset-at", action="append", default=[], metavar="INDEX=K",
                   help="use offset:K at member INDEX only (repeatable)")
    p.add_argument("--search-cap", type=int, default=1_000_000)
    common(p, family=False)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("certify", help="decide intersectivity with a certificate")
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("minimal", help="decide minimal intersectivity")
    common(p)
    p.set_defaults(func=cmd_minimal)

    p = sub.add_parser("sweep", help="brute-force root search modulo every m <= max-m")
    common(p, scan=False)
    p.add_argument("--max-m", type=int, required=True)
    p.add_argument("--method", choices=("crt", "naive"), default="crt")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("density", help="density of square-free members of a residue class")
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--residue", type=int, required=True)
    p.add_argument("--lower-bound", type=int, default=0)
    p.add_argument("--limit", type=int, required=True)
    common(p, family=False, scan=False)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("verify", help="re-check a document produced by another subcommand")
    p.add_argument("--file", required=True, help="document path, or '-' for stdin")
    p.set_defaults(func=None)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"mipoly: {exc}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "verify":
            ok = verify_document(_read_file(args.file))
            print("valid" if ok else "REJECTED")
            return EXIT_OK if ok else EXIT_REJECTED
        doc = args.func(args)
    except (UsageError, FamilyError) as exc:
        print(f"mipoly: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SearchExhausted as exc:
        print(f"mipoly: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except NotIntersectiveBase as exc:
        print(f"mipoly: {exc}", file=sys.stderr)
        return EXIT_NOT_INTERSECTIVE
    except MipolyError as exc:
        print(f"mipoly: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
