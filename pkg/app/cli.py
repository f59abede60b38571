"""Command-line front end.

Exit codes: 0 optimal, 1 completed but suboptimal (for ksweep: no single sign
change), 2 bad input, 3 solver failure.
"""
import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from app.config import settings
from app.errors import FilterDesignError, InvalidInputError
from app.models.factor import FactorMethod
from app.models.filter import CoeffDomain, PhaseSelection
from app.models.result import WeightMethod
from app.schemas.design import CertificateOut, DesignSummary, KSweepOut
from app.services.certificate import certify
from app.services.pipeline import design_filter, linear_phase_baseline
from app.services.spectrum import response_table
from app.services.weight_solver import k_lower_bound, k_sweep
from app.utils.file_io import (
    load_spec,
    read_filter,
    write_coefficients,
    write_filter,
    write_json,
    write_table,
    write_zero_set,
)

logger = logging.getLogger("app.cli")

EXIT_OPTIMAL = 0
EXIT_SUBOPTIMAL = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3


def _response_grid(domain: CoeffDomain, points: int, lo: Optional[float], hi: Optional[float]) -> np.ndarray:
    if lo is None:
        lo = -1.0 if domain == CoeffDomain.COMPLEX else 0.0
    if hi is None:
        hi = 1.0
    if not (-1.0 <= lo < hi <= 1.0):
        raise InvalidInputError(f"response range [{lo}, {hi}] must satisfy -1 <= lo < hi <= 1")
    if points < 2:
        raise InvalidInputError("response needs at least two points")
    return np.linspace(lo, hi, points) * math.pi


def _write_response(target, h, omegas) -> None:
    freq, mag, db, delay = response_table(h, omegas)
    write_table(target, ["freq_pi", "magnitude", "magnitude_db", "group_delay"], zip(freq, mag, db, delay))


def cmd_design(args: argparse.Namespace) -> int:
    spec_file = load_spec(args.spec)
    overrides = {}
    if args.factorization:
        overrides["factorization"] = FactorMethod(args.factorization)
    if args.weight_method:
        overrides["weight_method"] = WeightMethod(args.weight_method)
    if args.grid_density:
        overrides["grid_density"] = args.grid_density
    spec = spec_file.to_design_spec()
    phase = PhaseSelection.parse(args.phase) if args.phase else spec_file.phase_selection()
    options = spec_file.to_options().model_copy(update=overrides)

    result = design_filter(spec, phase, options)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_filter(out / "filter.txt", result.filter)
    write_coefficients(out / "autocorr.txt", result.autocorr.one_sided, result.autocorr.domain)
    summary = DesignSummary.from_result(result)
    write_json(out / "summary.json", summary.model_dump(mode="json", exclude={"filter", "autocorr"}))
    write_json(out / "certificate.json", CertificateOut.from_certificate(result.certificate).model_dump(mode="json"))
    _write_response(out / "response.csv", result.filter,
                    _response_grid(spec.coeff_domain, args.points, None, None))
    if result.zero_set is not None:
        write_zero_set(out / "zeros.csv", result.zero_set)

    print(f"K* = {result.weight.k_star:.10g}")
    print(f"delta_p = {result.certificate.deviations.delta_p:.6g}  delta_s = {result.certificate.deviations.delta_s:.6g}")
    print(f"alternations {result.certificate.alternations_found}/{result.certificate.alternations_required} "
          f"({result.method.value} factorization)")
    return EXIT_OPTIMAL


def cmd_certify(args: argparse.Namespace) -> int:
    h = read_filter(args.coeffs)
    spec_file = load_spec(args.spec)
    spec = spec_file.to_design_spec()
    options = spec_file.to_options()
    certificate = certify(h, spec, rel_tol=options.alternation_rtol, ratio_tol=options.ratio_tol)
    print(json.dumps(CertificateOut.from_certificate(certificate).model_dump(mode="json"), indent=2))
    return EXIT_OPTIMAL if certificate.optimal and certificate.ratio_ok else EXIT_SUBOPTIMAL


def cmd_response(args: argparse.Namespace) -> int:
    h = read_filter(args.coeffs)
    omegas = _response_grid(h.domain, args.points, args.lo, args.hi)
    if args.out:
        _write_response(args.out, h, omegas)
    else:
        _write_response(sys.stdout, h, omegas)
    return EXIT_OPTIMAL


def cmd_ksweep(args: argparse.Namespace) -> int:
    spec_file = load_spec(args.spec)
    spec = spec_file.to_design_spec()
    k_min = args.k_min if args.k_min is not None else k_lower_bound(spec.k_des)
    if args.count < 1 or args.k_max < k_min:
        raise InvalidInputError("sweep needs count >= 1 and k_max >= k_min",
                                details={"k_min": k_min, "k_max": args.k_max, "count": args.count})
    sweep = k_sweep(spec, np.geomspace(k_min, args.k_max, args.count), density=spec_file.grid_density)
    rows = [(p.k, p.delta_p_res, p.delta_p_target, p.delta_s_target) for p in sweep.points]
    header = ["K", "delta_p_res", "delta_p_target", "delta_s_target"]
    if args.out:
        write_table(args.out, header, rows)
    else:
        write_table(sys.stdout, header, rows)
    summary = KSweepOut.from_sweep(sweep)
    if summary.crossings is None:
        print("single weight: no crossing reported", file=sys.stderr)
        return EXIT_OPTIMAL
    print(f"sign changes: {len(summary.crossings)} {summary.crossings}", file=sys.stderr)
    if not summary.single_crossing:
        print("single sign change: NOT verified", file=sys.stderr)
        return EXIT_SUBOPTIMAL
    print("single sign change: verified", file=sys.stderr)
    return EXIT_OPTIMAL


def cmd_linear_phase(args: argparse.Namespace) -> int:
    spec_file = load_spec(args.spec)
    h, certificate = linear_phase_baseline(spec_file.to_design_spec(), spec_file.to_options())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_filter(out / "filter.txt", h)
    write_json(out / "certificate.json", CertificateOut.from_certificate(certificate).model_dump(mode="json"))
    print(f"alternations {certificate.alternations_found}/{certificate.alternations_required}")
    return EXIT_OPTIMAL if certificate.optimal and certificate.ratio_ok else EXIT_SUBOPTIMAL


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("app.main:app", host=args.host, port=args.port)
    return EXIT_OPTIMAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="firdesign", description="Minimax nonlinear-phase FIR design")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="Logging level")
    sub = parser.add_subparsers(dest="command", required=True)

    design = sub.add_parser("design", help="Design, factor and certify a filter")
    design.add_argument("spec", help="JSON spec file")
    design.add_argument("--out", required=True, help="Output directory")
    design.add_argument("--phase", help="min, max or explicit:<bits> (overrides the spec)")
    design.add_argument("--factorization", choices=[m.value for m in FactorMethod])
    design.add_argument("--weight-method", choices=[m.value for m in WeightMethod])
    design.add_argument("--grid-density", type=int)
    design.add_argument("--points", type=int, default=1024, help="Points in response.csv")
    design.set_defaults(handler=cmd_design)

    cert = sub.add_parser("certify", help="Certify a coefficient file against a spec")
    cert.add_argument("coeffs", help="Coefficient file")
    cert.add_argument("spec", help="JSON spec file")
    cert.set_defaults(handler=cmd_certify)

    response = sub.add_parser("response", help="Tabulate magnitude and group delay")
    response.add_argument("coeffs", help="Coefficient file")
    response.add_argument("--points", type=int, default=1024)
    response.add_argument("--lo", type=float, help="Lowest frequency, units of pi")
    response.add_argument("--hi", type=float, help="Highest frequency, units of pi")
    response.add_argument("--out", help="CSV path (default stdout)")
    response.set_defaults(handler=cmd_response)

    sweep = sub.add_parser("ksweep", help="Tabulate the weight residual over log-spaced K "
                                          "and check it changes sign exactly once")
    sweep.add_argument("spec", help="JSON spec file")
    sweep.add_argument("--k-min", type=float, help="Smallest K (default 4k(k+1))")
    sweep.add_argument("--k-max", type=float, default=1e5)
    sweep.add_argument("--count", type=int, default=20)
    sweep.add_argument("--out", help="CSV path (default stdout)")
    sweep.set_defaults(handler=cmd_ksweep)

    linear = sub.add_parser("linear-phase", help="Design the symmetric baseline for comparison")
    linear.add_argument("spec", help="JSON spec file")
    linear.add_argument("--out", required=True, help="Output directory")
    linear.set_defaults(handler=cmd_linear_phase)

    serve = sub.add_parser("serve", help="Run the HTTP service")
    serve.add_argument("--host", default="0.0.0.0")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    try:
        return args.handler(args)
    except FilterDesignError as e:
        logger.error("%s [%s]", e.message, e.error_code.value)
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_INPUT if e.is_input_error else EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
