import logging
import time
from contextlib import contextmanager
from typing import Dict, Iterator, Optional, Tuple

from app.errors import (
    FactorizationError,
    FilterDesignError,
    InternalConsistencyError,
    InvalidInputError,
    StageError,
)
from app.models.certificate import Certificate
from app.models.factor import FactorMethod
from app.models.filter import DesignSpec, FirFilter, PhaseKind, PhaseSelection
from app.models.result import DesignOptions, DesignResult
from app.services.autocorr import lift_to_autocorrelation, validate_constraints
from app.services.certificate import certify
from app.services.chebyshev import linear_phase_design
from app.services.spectral_factor import factor, verify_factorization
from app.services.weight_solver import lift_coefficients, solve_weight

logger = logging.getLogger(__name__)


@contextmanager
def _stage(name: str, timings: Dict[str, float]) -> Iterator[None]:
    start = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except FilterDesignError as exc:
        logger.error("%s stage failed: %s", name, exc.message)
        raise StageError(name, exc) from exc
    finally:
        timings[name] = time.perf_counter() - start


def _check_route(spec: DesignSpec, phase: PhaseSelection, options: DesignOptions) -> None:
    """Reject factorization requests that cannot succeed before any solving starts."""
    method = options.factorization
    over_limit = spec.order > options.root_order_limit
    if method == FactorMethod.ROOTS and over_limit:
        raise StageError("factor", FactorizationError(
            f"order {spec.order} exceeds the root-finding limit {options.root_order_limit}; "
            "use cepstral factorization",
            details={"order": spec.order, "limit": options.root_order_limit},
        ))
    needs_roots = phase.kind == PhaseKind.EXPLICIT
    if needs_roots and (method == FactorMethod.CEPSTRAL or (method == FactorMethod.AUTO and over_limit)):
        raise StageError("factor", FactorizationError(
            "explicit zero selection needs root-finding factorization",
            details={"order": spec.order, "limit": options.root_order_limit},
        ))


def design_filter(spec: DesignSpec, phase: Optional[PhaseSelection] = None,
                  options: Optional[DesignOptions] = None) -> DesignResult:
    """Weight search, lift, spectral factorization and certification in one pass."""
    phase = phase or PhaseSelection.minimum()
    options = options or DesignOptions()
    _check_route(spec, phase, options)
    timings: Dict[str, float] = {}
    logger.info("designing order %d %s filter, k_des=%g, phase=%s",
                spec.order, spec.coeff_domain.value, spec.k_des, phase.label)

    with _stage("weight", timings):
        weight = solve_weight(spec, tol=options.weight_tol, max_iter=options.weight_max_iter,
                              method=options.weight_method, density=options.grid_density)

    with _stage("lift", timings):
        a, b = lift_coefficients(weight.k_star, spec.k_des, weight.design.delta_p)
        autocorr = lift_to_autocorrelation(weight.design, a, b, psd_eps=options.psd_eps)
        constraints = validate_constraints(autocorr, spec, tol=options.constraint_tol,
                                           psd_eps=options.psd_eps)

    with _stage("factor", timings):
        h, method, zeros = factor(autocorr, phase, options.factorization,
                                  root_limit=options.root_order_limit,
                                  fft_len=options.cepstral_fft_len, psd_eps=options.psd_eps)
        report = verify_factorization(h, autocorr, phase, root_limit=options.root_order_limit)
        if not report.within_tol:
            raise FactorizationError(
                f"factor reproduces the autocorrelation only to {report.relative_residual:.3e} p[0]",
                details={"relative_residual": report.relative_residual},
            )

    with _stage("certify", timings):
        # cepstral factors are certified through their exact |H|^2 = P
        from_filter = method == FactorMethod.ROOTS and h.domain == spec.coeff_domain
        certificate = certify(h if from_filter else autocorr, spec,
                              rel_tol=options.alternation_rtol, ratio_tol=options.ratio_tol)
        if not (certificate.optimal and certificate.ratio_ok):
            raise InternalConsistencyError(
                f"design failed its certificate: {certificate.alternations_found} of "
                f"{certificate.alternations_required} alternations, ratio_ok={certificate.ratio_ok}",
                details={"found": certificate.alternations_found,
                         "required": certificate.alternations_required,
                         "ratio_ok": certificate.ratio_ok},
            )

    logger.info("design complete: K*=%.8g delta_p=%.6g delta_s=%.6g method=%s",
                weight.k_star, certificate.deviations.delta_p, certificate.deviations.delta_s, method.value)
    return DesignResult(
        filter=h,
        autocorr=autocorr,
        weight=weight,
        constraints=constraints,
        factorization=report,
        certificate=certificate,
        method=method,
        zero_set=zeros,
        timings=timings,
    )


def linear_phase_baseline(spec: DesignSpec,
                          options: Optional[DesignOptions] = None) -> Tuple[FirFilter, Certificate]:
    """Symmetric filter at weight K = k_des, certified against the same bands."""
    options = options or DesignOptions()
    if spec.is_complex:
        raise InvalidInputError("the linear-phase baseline is defined for real filters only")
    h = linear_phase_design(spec.order, spec.bands, spec.k_des, density=options.grid_density)
    return h, certify(h, spec, rel_tol=options.alternation_rtol, ratio_tol=options.ratio_tol)
