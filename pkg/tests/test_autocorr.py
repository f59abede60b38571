import math

import numpy as np
import pytest

from app.errors import InvalidInputError, NegativeSpectrumError
from app.models.design import AutocorrSequence, BasisKind, ZeroPhaseDesign
from app.models.filter import BandSpec, CoeffDomain, DesignSpec
from app.services.autocorr import lift_to_autocorrelation, minimum_power, validate_constraints
from app.services.weight_solver import lift_coefficients, solve_weight


def _design(one_sided):
    return ZeroPhaseDesign(one_sided=one_sided, basis=BasisKind.cosine(len(one_sided) - 1),
                           applied_weight=1.0, delta_p=0.1)


def test_lift_of_constant_response():
    p = lift_to_autocorrelation(_design([1.0]), 2.0, 0.5)
    assert p.p0 == pytest.approx(2.5)
    assert (p.lift_a, p.lift_b) == (2.0, 0.5)


def test_lift_rejects_negative_spectrum():
    # P = cos w dips to -1
    with pytest.raises(NegativeSpectrumError):
        lift_to_autocorrelation(_design([0.0, 0.5]), 1.0, 0.0)


def test_lift_rejects_nonpositive_scale():
    with pytest.raises(InvalidInputError):
        lift_to_autocorrelation(_design([1.0]), 0.0, 1.0)


def test_minimum_power_found_between_grid_points():
    # P = 1 + cos(w + 0.3), minimum 0 at w = pi - 0.3
    c = np.array([1.0, 0.5 * np.exp(-0.3j)])
    p = AutocorrSequence(one_sided=c, domain=CoeffDomain.COMPLEX)
    lowest, where = minimum_power(p)
    assert lowest == pytest.approx(0.0, abs=1e-12)
    assert where == pytest.approx(math.pi - 0.3, abs=1e-5)


def test_lifted_design_meets_constraints(small_spec):
    weight = solve_weight(small_spec)
    a, b = lift_coefficients(weight.k_star, small_spec.k_des, weight.design.delta_p)
    p = lift_to_autocorrelation(weight.design, a, b)
    report = validate_constraints(p, small_spec)
    assert report.all_ok
    assert report.passband_max == pytest.approx(report.passband_min, abs=1e-4)
    assert report.ratio == pytest.approx(small_spec.k_des, rel=1e-4)
    assert -1e-9 * p.p0 <= report.min_power <= 1e-5


def test_halving_the_lift_offset_breaks_constraints(small_spec):
    weight = solve_weight(small_spec)
    a, b = lift_coefficients(weight.k_star, small_spec.k_des, weight.design.delta_p)
    assert b > 0
    one_sided = a * np.array(weight.design.one_sided)
    one_sided[0] += b / 2
    report = validate_constraints(AutocorrSequence(one_sided=one_sided, domain=CoeffDomain.REAL), small_spec)
    assert not report.nonnegative_ok
    assert report.min_power == pytest.approx(-b / 2, abs=2e-5)
    assert not report.all_ok


def test_order_zero_constant_is_reported_not_rejected():
    spec = DesignSpec(order=0, bands=BandSpec.from_edges([(0.0, 0.36)], [(0.42, 1.0)]), k_des=2.0)
    report = validate_constraints(AutocorrSequence(one_sided=[0.25], domain=CoeffDomain.REAL), spec)
    assert report.passband_min == pytest.approx(0.5)
    assert report.delta_s == pytest.approx(0.5)
    assert not report.symmetric_ok
    assert report.nonnegative_ok
    # |H| = 1 sits at the passband midpoint
    report = validate_constraints(AutocorrSequence(one_sided=[1.0], domain=CoeffDomain.REAL), spec)
    assert report.symmetric_ok
    assert not report.ratio_ok


def test_constraint_report_flags_violations(small_spec):
    one_sided = np.zeros(small_spec.order + 1)
    one_sided[0] = 4.0
    report = validate_constraints(AutocorrSequence(one_sided=one_sided, domain=CoeffDomain.REAL), small_spec)
    assert not report.symmetric_ok
    assert report.nonnegative_ok
    assert not report.all_ok
    one_sided[0] = 1.0
    report = validate_constraints(AutocorrSequence(one_sided=one_sided, domain=CoeffDomain.REAL), small_spec)
    assert report.symmetric_ok
    assert report.delta_s == pytest.approx(1.0)


def test_constraint_check_needs_matching_order(small_spec):
    p = AutocorrSequence(one_sided=[1.0, 0.1], domain=CoeffDomain.REAL)
    with pytest.raises(InvalidInputError):
        validate_constraints(p, small_spec)
