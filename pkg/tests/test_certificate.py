import numpy as np
import pytest

from app.config import settings
from app.errors import DimensionMismatchError
from app.models.certificate import CertificateSource, DeviationReport
from app.models.filter import FirFilter
from app.services.certificate import (
    adjusted_error,
    adjusted_targets,
    certify,
    count_alternations,
    measure_deviations,
)
from app.services.chebyshev import build_grid
from app.services.spectrum import autocorrelation_of, magnitude_response
from tests.conftest import lowpass


def test_count_alternations_merges_runs():
    omegas = np.arange(6, dtype=float)
    count, where = count_alternations(omegas, [1.0, -1.0, 1.0, 1.0, -1.0, 0.2], level=1.0)
    assert count == 4
    assert where.tolist() == [0.0, 1.0, 2.0, 4.0]


def test_count_alternations_keeps_largest_of_run():
    count, where = count_alternations([0.0, 1.0, 2.0], [0.99995, 1.0, -1.0], level=1.0, rel_tol=1e-4)
    assert count == 2
    assert where.tolist() == [1.0, 2.0]


def test_count_alternations_ignores_low_samples():
    count, _ = count_alternations([0.0, 1.0, 2.0], [1.0, -0.5, 1.0], level=1.0)
    assert count == 1
    assert count_alternations([0.0], [1.0], level=0.0)[0] == 0


def test_lowpass_design_certificate(lowpass_result):
    certificate = lowpass_result.certificate
    assert certificate.source == CertificateSource.FILTER
    assert certificate.alternations_required == 28
    assert certificate.alternations_found == 28
    assert certificate.optimal and certificate.ratio_ok
    assert certificate.deviations.delta_p == pytest.approx(0.12, abs=0.005)
    assert certificate.deviations.delta_s == pytest.approx(0.04, abs=0.002)
    assert certificate.targets.d_prime_stop == certificate.deviations.delta_s / 2
    assert certificate.targets.d_prime_stop == pytest.approx(0.02, abs=0.001)
    assert certificate.targets.w_prime_stop == 6.0


def test_adjusted_error_levels_at_alternations(lowpass_result, lowpass_spec):
    certificate = lowpass_result.certificate
    omegas = np.array(certificate.alternation_freqs) * np.pi
    errors = adjusted_error(lowpass_result.filter, lowpass_spec, certificate.targets, omegas)
    np.testing.assert_allclose(np.abs(errors), certificate.deviations.delta_p, rtol=1e-4)
    assert np.all(np.sign(errors[1:]) == -np.sign(errors[:-1]))


def test_autocorrelation_certifies_like_its_factor(lowpass_result, lowpass_spec):
    from_filter = lowpass_result.certificate
    from_autocorr = certify(lowpass_result.autocorr, lowpass_spec)
    assert from_autocorr.source == CertificateSource.AUTOCORRELATION
    assert from_autocorr.alternations_found == from_filter.alternations_found
    assert from_autocorr.deviations.delta_p == pytest.approx(from_filter.deviations.delta_p, rel=1e-6)


def test_truncated_filter_is_suboptimal(lowpass_result):
    taps = lowpass_result.filter.coeffs[:-1]
    shorter = lowpass(25, (0.0, 0.36), (0.42, 1.0), 3.0)
    certificate = certify(FirFilter(coeffs=taps), shorter)
    assert not (certificate.optimal and certificate.ratio_ok)


def test_measured_deviations_match_autocorrelation(lowpass_result, lowpass_spec):
    deviations = measure_deviations(lowpass_result.filter, lowpass_spec)
    np.testing.assert_allclose(autocorrelation_of(lowpass_result.filter), lowpass_result.autocorr.one_sided,
                               atol=1e-8)
    assert deviations.ratio == pytest.approx(3.0, rel=1e-3)
    assert 0.0 <= deviations.passband_peak_freq <= 0.36
    assert 0.42 <= deviations.stopband_peak_freq <= 1.0


def test_mismatched_inputs_rejected(lowpass_spec):
    with pytest.raises(DimensionMismatchError):
        certify(FirFilter(coeffs=np.ones(10)), lowpass_spec)
    with pytest.raises(DimensionMismatchError):
        certify(FirFilter(coeffs=np.ones(27) * (1 + 1j)), lowpass_spec)


def _report(delta_p, k_des):
    return DeviationReport(
        delta_p=delta_p, delta_s=delta_p / k_des, arg_max_freq=0.0,
        passband_deviation=delta_p, stopband_peak=delta_p / k_des,
        passband_peak=delta_p, passband_trough=delta_p,
        passband_peak_freq=0.0, stopband_peak_freq=1.0,
    )


def test_count_alternations_on_sawtooth():
    for k in (2, 5, 9):
        t = np.linspace(0.0, k - 1, 50 * (k - 1) + 1)
        count, where = count_alternations(t, 0.3 * np.cos(np.pi * t), level=0.3)
        assert count == k
        np.testing.assert_allclose(where, np.arange(k), atol=1e-12)


def test_adjusted_targets_scale_the_stopband():
    spec = lowpass(10, (0.0, 0.36), (0.42, 1.0), 2.0)
    targets = adjusted_targets(spec, _report(2 * 8.1617e-4, 2.0))
    assert targets.d_prime_stop == pytest.approx(4.0808e-4, rel=1e-4)
    assert targets.w_prime_stop == 4.0
    assert targets.level == pytest.approx(2 * 8.1617e-4)
    degenerate = adjusted_targets(spec, _report(0.0, 2.0))
    assert degenerate.d_prime_stop == 0.0
    assert degenerate.w_prime_stop == 4.0


def test_constant_filter_deviations():
    spec = lowpass(0, (0.0, 0.36), (0.42, 1.0), 3.0)
    deviations = measure_deviations(FirFilter(coeffs=[0.25]), spec)
    assert deviations.delta_p == pytest.approx(0.75)
    assert deviations.delta_s == pytest.approx(0.25)
    certificate = certify(FirFilter(coeffs=[0.25]), spec)
    assert certificate.alternations_required == 2
    assert certificate.alternations_found == 2
    assert certificate.optimal and certificate.ratio_ok


def test_zero_filter_deviations():
    spec = lowpass(0, (0.0, 0.36), (0.42, 1.0), 1.0)
    deviations = measure_deviations(FirFilter(coeffs=[0.0]), spec)
    assert deviations.delta_p == 1.0
    assert deviations.delta_s == 1.0
    assert deviations.stopband_peak == 0.0
    assert deviations.ratio == float("inf")
    assert not certify(FirFilter(coeffs=[0.0]), spec).ratio_ok


def test_weighted_deviation_follows_certified_ratio(lowpass_result):
    # designed for k = 3, so the passband deviation dominates at k = 1
    spec = lowpass(26, (0.0, 0.36), (0.42, 1.0), 1.0)
    certificate = certify(lowpass_result.filter, spec)
    deviations = certificate.deviations
    assert deviations.delta_p == pytest.approx(deviations.passband_deviation)
    assert deviations.delta_s == deviations.delta_p
    assert 0.0 <= deviations.arg_max_freq <= 0.36
    assert not certificate.optimal
    assert not certificate.ratio_ok


def test_alternation_count_is_stable_under_refinement(lowpass_result, lowpass_spec):
    for factor in (2, 4):
        refined = certify(lowpass_result.filter, lowpass_spec, density=factor * settings.CERTIFY_DENSITY)
        assert refined.alternations_found == lowpass_result.certificate.alternations_found
        assert refined.optimal


def test_stopband_stays_below_delta_s_on_fine_grid(lowpass_result, lowpass_spec):
    grid = build_grid(lowpass_spec.bands, lowpass_spec.order + 1, 4 * settings.CERTIFY_DENSITY)
    stop = grid.omegas[~grid.in_passband]
    peak = magnitude_response(lowpass_result.filter, stop).max()
    assert peak <= lowpass_result.certificate.deviations.delta_s * (1 + 1e-3)
