import itertools

import numpy as np
import pytest

from app.errors import FactorizationError, InvalidInputError
from app.models.design import AutocorrSequence
from app.models.factor import FactorMethod
from app.models.filter import CoeffDomain, FirFilter, PhaseKind, PhaseSelection
from app.services.spectral_factor import (
    factor,
    factor_roots,
    minimum_phase_cepstral,
    reflect,
    select_phase,
    verify_factorization,
)
from app.services.spectrum import autocorrelation_of, magnitude_response
from tests.conftest import filter_from_zeros


def _autocorr(h):
    h = np.asarray(h)
    domain = CoeffDomain.COMPLEX if np.iscomplexobj(h) else CoeffDomain.REAL
    return AutocorrSequence(one_sided=autocorrelation_of(h), domain=domain)


def _residual(h, p):
    return np.max(np.abs(autocorrelation_of(h) - p.one_sided)) / p.p0


def test_two_tap_factors():
    p = AutocorrSequence(one_sided=[5.0, 2.0], domain=CoeffDomain.REAL)
    zeros = factor_roots(p)
    np.testing.assert_allclose(sorted(zeros.zeros().real), [-2.0, -0.5])
    assert not zeros.on_circle
    np.testing.assert_allclose(select_phase(zeros, PhaseSelection.minimum(), p).coeffs, [2.0, 1.0])
    np.testing.assert_allclose(select_phase(zeros, PhaseSelection.maximum(), p).coeffs, [1.0, 2.0])


def test_double_zero_on_unit_circle():
    p = AutocorrSequence(one_sided=[2.0, 1.0], domain=CoeffDomain.REAL)
    zeros = factor_roots(p)
    assert len(zeros.on_circle) == 1
    assert zeros.on_circle[0].location == pytest.approx(-1.0, abs=1e-7)
    assert zeros.rows() == [(zeros.on_circle[0].location, 2)]
    h = select_phase(zeros, PhaseSelection.minimum(), p)
    np.testing.assert_allclose(h.coeffs, [1.0, 1.0], atol=1e-7)


def test_trailing_zero_lags_are_padded():
    p = AutocorrSequence(one_sided=[5.0, 2.0, 0.0, 0.0], domain=CoeffDomain.REAL)
    zeros = factor_roots(p)
    np.testing.assert_allclose(select_phase(zeros, PhaseSelection.minimum(), p).coeffs, [2, 1, 0, 0])
    np.testing.assert_allclose(select_phase(zeros, PhaseSelection.maximum(), p).coeffs, [0, 0, 1, 2])


def test_sign_indefinite_sequence_cannot_be_factored():
    # P = 1 + 2 cos w has simple zeros on the unit circle
    p = AutocorrSequence(one_sided=[1.0, 1.0], domain=CoeffDomain.REAL)
    with pytest.raises(FactorizationError):
        factor_roots(p)


def test_nonpositive_p0_rejected():
    p = AutocorrSequence(one_sided=[0.0, 1.0], domain=CoeffDomain.REAL)
    with pytest.raises(InvalidInputError):
        factor_roots(p)
    with pytest.raises(InvalidInputError):
        minimum_phase_cepstral(p)


def test_root_limit_enforced():
    p = AutocorrSequence(one_sided=np.r_[1.0, np.zeros(200)], domain=CoeffDomain.REAL)
    with pytest.raises(FactorizationError):
        factor_roots(p, root_limit=128)


def test_mask_length_checked():
    p = AutocorrSequence(one_sided=[5.0, 2.0], domain=CoeffDomain.REAL)
    with pytest.raises(InvalidInputError):
        select_phase(factor_roots(p), PhaseSelection.explicit([True, False]), p)


def test_min_and_max_phase_reproduce_autocorrelation(rng):
    for trial in range(50):
        order = int(rng.integers(2, 17))
        h = filter_from_zeros(rng, order, complex_coeffs=bool(trial % 2),
                              inner=(0.5, 0.85), outer=(1.2, 2.0))
        p = _autocorr(h)
        zeros = factor_roots(p)
        h_min = select_phase(zeros, PhaseSelection.minimum(), p)
        h_max = select_phase(zeros, PhaseSelection.maximum(), p)
        assert _residual(h_min, p) <= 1e-8
        assert _residual(h_max, p) <= 1e-8
        assert np.all(np.abs(np.roots(h_min.coeffs)) < 1.0)
        assert np.all(np.abs(np.roots(h_max.coeffs)) > 1.0)
        assert h_min.coeffs[0].real > 0
        # the minimum-phase factor concentrates its energy earliest
        energy_min = np.cumsum(np.abs(h_min.coeffs) ** 2)
        energy_h = np.cumsum(np.abs(h) ** 2)
        assert np.all(energy_min >= energy_h - 1e-9)


def test_clustered_zeros_pair_exactly():
    # neighbouring zeros make the eigenvalue estimates inaccurate before polishing
    angles = [0.50, 0.52, 0.54, 1.9, 1.93]
    radii = [0.80, 0.82, 0.84, 1.3, 1.32]
    zeros = [r * np.exp(1j * a) for r, a in zip(radii, angles)]
    h = np.poly(np.concatenate([zeros, np.conj(zeros)])).real
    p = _autocorr(h / np.linalg.norm(h))
    found = factor_roots(p)
    assert len(found.off_circle) == 10
    for pair in found.off_circle:
        assert abs(pair.inner * np.conj(pair.outer) - 1.0) <= 1e-12
    for selection in (PhaseSelection.minimum(), PhaseSelection.maximum()):
        assert _residual(select_phase(found, selection, p), p) <= 1e-8


def test_explicit_mask_recovers_original_filter(rng):
    for _ in range(20):
        h = filter_from_zeros(rng, int(rng.integers(3, 13)), complex_coeffs=True,
                              inner=(0.5, 0.85), outer=(1.2, 2.0))
        p = _autocorr(h)
        zeros = factor_roots(p)
        original = np.roots(h)
        mask = [bool(np.min(np.abs(original - pair.outer)) < 1e-6) for pair in zeros.off_circle]
        rebuilt = select_phase(zeros, PhaseSelection.explicit(mask), p)
        expected = h * np.exp(-1j * np.angle(h[0]))
        np.testing.assert_allclose(rebuilt.coeffs, expected, atol=1e-8)


def test_every_explicit_selection_is_a_factor(rng):
    h = filter_from_zeros(rng, 8, complex_coeffs=True, inner=(0.5, 0.85), outer=(1.2, 2.0))
    p = _autocorr(h)
    zeros = factor_roots(p)
    assert len(zeros.off_circle) == 8
    omegas = np.linspace(-np.pi, np.pi, 257)
    reference = magnitude_response(h, omegas)
    for mask in itertools.product([False, True], repeat=8):
        g = select_phase(zeros, PhaseSelection.explicit(mask), p)
        assert _residual(g, p) <= 1e-8
        np.testing.assert_allclose(magnitude_response(g, omegas), reference, atol=1e-8)


@pytest.mark.parametrize("order", [8, 16, 32])
def test_cepstral_matches_root_finding(rng, order):
    h = filter_from_zeros(rng, order, inner=(0.2, 0.6), outer=(1.7, 4.0))
    p = _autocorr(h)
    by_roots = select_phase(factor_roots(p), PhaseSelection.minimum(), p)
    by_cepstrum = minimum_phase_cepstral(p)
    assert by_cepstrum.phase == PhaseKind.MINIMUM.value
    np.testing.assert_allclose(by_cepstrum.coeffs, by_roots.coeffs, atol=1e-6)


def test_cepstral_factor_scales_with_p(rng):
    h = filter_from_zeros(rng, 10, inner=(0.2, 0.6), outer=(1.7, 4.0))
    p = _autocorr(h)
    scaled = AutocorrSequence(one_sided=4.0 * p.one_sided, domain=p.domain)
    np.testing.assert_allclose(minimum_phase_cepstral(scaled).coeffs,
                               2.0 * minimum_phase_cepstral(p).coeffs, atol=1e-8)


def test_reflect_gives_maximum_phase():
    h_max = reflect(FirFilter(coeffs=[2.0, 1.0]))
    np.testing.assert_allclose(h_max.coeffs, [1.0, 2.0])
    assert h_max.phase == PhaseKind.MAXIMUM.value


def test_factor_dispatch():
    p = AutocorrSequence(one_sided=[5.0, 2.0], domain=CoeffDomain.REAL)
    h, method, zeros = factor(p, PhaseSelection.minimum())
    assert method == FactorMethod.ROOTS
    assert zeros is not None
    h, method, zeros = factor(p, PhaseSelection.maximum(), FactorMethod.CEPSTRAL)
    assert method == FactorMethod.CEPSTRAL
    assert zeros is None
    np.testing.assert_allclose(h.coeffs, [1.0, 2.0], atol=1e-8)
    with pytest.raises(FactorizationError):
        factor(p, PhaseSelection.explicit([True]), FactorMethod.CEPSTRAL)


def test_auto_switches_to_cepstrum_above_limit():
    p = AutocorrSequence(one_sided=np.r_[1.0, np.zeros(40)], domain=CoeffDomain.REAL)
    h, method, _ = factor(p, PhaseSelection.minimum(), root_limit=16)
    assert method == FactorMethod.CEPSTRAL
    np.testing.assert_allclose(h.coeffs, np.r_[1.0, np.zeros(40)], atol=1e-12)


def test_verify_factorization_reports_residual_and_phase():
    p = AutocorrSequence(one_sided=[5.0, 2.0], domain=CoeffDomain.REAL)
    good = verify_factorization(FirFilter(coeffs=[2.0, 1.0]), p, PhaseSelection.minimum())
    assert good.within_tol and good.phase_ok
    assert good.max_zero_modulus == pytest.approx(0.5)
    wrong_phase = verify_factorization(FirFilter(coeffs=[1.0, 2.0]), p, PhaseSelection.minimum())
    assert wrong_phase.within_tol and wrong_phase.phase_ok is False
    bad = verify_factorization(FirFilter(coeffs=[2.0, 1.1]), p)
    assert not bad.within_tol
