import numpy as np
import pytest

from app.errors import DimensionMismatchError, InvalidInputError
from app.models.design import AutocorrSequence, BasisKind, KSweep, KSweepPoint
from app.models.filter import Band, BandSpec, CoeffDomain, DesignSpec, FirFilter, PhaseKind, PhaseSelection


def test_band_spec_sorts_edges():
    bands = BandSpec.from_edges([(0.0, 0.3)], [(0.4, 1.0)])
    assert [b.is_passband for b in bands.bands] == [True, False]
    bands = BandSpec.from_edges([(0.5, 1.0)], [(0.0, 0.4)])
    assert [b.is_passband for b in bands.bands] == [False, True]
    assert bands.lowest == 0.0


@pytest.mark.parametrize("passbands, stopbands", [
    ([(0.3, 0.2)], [(0.5, 1.0)]),   # lo > hi
    ([(0.0, 0.5)], [(0.4, 1.0)]),   # overlap
    ([(0.0, 0.3)], [(0.4, 1.2)]),   # outside the axis
    ([(0.0, 0.3)], []),             # no stopband
    ([], [(0.4, 1.0)]),             # no passband
])
def test_band_spec_rejects_bad_edges(passbands, stopbands):
    with pytest.raises(InvalidInputError):
        BandSpec.from_edges(passbands, stopbands)


def test_band_desired_value_must_be_zero_or_one():
    with pytest.raises(InvalidInputError):
        BandSpec(bands=(Band(lo=0.0, hi=0.3, desired=0.5), Band(lo=0.4, hi=1.0, desired=0.0)))


def test_locate_and_passband_flags():
    bands = BandSpec.from_edges([(0.0, 0.3)], [(0.4, 1.0)])
    omegas = np.array([0.1, 0.35, 0.7]) * np.pi
    assert bands.locate(omegas).tolist() == [0, -1, 1]
    assert bands.is_passband_at(np.array([0.0, 0.3 * np.pi, np.pi])).tolist() == [True, True, False]
    with pytest.raises(InvalidInputError):
        bands.is_passband_at(omegas)


def test_design_spec_checks():
    bands = BandSpec.from_edges([(0.0, 0.3)], [(0.4, 1.0)])
    with pytest.raises(InvalidInputError):
        DesignSpec(order=-1, bands=bands, k_des=1.0)
    with pytest.raises(InvalidInputError):
        DesignSpec(order=10, bands=bands, k_des=0.0)
    negative = BandSpec.from_edges([(-0.3, 0.3)], [(0.4, 1.0)])
    with pytest.raises(InvalidInputError):
        DesignSpec(order=10, bands=negative, k_des=1.0)
    spec = DesignSpec(order=10, bands=negative, k_des=1.0, coeff_domain=CoeffDomain.COMPLEX)
    assert spec.is_complex
    assert spec.with_order(12).order == 12


def test_order_zero_spec_uses_constant_basis():
    spec = DesignSpec(order=0, bands=BandSpec.from_edges([(0.0, 0.3)], [(0.4, 1.0)]), k_des=2.0)
    basis = BasisKind.for_spec(spec)
    assert basis == BasisKind.cosine(0)
    assert basis.dimension == 1
    assert basis.reference_count == 2


def test_fir_filter_domain_inference():
    h = FirFilter(coeffs=[1.0, 2.0])
    assert h.domain == CoeffDomain.REAL
    assert h.order == 1
    assert FirFilter(coeffs=[1.0, 1j]).is_complex
    assert FirFilter(coeffs=np.array([1.0 + 0j, 2.0]), domain="real").coeffs.dtype == np.float64
    with pytest.raises(DimensionMismatchError):
        FirFilter(coeffs=[1.0, 1j], domain="real")
    with pytest.raises(InvalidInputError):
        FirFilter(coeffs=[])
    with pytest.raises(InvalidInputError):
        FirFilter(coeffs=[1.0, np.nan])


def test_fir_filter_is_immutable():
    h = FirFilter(coeffs=[1.0, 2.0])
    with pytest.raises(ValueError):
        h.coeffs[0] = 5.0


def test_phase_selection_parse():
    assert PhaseSelection.parse("min").kind == PhaseKind.MINIMUM
    assert PhaseSelection.parse("MAX").kind == PhaseKind.MAXIMUM
    explicit = PhaseSelection.parse("explicit:0110")
    assert explicit.mask == (False, True, True, False)
    assert explicit.label == "explicit:0110"
    with pytest.raises(InvalidInputError):
        PhaseSelection.parse("explicit:01x")
    with pytest.raises(InvalidInputError):
        PhaseSelection.parse("linear")


def test_basis_sizes():
    assert BasisKind.cosine(10).reference_count == 12
    assert BasisKind.cosine_sine(10).reference_count == 22
    assert BasisKind.cosine_sine(10).domain == CoeffDomain.COMPLEX


def test_autocorr_two_sided():
    p = AutocorrSequence(one_sided=[3.0, 1 + 1j, 0.5j], domain=CoeffDomain.COMPLEX)
    assert p.order == 2
    assert p.p0 == 3.0
    np.testing.assert_allclose(p.two_sided(), [-0.5j, 1 - 1j, 3.0, 1 + 1j, 0.5j])
    with pytest.raises(InvalidInputError):
        AutocorrSequence(one_sided=[1j, 0.0], domain=CoeffDomain.COMPLEX)


def test_sweep_crossings():
    points = tuple(KSweepPoint(k=k, delta_p_res=r, delta_p_target=t, delta_s_target=0.0)
                   for k, r, t in [(1, 0.1, 0.5), (2, 0.2, 0.3), (3, 0.3, 0.2)])
    assert KSweep(points=points).crossings == ((2, 3),)
    assert KSweep(points=points[:1]).crossings is None
