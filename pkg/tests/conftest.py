import json

import numpy as np
import pytest

from app.models.filter import BandSpec, CoeffDomain, DesignSpec


def lowpass(order, passband, stopband, k_des):
    return DesignSpec(
        order=order,
        bands=BandSpec.from_edges([passband], [stopband]),
        k_des=k_des,
    )


def filter_from_zeros(rng, order, complex_coeffs=False, inner=(0.4, 0.85), outer=(1.15, 1.6)):
    """Taps whose zeros stay well away from the unit circle."""
    def radius():
        band = inner if rng.random() < 0.5 else outer
        return rng.uniform(*band)

    zeros = []
    if complex_coeffs:
        for _ in range(order):
            zeros.append(radius() * np.exp(1j * rng.uniform(-np.pi, np.pi)))
    else:
        while len(zeros) < order:
            if order - len(zeros) >= 2 and rng.random() < 0.7:
                z = radius() * np.exp(1j * rng.uniform(0.05, np.pi - 0.05))
                zeros.extend([z, np.conj(z)])
            else:
                zeros.append(radius() * rng.choice([-1.0, 1.0]))
    taps = np.poly(np.asarray(zeros))
    if not complex_coeffs:
        taps = taps.real
    else:
        taps = taps * np.exp(1j * rng.uniform(-np.pi, np.pi))
    return taps / np.linalg.norm(taps)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def lowpass_spec():
    return lowpass(26, (0.0, 0.36), (0.42, 1.0), 3.0)


@pytest.fixture
def small_spec():
    return lowpass(20, (0.0, 0.30), (0.35, 1.0), 0.5)


@pytest.fixture
def sweep_spec():
    return DesignSpec(
        order=20,
        bands=BandSpec.from_edges([(0.42, 1.0)], [(0.0, 0.36)]),
        k_des=2.0,
    )


@pytest.fixture
def complex_spec():
    return DesignSpec(
        order=10,
        bands=BandSpec.from_edges([(0.2, 0.6)], [(-0.9, 0.05), (0.75, 1.0)]),
        k_des=1.0,
        coeff_domain=CoeffDomain.COMPLEX,
    )


@pytest.fixture
def spec_path(tmp_path):
    """Write a spec file and return its path."""
    def write(**overrides):
        payload = {
            "order": 20,
            "bands": [
                {"lo": 0.0, "hi": 0.30, "kind": "pass"},
                {"lo": 0.35, "hi": 1.0, "kind": "stop"},
            ],
            "k_des": 0.5,
        }
        payload.update(overrides)
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(payload, indent=2))
        return path
    return write


@pytest.fixture(scope="session")
def lowpass_result():
    from app.services.pipeline import design_filter

    return design_filter(lowpass(26, (0.0, 0.36), (0.42, 1.0), 3.0))
