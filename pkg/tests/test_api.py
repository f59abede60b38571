import pytest
from fastapi.testclient import TestClient

from app.config import settings
from app.main import app

client = TestClient(app)

PREFIX = settings.API_V1_PREFIX

SMALL_SPEC = {
    "order": 20,
    "bands": [{"lo": 0.0, "hi": 0.30, "kind": "pass"}, {"lo": 0.35, "hi": 1.0, "kind": "stop"}],
    "k_des": 0.5,
}


@pytest.fixture(scope="module")
def small_design():
    response = client.post(f"{PREFIX}/designs", json=SMALL_SPEC)
    assert response.status_code == 200
    return response.json()


def test_create_design(small_design):
    assert small_design["status"] is True
    data = small_design["data"]
    assert data["order"] == 20
    assert data["method"] == "roots"
    assert data["certificate"]["optimal"] is True
    assert data["certificate"]["alternations_required"] == 22
    assert len(data["filter"]["real"]) == 21
    assert data["filter"]["imag"] is None


def test_design_rejects_bad_bands():
    spec = dict(SMALL_SPEC, bands=[{"lo": 0.3, "hi": 0.1, "kind": "pass"}, {"lo": 0.35, "hi": 1.0, "kind": "stop"}])
    response = client.post(f"{PREFIX}/designs", json=spec)
    assert response.status_code == 422
    body = response.json()
    assert body["status"] is False
    assert body["data"]["error_code"] == "VAL_001"


def test_design_rejects_unknown_field():
    response = client.post(f"{PREFIX}/designs", json=dict(SMALL_SPEC, colour="blue"))
    assert response.status_code == 422
    assert response.json()["message"] == "Validation error"


def test_roots_over_limit_is_a_conflict():
    spec = dict(SMALL_SPEC, order=settings.ROOT_ORDER_LIMIT + 1, factorization="roots")
    response = client.post(f"{PREFIX}/designs", json=spec)
    assert response.status_code == 409
    assert response.json()["data"]["error_code"] == "SOL_004"


def test_certify_round_trip(small_design):
    body = {"spec": SMALL_SPEC, "coefficients": small_design["data"]["filter"]}
    response = client.post(f"{PREFIX}/certificates", json=body)
    assert response.status_code == 200
    certificate = response.json()["data"]
    assert certificate["optimal"] is True
    assert certificate["source"] == "filter"
    assert len(certificate["alternation_freqs"]) == certificate["alternations_found"]


def test_certify_wrong_length(small_design):
    taps = small_design["data"]["filter"]["real"][:-1]
    response = client.post(f"{PREFIX}/certificates", json={"spec": SMALL_SPEC, "coefficients": {"real": taps}})
    assert response.status_code == 422
    assert response.json()["data"]["error_code"] == "VAL_003"


def test_response_table():
    body = {"coefficients": {"real": [0.5, 0.5]}, "points": 5}
    response = client.post(f"{PREFIX}/responses", json=body)
    assert response.status_code == 200
    data = response.json()["data"]
    assert data["freq_pi"] == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
    assert data["magnitude"][0] == pytest.approx(1.0)
    assert data["magnitude"][-1] == pytest.approx(0.0, abs=1e-12)
    assert data["group_delay"][0] == pytest.approx(0.5)
    assert data["group_delay"][-1] is None


def test_response_rejects_empty_range():
    body = {"coefficients": {"real": [1.0]}, "lo": 0.5, "hi": 0.5}
    response = client.post(f"{PREFIX}/responses", json=body)
    assert response.status_code == 422
    assert response.json()["message"] == "lo must be below hi"


def test_sweep():
    body = {"spec": SMALL_SPEC, "k_min": 3.0, "k_max": 3000.0, "count": 6}
    response = client.post(f"{PREFIX}/sweeps", json=body)
    assert response.status_code == 200
    data = response.json()["data"]
    assert len(data["points"]) == 6
    assert data["points"][0]["k"] == pytest.approx(3.0)
    assert data["crossings"] is not None
    assert isinstance(data["single_crossing"], bool)


def test_sweep_over_highpass_has_one_crossing():
    spec = {
        "order": 20,
        "bands": [{"lo": 0.0, "hi": 0.36, "kind": "stop"}, {"lo": 0.42, "hi": 1.0, "kind": "pass"}],
        "k_des": 2.0,
    }
    body = {"spec": spec, "k_min": 24.0, "k_max": 1e5, "count": 8}
    data = client.post(f"{PREFIX}/sweeps", json=body).json()["data"]
    assert data["single_crossing"] is True
    assert len(data["crossings"]) == 1


def test_sweep_rejects_inverted_range():
    body = {"spec": SMALL_SPEC, "k_min": 100.0, "k_max": 10.0}
    response = client.post(f"{PREFIX}/sweeps", json=body)
    assert response.status_code == 422


def test_linear_phase_baseline():
    spec = {
        "order": 26,
        "bands": [{"lo": 0.0, "hi": 0.36, "kind": "pass"}, {"lo": 0.42, "hi": 1.0, "kind": "stop"}],
        "k_des": 3.0,
    }
    response = client.post(f"{PREFIX}/designs/linear-phase", json=spec)
    assert response.status_code == 200
    data = response.json()["data"]
    real = data["filter"]["real"]
    assert real == pytest.approx(real[::-1])
    assert data["certificate"]["optimal"] is False
