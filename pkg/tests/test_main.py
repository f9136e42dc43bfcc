"""
Basic tests for the qpcocycle HTTP API.

This module contains tests for the application endpoints and error mapping.
"""

import math

import pytest
from fastapi.testclient import TestClient

from qpcocycle.config import settings
from qpcocycle.main import app

API = settings.API_V1_STR


@pytest.fixture
def client():
    """Test client fixture."""
    return TestClient(app)


def test_root_endpoint(client):
    """Test the root endpoint returns correct response."""
    response = client.get("/")
    assert response.status_code == 200
    data = response.json()
    assert "message" in data
    assert data["version"] == settings.VERSION
    assert data["units"] == "nats"


def test_health_endpoint(client):
    """Test the health check endpoint."""
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "healthy"


def test_openapi_docs_available(client):
    """Test that OpenAPI documentation is available."""
    assert client.get("/docs").status_code == 200
    assert client.get("/redoc").status_code == 200

    response = client.get(f"{API}/openapi.json")
    assert response.status_code == 200
    data = response.json()
    assert "openapi" in data
    assert f"{API}/harper/region" in data["paths"]
    assert f"{API}/lyapunov/le" in data["paths"]


def test_status_endpoint(client):
    """Status lists the report version and the verification panels."""
    response = client.get(f"{API}/status")
    assert response.status_code == 200
    data = response.json()
    assert data["schema_version"] == "1.0"
    assert "jensen" in data["verification_panels"]


class TestHarperEndpoints:
    def test_region(self, client):
        """POST /harper/region returns a region report."""
        response = client.post(f"{API}/harper/region", json={"lambda": "0,0.5,0"})
        assert response.status_code == 200
        report = response.json()
        assert report["command"] == "region"
        assert report["outputs"]["le_on_spectrum"] == pytest.approx(math.log(2))

    def test_bad_coupling_is_400(self, client):
        """Malformed couplings are rejected by validation."""
        response = client.post(f"{API}/harper/region", json={"lambda": "1,2"})
        assert response.status_code == 400
        assert response.json()["error"] == "ValidationError"

    def test_duality(self, client):
        """POST /harper/duality returns the dual region."""
        response = client.post(f"{API}/harper/duality", json={"lambda": "0.5,0.2,0.2"})
        assert response.status_code == 200
        assert response.json()["outputs"]["dual_region"] == "II"

    def test_zero_lambda2_is_400(self, client):
        """l2 = 0 maps to a 400 carrying the error name."""
        response = client.post(f"{API}/harper/duality", json={"lambda": "1,0,1"})
        assert response.status_code == 400
        assert response.json()["error"] == "ZeroLambda2"


class TestLyapunovEndpoints:
    def test_inline_matrix(self, client):
        """Inline cocycles are accepted."""
        body = {"matrix": {"matrix": [[2, 0], [0, 1]]}, "beta": "1/3", "backend": "rational"}
        response = client.post(f"{API}/lyapunov/le", json=body)
        assert response.status_code == 200
        assert response.json()["outputs"]["le"] == pytest.approx(math.log(2))

    def test_matrix_paths_rejected(self, client):
        """File paths are not read over HTTP."""
        response = client.post(f"{API}/lyapunov/le", json={"matrix": "/etc/passwd"})
        assert response.status_code == 400

    def test_product_length_limit(self, client):
        """Product lengths above API_MAX_STEPS are refused."""
        body = {"matrix": {"matrix": [[1, 0], [0, 1]]}, "n": settings.API_MAX_STEPS + 1}
        response = client.post(f"{API}/lyapunov/le", json=body)
        assert response.status_code == 400
        assert "exceeds" in response.json()["detail"]

    @pytest.mark.parametrize("endpoint,extra", [("sweep", {}), ("accel", {"at": [0.1]})])
    def test_sweep_grid_limit(self, client, endpoint, extra):
        """Sweep grids longer than API_MAX_STEPS are refused before any work is done."""
        body = {"lambda": "0,0.5,0", "E": 0.0, "steps": settings.API_MAX_STEPS + 1, **extra}
        response = client.post(f"{API}/lyapunov/{endpoint}", json=body)
        assert response.status_code == 400
        assert f"steps={settings.API_MAX_STEPS + 1}" in response.json()["detail"]

    def test_accel_at_kink(self, client):
        """Acceleration at a kink is reported, not an error."""
        body = {
            "matrix": {"matrix": [[{"coeffs": [[-1, 1.0, 0.0]]}, 0], [0, 1]]},
            "beta": "1/3",
            "backend": "rational",
            "steps": 21,
            "at": [0.02],
        }
        response = client.post(f"{API}/lyapunov/accel", json=body)
        assert response.status_code == 200
        assert response.json()["rows"][0]["at_kink"] is True


def test_spectrum_floquet(client):
    """Floquet spectrum with mid-band energies inside the norm bound."""
    body = {"lambda": "0,0.5,0", "method": "floquet", "beta": "1/2", "theta_samples": 4, "mid_bands": 2}
    response = client.post(f"{API}/spectrum", json=body)
    assert response.status_code == 200
    outputs = response.json()["outputs"]
    assert outputs["method"] == "floquet"
    assert len(outputs["mid_band_energies"]) == 2
    assert outputs["max"] <= outputs["hamiltonian_bound"]
