import pytest
from fastapi.testclient import TestClient

from ar_bridge.main import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "healthy"}
    assert response.headers["X-Response-Time"].endswith("ms")


def test_root_redirects_to_docs(client):
    response = client.get("/", follow_redirects=False)
    assert response.status_code == 307
    assert response.headers["location"] == "/docs"


class TestSelection:
    def test_select(self, client, ar2_series):
        response = client.post("/api/v1/selection/select", json={"data": ar2_series.tolist()})
        assert response.status_code == 200
        document = response.json()
        assert document["N"] == 1000
        assert set(document["chosen"]) == {"bc", "aic", "bic", "hq"}
        assert document["chosen"]["bc"] <= document["chosen"]["aic"]

    def test_select_fixed_params(self, client, ar2_series):
        response = client.post(
            "/api/v1/selection/select",
            json={"data": ar2_series.tolist(), "criteria": ["bc"], "lmax": 4, "mn": 3.0},
        )
        assert response.status_code == 200
        assert len(response.json()["scores"]["bc"]) == 4

    def test_lmax_too_large(self, client):
        data = [float((-1) ** k * k % 7) for k in range(20)]
        response = client.post("/api/v1/selection/select", json={"data": data, "lmax": 50})
        assert response.status_code == 422
        assert response.json()["code"] == "domain_error"

    def test_request_validation(self, client):
        response = client.post("/api/v1/selection/select", json={"data": [1.0, 2.0], "lmax": "many"})
        assert response.status_code == 422
        assert "detail" in response.json()

    def test_thresholds(self, client):
        response = client.get("/api/v1/selection/thresholds", params={"n": 500})
        assert response.status_code == 200
        document = response.json()
        assert abs(document["bic_significance_level"] - 0.0127) < 5e-5
        assert len(document["thresholds"]) == document["L_max"] == 7
        assert abs(document["thresholds"][-1]["exact"] - 2 / 500) < 1e-10

    def test_penalty_curves(self, client):
        response = client.get("/api/v1/selection/penalty-curves", params={"n": 1000, "lmax": 6})
        assert response.status_code == 200
        document = response.json()
        assert document["discrete_tangent_points"] == {"aic": 6, "hq": 5, "bic": 1}
        assert abs(document["tangent_points"]["hq"] - 5.6446) < 1e-4
        assert [row["L"] for row in document["curves"]] == [1, 2, 3, 4, 5, 6]

    def test_penalty_curves_hq_constant(self, client):
        response = client.get("/api/v1/selection/penalty-curves", params={"n": 1000, "c": 1.0})
        assert response.status_code == 422


class TestOracle:
    def test_ma1_mismatch(self, client):
        response = client.post(
            "/api/v1/oracle/mismatch",
            json={"truth": {"kind": "ma1", "theta": -0.8}, "coeffs": [0.48780]},
        )
        assert response.status_code == 200
        document = response.json()
        assert abs(document["mismatch"] - 0.24975) < 1e-5
        assert document["order"] == 1
        assert document["cost"] is None

    def test_cost_oracle(self, client):
        response = client.post(
            "/api/v1/oracle/mismatch",
            json={"truth": {"kind": "finite_ar", "coeffs": [0.9]}, "coeffs": [0.9], "n": 1000},
        )
        document = response.json()
        assert document["mismatch"] == 0.0
        assert document["optimal_order"] == 1
        assert document["bic_cost_minimizer"] == 1
        assert abs(document["cost"] - 1 / 1000) < 1e-12

    def test_growing_truth_needs_n(self, client):
        response = client.post(
            "/api/v1/oracle/mismatch", json={"truth": {"kind": "growing_ar"}, "coeffs": [0.5]},
        )
        assert response.status_code == 422
        assert response.json()["code"] == "spec_error"
