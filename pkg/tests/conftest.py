import pytest

from ar_bridge.models import RngStream
from ar_bridge.schemas.process import ProcessSpec
from ar_bridge.services.fit import fit
from ar_bridge.services.process import simulate


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow Monte Carlo tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def ar1_truth():
    return ProcessSpec.finite_ar([0.9])


@pytest.fixture
def ar2_truth():
    return ProcessSpec.finite_ar([0.8, 0.64])


@pytest.fixture
def ma1_truth():
    return ProcessSpec.ma1(-0.8)


@pytest.fixture
def ar1_series(ar1_truth):
    return simulate(ar1_truth, 2000, RngStream(11))


@pytest.fixture
def ar2_series(ar2_truth):
    return simulate(ar2_truth, 1010, RngStream(42))


@pytest.fixture
def ar2_fit(ar2_series):
    return fit(ar2_series, 10)


@pytest.fixture
def ar2_csv(tmp_path, ar2_series):
    path = tmp_path / "ar2.csv"
    path.write_text("x\n" + "\n".join(repr(float(v)) for v in ar2_series) + "\n")
    return path


@pytest.fixture
def rng():
    return RngStream(2024)


@pytest.fixture(scope="session")
def fit_tables():
    """Fit tables of AR(2) series with varying coefficients, for structural checks."""
    tables = []
    for seed in range(25):
        stream = RngStream(1000 + seed)
        alpha = stream.generator.uniform(-0.9, 0.9)
        data = simulate(ProcessSpec.finite_ar([alpha, alpha * alpha]), 400, stream)
        tables.append(fit(data, 7))
    return tables
