from pathlib import Path

import numpy as np
import pytest

from desync_lab.core import GapVector, PerceptionMatrix, builtin_topology, perception_matrix

PERIOD = 1000.0
DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def period():
    return PERIOD


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def star_perception():
    def build(n: int) -> PerceptionMatrix:
        return perception_matrix(builtin_topology("star", n), "two-hop")
    return build


@pytest.fixture
def random_perception(rng):
    def build(n: int, density: float = 0.5) -> PerceptionMatrix:
        c = rng.random((n, n)) < density
        np.fill_diagonal(c, False)
        return PerceptionMatrix(c)
    return build


@pytest.fixture
def random_state(rng):
    """Equilibrium plus a zero-sum deviation of at most ``scale`` per gap."""
    def build(n: int, scale: float, period: float = PERIOD) -> GapVector:
        deviation = rng.uniform(-scale, scale, n)
        deviation -= deviation.mean()
        deviation *= scale / max(np.max(np.abs(deviation)), 1e-300)
        return GapVector(np.full(n, period / n) + deviation, period)
    return build


def pytest_addoption(parser):
    parser.addoption("--update-golden", action="store_true", help="rewrite golden trace files under tests/data")


@pytest.fixture
def golden(request):
    """Compare text against tests/data/<name>; the file is written when missing or on --update-golden."""
    update = request.config.getoption("--update-golden")

    def check(name: str, text: str) -> None:
        path = DATA_DIR / name
        if update or not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
            pytest.skip(f"golden file {path.name} written")
        assert text == path.read_text()
    return check
