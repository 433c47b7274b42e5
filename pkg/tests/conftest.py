import numpy as np
import pytest

from pingrip.config import SimConfig
from pingrip.terrain import Heightfield


@pytest.fixture(scope="session")
def sim() -> SimConfig:
    return SimConfig()


def flat_field(z: float, width: float = 200.0, depth: float = 80.0,
               origin: tuple[float, float] = (0.0, 0.0), cell: float = 1.0) -> Heightfield:
    """Constant-elevation heightfield with an exact analytic surface."""
    nx = int(round(width / cell)) + 1
    ny = int(round(depth / cell)) + 1
    vals = np.full((ny, nx), float(z))
    return Heightfield(origin[0], origin[1], cell, vals,
                       analytic=lambda x, y: np.full(np.broadcast(x, y).shape, float(z)))
