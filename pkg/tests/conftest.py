import numpy as np
import pytest

from lungct.core import Geometry, Mask3D, Volume3D


def make_mask(bits, spacing=(1.0, 1.0, 1.0), origin=(0.0, 0.0, 0.0)):
    """Mask from a (nz, ny, nx) array-like."""
    arr = np.asarray(bits, dtype=bool)
    nz, ny, nx = arr.shape
    return Mask3D(geometry=Geometry(dims=(nx, ny, nz), spacing=spacing, origin=origin), bits=arr)


def make_volume(values, spacing=(1.0, 1.0, 1.0), origin=(0.0, 0.0, 0.0)):
    """Volume from a (nz, ny, nx) array-like."""
    arr = np.asarray(values, dtype=np.float64)
    nz, ny, nx = arr.shape
    return Volume3D(
        geometry=Geometry(dims=(nx, ny, nz), spacing=spacing, origin=origin), values=arr
    )


def random_mask(rng, shape=(16, 16, 16), density=0.5, **kw):
    return make_mask(rng.random(shape) < density, **kw)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
