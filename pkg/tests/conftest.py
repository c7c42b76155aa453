import pytest

from radialkg import kernels
from radialkg.model import GridSpec, InitialData


_SESSION_BACKEND = kernels.selected()


@pytest.fixture(autouse=True)
def _reset_backend():
    yield
    kernels.select(_SESSION_BACKEND)


@pytest.fixture(params=["python", "compiled"])
def backend(request):
    if request.param == "compiled" and not kernels.compiled_available():
        pytest.skip("compiled core not built")
    kernels.select(request.param)
    return request.param


@pytest.fixture
def small_grid():
    return GridSpec(a=0.4, T=0.2, M=20, N=10)


def _zero(r):
    return 0.0 * r


ZERO_DATA = InitialData(phi=_zero, psi=_zero, label="zero-data")


@pytest.fixture
def zero_data():
    return ZERO_DATA


def physical_field(grid, rng, scale=1.0):
    """Random v-level shaped like r*w with w ~ N(0, scale): boundaries zero."""
    v = grid.radii() * scale * rng.standard_normal(grid.M + 1)
    v[0] = v[-1] = 0.0
    return v
