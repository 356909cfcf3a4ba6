import numpy as np
import pytest
from hypothesis import settings

import playerfactor as pf

settings.register_profile("suite", deadline=None, derandomize=True, max_examples=60)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def synth():
    """Default synthetic population, generated once: (spec, raw, interpolated,
    planted column indices)."""
    spec = pf.default_synthetic_spec()
    T, planted = pf.generate_population(spec)
    Ti = pf.interpolate_missing(T)
    return spec, T, Ti, planted


@pytest.fixture(scope="session")
def backends():
    """All importable kernel backends (numpy always, cython when built)."""
    from playerfactor._kernels import numpy_backend

    mods = [numpy_backend]
    try:
        from playerfactor._kernels import _fast

        mods.append(_fast)
    except ImportError:
        pass
    return mods


def separated_blobs(seed=5, per=10, centers=((0.0, 0.0), (20.0, 0.0), (10.0, 30.0))):
    """Well-separated 2-D blobs as a (2, len(centers)*per) column matrix."""
    rng = np.random.default_rng(seed)
    cols = []
    for cx, cy in centers:
        cols.append(np.array([cx, cy])[:, None] + rng.normal(scale=0.5, size=(2, per)))
    return np.hstack(cols)
