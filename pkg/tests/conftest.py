import numpy as np
import pytest

from dsrn_scatter import BlackHoleParams, build_profile, extract_scattering

# Reference configuration used throughout: admissible, charged, massive.
CANONICAL = BlackHoleParams(M=1.0, Q=0.5, Lambda=0.05, m_dirac=0.1,
                            q_dirac=0.2)


@pytest.fixture(scope="session")
def prof():
    return build_profile(CANONICAL)


@pytest.fixture(scope="session")
def prof_massless():
    return build_profile(BlackHoleParams(M=1.0, Q=0.5, Lambda=0.05,
                                         m_dirac=0.0, q_dirac=0.0))


@pytest.fixture(scope="session")
def scatter_cache(prof):
    """Memoized extract_scattering over (lam, n) to share across tests."""
    cache = {}

    def get(lam, n, **kw):
        key = (lam, complex(n), tuple(sorted(kw.items())))
        if key not in cache:
            cache[key] = extract_scattering(lam, n, prof, **kw)
        return cache[key]

    return get


def rel_dev(a, b):
    """Entrywise sup deviation relative to the larger participant scale."""
    a = np.asarray(a)
    b = np.asarray(b)
    scale = max(1.0, float(np.abs(a).max()), float(np.abs(b).max()))
    return float(np.abs(a - b).max() / scale)
