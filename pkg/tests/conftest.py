import numpy as np
import pytest

from starkit import symbols as sym


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)


def random_polynomial(rng, max_degree=4, n_terms=5, scale=0.25):
    coeffs = {}
    for _ in range(n_terms):
        pp = int(rng.integers(0, max_degree + 1))
        pq = int(rng.integers(0, max_degree + 1 - pp))
        c = complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))
        coeffs[(pp, pq)] = coeffs.get((pp, pq), 0j) + c
    return sym.poly_symbol(coeffs)


def random_symbol(rng, n_terms=2, real=False):
    """Random member of the polynomial x Gaussian class, decaying at infinity."""
    raw = []
    for _ in range(n_terms):
        def c(lo, hi):
            re = rng.uniform(lo, hi)
            im = 0.0 if real else rng.uniform(-0.2, 0.2)
            return complex(re, im)

        expo = sym.QuadExponent(app=c(-1.0, -0.3), aqq=c(-1.0, -0.3),
                                apq=c(-0.2, 0.2), bp=c(-0.3, 0.3),
                                bq=c(-0.3, 0.3))
        coeff = complex(rng.uniform(-1, 1),
                        0.0 if real else rng.uniform(-1, 1))
        raw.append(sym.Term(coeff, int(rng.integers(0, 3)),
                            int(rng.integers(0, 3)), expo))
    return sym.normalize(raw)
