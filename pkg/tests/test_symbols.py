import numpy as np
import pytest

import starkit as sk
from starkit import symbols as sym
from starkit.errors import ExponentOverflowError, NonFiniteError

from conftest import random_symbol


def test_normalize_exact_cancellation():
    out = sym.normalize([sym.Term(1.0, 0, 0), sym.Term(-1.0, 0, 0)])
    assert out.is_zero()


def test_normalize_coefficient_addition():
    out = sym.normalize([sym.Term(2.0, 1, 0), sym.Term(3.0, 1, 0)])
    assert len(out.terms) == 1
    assert out.terms[0].coeff == 5.0
    assert (out.terms[0].pow_p, out.terms[0].pow_q) == (1, 0)


def test_normalize_merges_nearby_exponents():
    e1 = sym.QuadExponent(app=-1.0)
    e2 = sym.QuadExponent(app=-1.0 + 1e-14)
    merged = sym.normalize([sym.Term(1.0, 0, 0, e1), sym.Term(1.0, 0, 0, e2)])
    assert len(merged.terms) == 1
    # merged symbol evaluates like the unmerged sum
    direct = sym.gaussian(1.0, app=-1.0) + sym.gaussian(1.0, app=-1.0 + 1e-14)
    assert sym.residual(merged, direct) < 1e-10


def test_normalize_rejects_non_finite():
    with pytest.raises(NonFiniteError):
        sym.normalize([sym.Term(float("nan"), 0, 0)])
    with pytest.raises(NonFiniteError):
        sym.normalize([sym.Term(1.0, 0, 0, sym.QuadExponent(app=float("inf")))])


def test_combine_is_linear(rng):
    f = random_symbol(rng)
    g = random_symbol(rng)
    assert sym.combine(f, 1.0, f, -1.0).is_zero()
    s = sym.combine(f, 2.0, g, -3.0)
    for _ in range(5):
        p, q = rng.uniform(-2, 2, size=2)
        expected = 2.0 * sym.evaluate(f, p, q) - 3.0 * sym.evaluate(g, p, q)
        assert abs(sym.evaluate(s, p, q) - expected) < 1e-12


def test_combine_doubles():
    rho = sk.sho_wigner_eigenstate(0)
    doubled = sym.combine(rho, 1.0, rho, 1.0)
    for p, q in [(0, 0), (1, 0), (0, 1), (1, -1), (-2, 0.5)]:
        assert abs(sym.evaluate(doubled, p, q)
                   - 2 * sym.evaluate(rho, p, q)) < 1e-14


def test_pointwise_multiply():
    q = sym.variable("q")
    p = sym.variable("p")
    qp = sym.pointwise_multiply(q, p)
    assert len(qp.terms) == 1
    assert (qp.terms[0].pow_p, qp.terms[0].pow_q) == (1, 1)

    ga = sym.gaussian(1.0, aqq=-1.0)
    gb = sym.gaussian(1.0, app=-1.0)
    gc = sym.pointwise_multiply(ga, gb)
    assert len(gc.terms) == 1
    assert gc.terms[0].expo == sym.QuadExponent(app=-1.0, aqq=-1.0)

    one_plus = sym.poly_symbol({(0, 0): 1.0, (0, 1): 1.0})
    one_minus = sym.poly_symbol({(0, 0): 1.0, (0, 1): -1.0})
    assert sym.residual(sym.pointwise_multiply(one_plus, one_minus),
                        sym.poly_symbol({(0, 0): 1.0, (0, 2): -1.0})) == 0


def test_differentiate_polynomials():
    p2 = sym.monomial(1.0, 2, 0)
    d = sym.differentiate(p2, "p")
    assert sym.residual(d, sym.monomial(2.0, 1, 0)) == 0


def test_differentiate_gaussian_chain_rule():
    alpha = -0.7 + 0.2j
    g = sym.gaussian(1.0, app=alpha)
    d = sym.differentiate(g, "p")
    expected = sym.normalize([sym.Term(2 * alpha, 1, 0,
                                       sym.QuadExponent(app=alpha))])
    assert sym.residual(d, expected) == 0


def _fd_mixed(f, p, q, h=1e-4):
    """Richardson-extrapolated central difference for d2 f / dp dq."""
    def mixed(hh):
        return (sym.evaluate(f, p + hh, q + hh) - sym.evaluate(f, p + hh, q - hh)
                - sym.evaluate(f, p - hh, q + hh)
                + sym.evaluate(f, p - hh, q - hh)) / (4 * hh * hh)

    return (4.0 * mixed(h / 2) - mixed(h)) / 3.0


def test_differentiate_matches_finite_differences():
    rho = sk.sho_wigner_eigenstate(0)
    d = sym.differentiate(sym.differentiate(rho, "p"), "q")
    assert abs(sym.evaluate(d, 1.0, 1.0) - _fd_mixed(rho, 1.0, 1.0)) < 1e-6


def test_differentiate_higher_order_is_iterated(rng):
    f = random_symbol(rng)
    assert sym.residual(sym.differentiate(f, "p", 2),
                        sym.differentiate(sym.differentiate(f, "p"), "p")) == 0


def _structurally_equal(a, b, tol=1e-13):
    """Same canonical term structure; coefficients equal to rounding."""
    if len(a.terms) != len(b.terms):
        return False
    for ta, tb in zip(a.terms, b.terms):
        if (ta.pow_p, ta.pow_q) != (tb.pow_p, tb.pow_q):
            return False
        if any(abs(x - y) > sym.MERGE_TOL for x, y in
               zip(ta.expo.entries(), tb.expo.entries())):
            return False
        if abs(ta.coeff - tb.coeff) > tol * (1.0 + abs(ta.coeff)):
            return False
    return True


def test_mixed_partials_commute(rng):
    # equality is structural term-by-term; coefficients agree to rounding
    # (float products associate differently between the two orders)
    for _ in range(50):
        f = random_symbol(rng)
        a = sym.differentiate(sym.differentiate(f, "p"), "q")
        b = sym.differentiate(sym.differentiate(f, "q"), "p")
        assert _structurally_equal(a, b)


def test_conjugate():
    f = sym.monomial(1j, 0, 1)
    assert sym.residual(sym.conjugate(f), sym.monomial(-1j, 0, 1)) == 0
    rho = sk.sho_wigner_eigenstate(0)
    assert sym.conjugate(rho) == rho


def test_conjugate_involution_and_evaluation(rng):
    for _ in range(10):
        f = random_symbol(rng)
        assert sym.conjugate(sym.conjugate(f)) == f
        p, q = rng.uniform(-2, 2, size=2)
        assert abs(sym.evaluate(sym.conjugate(f), p, q)
                   - sym.evaluate(f, p, q).conjugate()) < 1e-14


def test_conjugate_propagator_reverses_time():
    U = sk.undamped_propagator(0.3)
    Um = sk.undamped_propagator(-0.3)
    assert sym.residual(sym.conjugate(U), Um) < 1e-10


def test_evaluate_frozen_values():
    par = sym.Params()
    assert sym.evaluate(sk.sho_wigner_eigenstate(0, par), 0, 0) == 2.0
    assert sym.evaluate(sk.hamiltonian(par), 1, 1) == 1.0
    assert sym.evaluate(sk.sho_wigner_eigenstate(1, par), 0, 0) == -2.0


def test_evaluate_overflow():
    g = sym.gaussian(1.0, app=1.0)
    with pytest.raises(ExponentOverflowError):
        sym.evaluate(g, 40.0, 0.0)
    with pytest.raises(ExponentOverflowError):
        sym.evaluate_grid(g, np.array([[40.0]]), np.array([[0.0]]))


def test_approx_equal():
    f = sk.sho_wigner_eigenstate(0)
    assert sym.approx_equal(f, f, 1e-10).ok
    qp = sk.star_product(sym.variable("q"), sym.variable("p"), sk.moyal_star())
    target = sym.poly_symbol({(1, 1): 1.0, (0, 0): 0.5j})
    cmp = sym.approx_equal(qp, target, 1e-12)
    assert cmp.ok and cmp.residual == 0.0
    assert not sym.approx_equal(sk.sho_wigner_eigenstate(0),
                                sk.sho_wigner_eigenstate(1), 1e-6)


def test_ring_axioms_on_samples(rng):
    for _ in range(10):
        f, g, h = (random_symbol(rng) for _ in range(3))
        comm = sym.residual(sym.pointwise_multiply(f, g),
                            sym.pointwise_multiply(g, f))
        fg_h = sym.pointwise_multiply(sym.pointwise_multiply(f, g), h)
        f_gh = sym.pointwise_multiply(f, sym.pointwise_multiply(g, h))
        dist = sym.residual(
            sym.pointwise_multiply(f, sym.combine(g, 1.0, h, 1.0)),
            sym.combine(sym.pointwise_multiply(f, g), 1.0,
                        sym.pointwise_multiply(f, h), 1.0))
        scale = 1.0 + sym.sup_norm(fg_h)
        assert comm == 0.0
        assert sym.residual(fg_h, f_gh) <= 1e-12 * scale
        assert dist <= 1e-12 * scale


def test_params_regimes():
    assert sym.Params(gamma=0.5).regime == "underdamped"
    assert sym.Params(gamma=1.0).regime == "critical"
    assert sym.Params(gamma=1.5).regime == "overdamped"
    with pytest.raises(ValueError):
        sym.Params(m=-1.0)
    with pytest.raises(ValueError):
        sym.Params(gamma=-0.1)
    with pytest.raises(NonFiniteError):
        sym.Params(omega=float("nan"))


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        sym.GridSpec(1.0, -1.0, -1.0, 1.0, 5, 5)
    with pytest.raises(ValueError):
        sym.GridSpec(-1.0, 1.0, -1.0, 1.0, 1, 5)
