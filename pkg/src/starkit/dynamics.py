"""Evolution equations and the exact classical-flow solution.

The corrected damped equation

    i hbar d(rho)/dt = H *_{-gamma} rho - rho *_{gamma} H

keeps real states real and reduces exactly to the damped classical
advection for the quadratic Hamiltonian, so the evolved state is the
initial symbol composed with the backward classical flow.  The rejected
(naive) commutator equation is kept as a falsification exhibit: its extra
term i gamma hbar d_p d_q rho breaks reality for gamma > 0.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import symbols as sym
from .errors import PositivityError
from .oscillator import energy, hamiltonian, sho_offdiagonal
from .star import damped_ad, damped_star, moyal_star, star_commutator
from .symbols import Params, Term


@dataclass(frozen=True)
class FlowMap:
    """Linear damped flow on column (q, p): x(t) = L x(0)."""

    L: tuple  # ((L_qq, L_qp), (L_pq, L_pp))
    t: float
    regime: str

    def matrix(self):
        return np.array(self.L, dtype=np.float64)


def flow_map(t, params=Params()):
    """Exact solution map of qdot = p/m, pdot = -m w^2 q - 2 gamma p.

    Underdamped uses Omega = sqrt(w^2 - g^2) sinusoids, overdamped the
    hyperbolic analogue, and within 1e-12 of g = w the critical formula;
    the three branches agree continuously across the boundaries.
    """
    m, w, g = params.m, params.omega, params.gamma
    regime = params.regime
    decay = math.exp(-g * t)
    if regime == "critical":
        s, c = t, 1.0
    elif regime == "underdamped":
        om = math.sqrt(w * w - g * g)
        s, c = math.sin(om * t) / om, math.cos(om * t)
    else:
        om = math.sqrt(g * g - w * w)
        s, c = math.sinh(om * t) / om, math.cosh(om * t)
    L = ((decay * (c + g * s), decay * s / m),
         (-decay * m * w * w * s, decay * (c - g * s)))
    return FlowMap(L, t, regime)


def pullback(rho, flow):
    """Substitute the linear map into the symbol: (rho o L)(x) = rho(L x).

    Monomials expand binomially; quadratic exponents transform by
    congruence L^T A L; exact within the class.
    """
    L = flow.matrix()
    lqq, lqp = L[0]
    lpq, lpp = L[1]
    raw = []
    for t in rho.terms:
        e = t.expo
        A = np.array([[e.aqq, e.apq / 2.0], [e.apq / 2.0, e.app]],
                     dtype=np.complex128)
        b = np.array([e.bq, e.bp], dtype=np.complex128)
        A2 = L.T @ A @ L
        b2 = L.T @ b
        expo = sym.QuadExponent(app=A2[1, 1], aqq=A2[0, 0],
                                apq=A2[0, 1] + A2[1, 0], bp=b2[1], bq=b2[0])
        # (lqq q + lqp p)^pow_q (lpq q + lpp p)^pow_p
        for i in range(t.pow_q + 1):
            ci = (math.comb(t.pow_q, i) * lqq ** i * lqp ** (t.pow_q - i))
            if ci == 0:
                continue
            for j in range(t.pow_p + 1):
                cj = (math.comb(t.pow_p, j) * lpq ** j * lpp ** (t.pow_p - j))
                if cj == 0:
                    continue
                raw.append(Term(t.coeff * ci * cj,
                                (t.pow_q - i) + (t.pow_p - j), i + j, expo))
    return sym.normalize(raw)


def evolve_classical(rho0, t, params=Params()):
    """Exact evolution: the initial symbol along the backward flow."""
    return pullback(rho0, flow_map(-t, params))


def damped_rhs(rho, params=Params()):
    """d(rho)/dt of the corrected equation, (H *_{-g} rho - rho *_g H)/(i hbar).

    Real for real rho, and identical to -{rho, H}_gamma for the quadratic
    Hamiltonian (second-order star terms cancel between the two products).
    """
    return sym.scale(damped_ad(hamiltonian(params), rho, params.gamma, params),
                     1.0 / (1j * params.hbar))


def naive_rhs(rho, params=Params()):
    """d(rho)/dt of the rejected commutator equation, -[rho, H]_g / (i hbar).

    Expands to the moyal part plus i gamma hbar d_p d_q rho; that extra
    term is imaginary on real states, which is why it was rejected.
    """
    comm = star_commutator(rho, hamiltonian(params),
                           damped_star(params.gamma, params))
    return sym.scale(comm, -1.0 / (1j * params.hbar))


def moyal_rhs(rho, params=Params()):
    """Undamped part -[rho, H]_star / (i hbar) of the naive equation."""
    comm = star_commutator(rho, hamiltonian(params), moyal_star(params))
    return sym.scale(comm, -1.0 / (1j * params.hbar))


def reality_defect(rho_dot):
    """Sup over the sample lattice of |Im rho_dot|."""
    if rho_dot.is_zero():
        return 0.0
    P, Q = sym.SAMPLE_SPEC.meshes()
    return float(np.abs(sym.evaluate_grid(rho_dot, P, Q).imag).max())


def euler_evolve(rho0, rhs, t, dt):
    """Explicit Euler stepping of a symbol-level right-hand side.

    Used to exhibit the reality defect of the naive equation; not an
    accurate integrator.
    """
    steps = max(1, round(t / dt))
    h = t / steps
    rho = rho0
    for _ in range(steps):
        rho = sym.combine(rho, 1.0, rhs(rho), h)
    return rho


def evolve_eigenexpansion(coeffs, t, params=Params()):
    """Undamped expansion sum R_{n,n'} e^{-i(E_n - E_n') t / hbar} rho_{n,n'}.

    coeffs maps (n, n') index pairs to complex amplitudes (finite support).
    """
    out = sym.ZERO
    for (n, nprime), amp in sorted(coeffs.items()):
        phase = cmath.exp(-1j * (energy(n, params) - energy(nprime, params))
                          * t / params.hbar)
        out = sym.combine(out, 1.0, sho_offdiagonal(n, nprime, params),
                          amp * phase)
    return out


def evolve_damped_ansatz(entries, t, params=Params()):
    """Damped spectral ansatz sum R e^{-i(conj(E) - E') t / hbar} rho_entry.

    Each entry is (amplitude, E, E', symbol) with complex eigenvalues whose
    imaginary parts (decay rates) must be non-negative; each mode's modulus
    then decays like exp(-(Im E + Im E') t / hbar).
    """
    out = sym.ZERO
    for amp, ev, ev_prime, state in entries:
        if ev.imag < 0 or ev_prime.imag < 0:
            raise PositivityError("eigenvalue decay rates must be non-negative")
        phase = cmath.exp(-1j * (ev.conjugate() - ev_prime) * t / params.hbar)
        out = sym.combine(out, 1.0, state, amp * phase)
    return out
