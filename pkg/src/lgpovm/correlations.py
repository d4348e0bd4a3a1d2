"""Two-time correlations and the Leggett-Garg combination.

Dynamics follow ``H = Omega J^2 + omega J_x``. On a single spin-j irrep
``J^2 = j(j+1)`` so the Omega term only contributes a global phase, which is
nevertheless carried through every evolution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, OutcomeImpossibleError
from .measurability import MeasurabilityPovm, validate_density
from .spin_ops import HalfInt, SpinSystem, jsquared_matrix, jx_matrix, rotation_x

__all__ = [
    "P_THRESHOLD",
    "DynamicsParams",
    "CorrelationBreakdown",
    "LgiResult",
    "maximally_mixed",
    "hamiltonian",
    "evolution",
    "post_state",
    "two_time_correlation",
    "correlation_closed_form",
    "k_lg",
    "k_lg_four_measurements",
]

P_THRESHOLD = 1e-14
SIGNS = (+1, -1)


@dataclass(frozen=True)
class DynamicsParams:
    j: HalfInt
    omega: float = 1.0
    Omega: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "j", HalfInt.parse(self.j))
        for name in ("omega", "Omega"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidInputError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    @property
    def sys(self) -> SpinSystem:
        return SpinSystem(self.j)


@dataclass(frozen=True)
class CorrelationBreakdown:
    p_plus: float
    p_minus: float
    q: dict  # (later sign, earlier sign) -> q_{later|earlier}
    C: float


@dataclass(frozen=True)
class LgiResult:
    theta: float
    b: float | None
    C12: float
    C23: float
    C34: float
    C14: float

    @property
    def K(self) -> float:
        return self.C12 + self.C23 + self.C34 - self.C14

    @property
    def violated(self) -> bool:
        return abs(self.K) > 2


def maximally_mixed(sys: SpinSystem) -> np.ndarray:
    return np.eye(sys.dim, dtype=complex) / sys.dim


def hamiltonian(sys: SpinSystem, dyn: DynamicsParams) -> np.ndarray:
    return dyn.Omega * jsquared_matrix(sys) + dyn.omega * jx_matrix(sys)


def evolution(sys: SpinSystem, dyn: DynamicsParams, dt: float) -> np.ndarray:
    """``exp(-i H dt)`` as the Omega phase times ``exp(-i omega dt J_x)``."""
    dt = float(dt)
    if not math.isfinite(dt):
        raise InvalidInputError(f"time gap must be finite, got {dt}")
    j = float(sys.j)
    phase = np.exp(-1j * dyn.Omega * j * (j + 1) * dt)
    return phase * rotation_x(sys, dyn.omega * dt)


def _check_dims(povm: MeasurabilityPovm, dyn: DynamicsParams) -> SpinSystem:
    sys = dyn.sys
    if povm.dim != sys.dim:
        raise InvalidInputError(f"POVM dimension {povm.dim} does not match {sys}")
    return sys


def _real_trace(x: np.ndarray) -> float:
    t = np.trace(x)
    if abs(t.imag) > 1e-12:
        raise ArithmeticError(f"trace has imaginary part {t.imag:.3e}")
    return float(t.real)


def post_state(rho, povm: MeasurabilityPovm, sign: int, p_threshold: float = P_THRESHOLD):
    """Outcome probability ``Tr[E rho]`` and the conditional state ``M rho M^dag / p``."""
    rho = validate_density(rho, povm.dim)
    p = _real_trace(povm.effect(sign) @ rho)
    if p <= p_threshold:
        raise OutcomeImpossibleError(sign, p)
    M = povm.kraus(sign)
    return p, M @ rho @ M.conj().T / p


def two_time_correlation(povm: MeasurabilityPovm, rho0, dyn: DynamicsParams, dt: float) -> CorrelationBreakdown:
    """Measure at the earlier time on ``rho0``, evolve by ``dt``, measure again.

    ``q[(s2, s1)]`` is the probability of the later outcome ``s2`` given the
    earlier outcome ``s1``.
    """
    sys = _check_dims(povm, dyn)
    U = evolution(sys, dyn, dt)
    p = {}
    q = {}
    for s1 in SIGNS:
        p[s1], rho_s = post_state(rho0, povm, s1)
        evolved = U @ rho_s @ U.conj().T
        for s2 in SIGNS:
            q[(s2, s1)] = _real_trace(povm.effect(s2) @ evolved)
    C = sum(s1 * s2 * p[s1] * q[(s2, s1)] for s1 in SIGNS for s2 in SIGNS)
    return CorrelationBreakdown(p[+1], p[-1], q, float(C))


def correlation_closed_form(A, sys: SpinSystem, theta: float) -> float:
    """``Tr[A U A U^dag]/(2j+1)`` for the maximally mixed initial state."""
    A = np.asarray(A)
    U = rotation_x(sys, theta)
    return _real_trace(A @ U @ A @ U.conj().T) / sys.dim


def _state_at(rho0, U) -> np.ndarray:
    return U @ rho0 @ U.conj().T


def k_lg(povm: MeasurabilityPovm, rho0, dyn: DynamicsParams, gaps) -> LgiResult:
    """Two-measurement-per-run K = C12 + C23 + C34 - C14 with t1 = 0.

    ``rho0`` is the state at t1; it is evolved freely (no intermediate
    measurement) to the earlier time of each pair.
    """
    sys = _check_dims(povm, dyn)
    dt12, dt23, dt34 = (float(g) for g in gaps)
    rho0 = validate_density(rho0, sys.dim)
    starts = {1: 0.0, 2: dt12, 3: dt12 + dt23}

    def corr(k, gap):
        rho_k = _state_at(rho0, evolution(sys, dyn, starts[k]))
        return two_time_correlation(povm, rho_k, dyn, gap).C

    b = povm.param.b if povm.param is not None else None
    return LgiResult(
        theta=dyn.omega * dt12,
        b=b,
        C12=corr(1, dt12),
        C23=corr(2, dt23),
        C34=corr(3, dt34),
        C14=corr(1, dt12 + dt23 + dt34),
    )


def k_lg_four_measurements(povm: MeasurabilityPovm, rho0, dyn: DynamicsParams, gaps) -> LgiResult:
    """Control protocol: all four measurements are made in every run.

    The joint outcome distribution over (s1, s2, s3, s4) is built by
    branching on unnormalized post-measurement states; every correlation is a
    marginal of that one distribution.
    """
    sys = _check_dims(povm, dyn)
    rho0 = validate_density(rho0, sys.dim)
    Us = [evolution(sys, dyn, g) for g in gaps]

    branches = {(): rho0}
    for step in range(4):
        nxt = {}
        for outcomes, rho in branches.items():
            if step:
                rho = _state_at(rho, Us[step - 1])
            for s in SIGNS:
                M = povm.kraus(s)
                nxt[outcomes + (s,)] = M @ rho @ M.conj().T
        branches = nxt
    joint = {k: _real_trace(v) for k, v in branches.items()}

    def corr(a, b):
        return sum(s[a] * s[b] * p for s, p in joint.items())

    return LgiResult(
        theta=dyn.omega * float(gaps[0]),
        b=povm.param.b if povm.param is not None else None,
        C12=corr(0, 1),
        C23=corr(1, 2),
        C34=corr(2, 3),
        C14=corr(0, 3),
    )

