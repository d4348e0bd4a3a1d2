"""Imperfect-parity POVM parameterized by measurability.

The measurability is carried as ``b = exp(-1/(2 sigma^2))`` so that the
Gaussian weight of a level at integer distance ``k`` from its optimally
measured value is exactly ``b**(k*k)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, InvalidStateError
from .spin_ops import HalfInt, SpinSystem, parity_matrix

__all__ = [
    "Block",
    "Partition",
    "MeasurabilityParam",
    "MeasurabilityPovm",
    "NeumarkReport",
    "f_value",
    "sigma_to_b",
    "uniform_partition",
    "edge_partition_5_2",
    "build_A",
    "build_povm",
    "neumark_verify",
    "validate_density",
]

DIAG_TOL = 1e-12


@dataclass(frozen=True)
class Block:
    mu: HalfInt
    members: tuple[HalfInt, ...]


@dataclass(frozen=True)
class Partition:
    """Disjoint cover of the m levels by blocks, each with its optimally measured ``mu``."""

    sys: SpinSystem
    blocks: tuple[Block, ...]

    def __post_init__(self):
        blocks = tuple(
            Block(HalfInt.parse(b.mu), tuple(HalfInt.parse(m) for m in b.members))
            if isinstance(b, Block)
            else Block(HalfInt.parse(b[0]), tuple(HalfInt.parse(m) for m in b[1]))
            for b in self.blocks
        )
        object.__setattr__(self, "blocks", blocks)
        seen = []
        for block in blocks:
            if not block.members:
                raise InvalidInputError("partition block has no members")
            if block.mu not in block.members:
                raise InvalidInputError(f"mu={block.mu} is not among its block's members")
            for m in block.members:
                self.sys.index_of(m)
            seen.extend(block.members)
        if len(seen) != len(set(seen)):
            raise InvalidInputError("partition blocks overlap")
        if set(seen) != set(self.sys.m_values):
            missing = sorted(set(self.sys.m_values) - set(seen), reverse=True)
            raise InvalidInputError(f"partition does not cover m = {', '.join(map(str, missing))}")

    def offsets(self) -> np.ndarray:
        """Integer ``m - mu(m)`` for every basis index."""
        out = np.zeros(self.sys.dim, dtype=int)
        for block in self.blocks:
            for m in block.members:
                out[self.sys.index_of(m)] = (m - block.mu).as_int()
        return out


def sigma_to_b(sigma: float) -> float:
    sigma = float(sigma)
    if not sigma > 0 or math.isnan(sigma):
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    if math.isinf(sigma):
        return 1.0
    return math.exp(-1.0 / (2.0 * sigma * sigma))


@dataclass(frozen=True)
class MeasurabilityParam:
    b: float
    sigma: float | None = None

    def __post_init__(self):
        b = float(self.b)
        if not 0.0 <= b <= 1.0:
            raise InvalidInputError(f"b must lie in [0, 1], got {self.b}")
        if self.sigma is not None and abs(b - sigma_to_b(self.sigma)) > 1e-12:
            raise InvalidInputError(f"b={b} is inconsistent with sigma={self.sigma}")
        object.__setattr__(self, "b", b)

    @classmethod
    def from_sigma(cls, sigma: float) -> MeasurabilityParam:
        return cls(sigma_to_b(sigma), float(sigma))


def _as_param(param) -> MeasurabilityParam:
    return param if isinstance(param, MeasurabilityParam) else MeasurabilityParam(param)


def f_value(offset: int, param) -> float:
    """Weight ``b**(offset**2)``; ``0**0 == 1`` so the optimally measured level always keeps weight 1."""
    b = _as_param(param).b
    k2 = int(offset) ** 2
    if k2 == 0:
        return 1.0
    return b**k2


def uniform_partition(sys: SpinSystem, block_size: int) -> Partition:
    """Consecutive blocks of ``block_size`` levels with ``mu`` at each block's centre."""
    if isinstance(block_size, bool) or int(block_size) != block_size or block_size < 1:
        raise InvalidInputError(f"block size must be a positive integer, got {block_size!r}")
    block_size = int(block_size)
    if block_size % 2 == 0:
        raise InvalidInputError(f"block size {block_size} is even; a central mu needs an odd size")
    if sys.dim % block_size:
        raise InvalidInputError(f"block size {block_size} does not divide 2j+1 = {sys.dim}")
    levels = sys.m_values
    blocks = []
    for start in range(0, sys.dim, block_size):
        members = levels[start : start + block_size]
        blocks.append(Block(members[block_size // 2], members))
    return Partition(sys, tuple(blocks))


def edge_partition_5_2() -> Partition:
    """j = 5/2 with mu = +-5/2 optimally measured and the levels split at m = 0."""
    sys = SpinSystem.of("5/2")
    up = tuple(HalfInt(t) for t in (5, 3, 1))
    down = tuple(HalfInt(t) for t in (-1, -3, -5))
    return Partition(sys, (Block(HalfInt(5), up), Block(HalfInt(-5), down)))


def build_A(partition: Partition, param) -> np.ndarray:
    param = _as_param(param)
    signs = np.diag(parity_matrix(partition.sys))
    weights = np.array([f_value(k, param) for k in partition.offsets()])
    return np.diag(signs * weights)


@dataclass(frozen=True, eq=False)
class MeasurabilityPovm:
    A: np.ndarray
    E_plus: np.ndarray
    E_minus: np.ndarray
    M_plus: np.ndarray
    M_minus: np.ndarray
    partition: Partition | None = None
    param: MeasurabilityParam | None = None

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def effect(self, sign: int) -> np.ndarray:
        return self.E_plus if sign > 0 else self.E_minus

    def kraus(self, sign: int) -> np.ndarray:
        return self.M_plus if sign > 0 else self.M_minus


def build_povm(A: np.ndarray, partition: Partition | None = None, param=None) -> MeasurabilityPovm:
    """Two-outcome POVM ``E_pm = (1 pm A)/2`` with Hermitian square-root measurement operators."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError("measurability operator must be a square matrix")
    if np.max(np.abs(A - np.diag(np.diag(A)))) > DIAG_TOL or np.max(np.abs(np.imag(np.diag(A)))) > DIAG_TOL:
        raise InvalidInputError("measurability operator must be real diagonal")
    a = np.real(np.diag(A)).astype(float)
    if np.any(np.abs(a) > 1 + DIAG_TOL):
        raise InvalidInputError(f"measurability operator has eigenvalue {a[np.argmax(np.abs(a))]:.6g} outside [-1, 1]")
    a = np.clip(a, -1.0, 1.0)
    e_plus = (1 + a) / 2
    e_minus = (1 - a) / 2
    return MeasurabilityPovm(
        A=np.diag(a),
        E_plus=np.diag(e_plus),
        E_minus=np.diag(e_minus),
        M_plus=np.diag(np.sqrt(e_plus)),
        M_minus=np.diag(np.sqrt(e_minus)),
        partition=partition,
        param=None if param is None else _as_param(param),
    )


def validate_density(rho, dim: int | None = None, tol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError("density matrix must be square")
    if dim is not None and rho.shape[0] != dim:
        raise InvalidStateError(f"density matrix has dimension {rho.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(rho)):
        raise InvalidStateError("density matrix has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise InvalidStateError(f"density matrix has trace {np.trace(rho).real:.6g}")
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0] < -tol:
        raise InvalidStateError("density matrix is not positive semidefinite")
    return rho


@dataclass(frozen=True)
class NeumarkReport:
    isometry_error: float
    probability_error: float
    state_error: float

    @property
    def max_deviation(self) -> float:
        return max(self.isometry_error, self.probability_error, self.state_error)


def neumark_verify(povm: MeasurabilityPovm, rho, p_threshold: float = 1e-14) -> NeumarkReport:
    """Dilate the POVM to a projective ancilla measurement and compare both pictures.

    The isometry is ``V = M+ (x) |+> + M- (x) |->`` into system (x) qubit, with
    ``|+> = (1, 0)`` and ``|-> = (0, 1)`` on the ancilla.
    """
    d = povm.dim
    rho = validate_density(rho, d)
    ket = {+1: np.array([[1.0], [0.0]]), -1: np.array([[0.0], [1.0]])}
    V = np.kron(povm.M_plus, ket[+1]) + np.kron(povm.M_minus, ket[-1])
    isometry_error = float(np.max(np.abs(V.conj().T @ V - np.eye(d))))

    big = V @ rho @ V.conj().T
    prob_err = 0.0
    state_err = 0.0
    for sign in (+1, -1):
        proj = np.kron(np.eye(d), ket[sign] @ ket[sign].T)
        branch = proj @ big @ proj
        p_anc = np.trace(branch).real
        p_sys = np.trace(povm.effect(sign) @ rho).real
        prob_err = max(prob_err, abs(p_anc - p_sys))
        if p_sys <= p_threshold:
            continue
        # partial trace over the ancilla (last tensor factor)
        reduced = np.einsum("iaja->ij", branch.reshape(d, 2, d, 2)) / p_anc
        M = povm.kraus(sign)
        direct = M @ rho @ M.conj().T / p_sys
        state_err = max(state_err, float(np.max(np.abs(reduced - direct))))
    return NeumarkReport(isometry_error, float(prob_err), state_err)
