"""Spin-j operator algebra on the (2j+1)-dimensional irrep.

Basis order is fixed package-wide: index ``i`` holds ``|m = j - i>``, so
index 0 is ``m = +j`` and the last index is ``m = -j``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from numbers import Integral, Rational

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "HalfInt",
    "SpinSystem",
    "jz_matrix",
    "jplus_matrix",
    "jminus_matrix",
    "jx_matrix",
    "jy_matrix",
    "jsquared_matrix",
    "parity_matrix",
    "rotation_x",
]


@total_ordering
@dataclass(frozen=True)
class HalfInt:
    """An exact half-integer, stored as twice its value."""

    twice: int

    def __post_init__(self):
        if isinstance(self.twice, bool) or not isinstance(self.twice, Integral):
            raise InvalidInputError(f"HalfInt needs an integer twice-value, got {self.twice!r}")
        object.__setattr__(self, "twice", int(self.twice))

    @classmethod
    def parse(cls, value) -> HalfInt:
        """Accept ``"5/2"``, ``"3"``, ``"-1/2"``, ints, Fractions or an existing HalfInt."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, bool):
            raise InvalidInputError(f"not a half-integer: {value!r}")
        if isinstance(value, Integral):
            return cls(2 * int(value))
        if isinstance(value, Rational):
            frac = Fraction(value)
        elif isinstance(value, str):
            text = value.strip()
            try:
                frac = Fraction(text)
            except (ValueError, ZeroDivisionError):
                raise InvalidInputError(f"malformed half-integer {value!r}") from None
            if "." in text or "e" in text.lower():
                raise InvalidInputError(f"malformed half-integer {value!r}; write it as n/2")
        else:
            raise InvalidInputError(f"not a half-integer: {value!r}")
        doubled = 2 * frac
        if doubled.denominator != 1:
            raise InvalidInputError(f"{value!r} is not a multiple of 1/2")
        return cls(doubled.numerator)

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def as_int(self) -> int:
        if not self.is_integer:
            raise InvalidInputError(f"{self} is not an integer")
        return self.twice // 2

    def __add__(self, other):
        if not isinstance(other, HalfInt):
            return NotImplemented
        return HalfInt(self.twice + other.twice)

    def __sub__(self, other):
        if not isinstance(other, HalfInt):
            return NotImplemented
        return HalfInt(self.twice - other.twice)

    def __neg__(self):
        return HalfInt(-self.twice)

    def __lt__(self, other):
        if not isinstance(other, HalfInt):
            return NotImplemented
        return self.twice < other.twice

    def __float__(self):
        return self.twice / 2

    def __str__(self):
        if self.is_integer:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self):
        return f"HalfInt({self})"


@dataclass(frozen=True)
class SpinSystem:
    j: HalfInt

    def __post_init__(self):
        j = HalfInt.parse(self.j)
        if j.twice < 0:
            raise InvalidInputError(f"spin must be non-negative, got {j}")
        object.__setattr__(self, "j", j)

    @classmethod
    def of(cls, j) -> SpinSystem:
        return cls(HalfInt.parse(j))

    @property
    def dim(self) -> int:
        return self.j.twice + 1

    @property
    def m_values(self) -> tuple[HalfInt, ...]:
        """All m from +j down to -j, in basis order."""
        return tuple(HalfInt(self.j.twice - 2 * i) for i in range(self.dim))

    def index_of(self, m) -> int:
        m = HalfInt.parse(m)
        offset = self.j.twice - m.twice
        if offset < 0 or offset > 2 * self.j.twice or offset % 2:
            raise InvalidInputError(f"m={m} is not a level of spin {self.j}")
        return offset // 2

    def m_array(self) -> np.ndarray:
        return np.array([float(m) for m in self.m_values])

    def __str__(self):
        return f"spin {self.j}"


def jz_matrix(sys: SpinSystem) -> np.ndarray:
    return np.diag(sys.m_array())


def jplus_matrix(sys: SpinSystem) -> np.ndarray:
    """Raising operator, <m+1|J+|m> = sqrt(j(j+1) - m(m+1))."""
    j = float(sys.j)
    out = np.zeros((sys.dim, sys.dim))
    # |m+1> sits one index above |m>
    for i in range(1, sys.dim):
        m = j - i
        out[i - 1, i] = math.sqrt(j * (j + 1) - m * (m + 1))
    return out


def jminus_matrix(sys: SpinSystem) -> np.ndarray:
    return jplus_matrix(sys).T.copy()


def jx_matrix(sys: SpinSystem) -> np.ndarray:
    jp = jplus_matrix(sys)
    return (jp + jp.T) / 2


def jy_matrix(sys: SpinSystem) -> np.ndarray:
    jp = jplus_matrix(sys)
    return (jp - jp.T) / 2j


def jsquared_matrix(sys: SpinSystem) -> np.ndarray:
    jx, jy, jz = jx_matrix(sys), jy_matrix(sys), jz_matrix(sys)
    return (jx @ jx + jy @ jy + jz @ jz).real


def parity_matrix(sys: SpinSystem) -> np.ndarray:
    """Diagonal (-1)^(j-m); signs come from integer arithmetic only."""
    signs = [1 if ((sys.j.twice - m.twice) // 2) % 2 == 0 else -1 for m in sys.m_values]
    return np.diag(np.array(signs, dtype=float))


@lru_cache(maxsize=64)
def _jx_eigenbasis(twice_j: int) -> np.ndarray:
    sys = SpinSystem(HalfInt(twice_j))
    _, vecs = np.linalg.eigh(jx_matrix(sys))
    vecs.flags.writeable = False
    return vecs


def rotation_x(sys: SpinSystem, theta: float) -> np.ndarray:
    """``exp(-i theta J_x)`` from the eigendecomposition of ``J_x``.

    The numerically computed eigenvalues are replaced by the exact spectrum
    ``-j, ..., +j`` (eigh returns them ascending), which keeps the phases exact.
    """
    theta = float(theta)
    if not math.isfinite(theta):
        raise InvalidInputError(f"rotation angle must be finite, got {theta}")
    vecs = _jx_eigenbasis(sys.j.twice)
    spectrum = -sys.m_array()  # ascending: -j .. +j
    phases = np.exp(-1j * theta * spectrum)
    return (vecs * phases) @ vecs.conj().T
