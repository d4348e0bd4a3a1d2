"""Equal-gap scans of K over measurability and rotation angle."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .correlations import DynamicsParams, maximally_mixed, two_time_correlation
from .errors import InvalidInputError
from .measurability import (
    MeasurabilityParam,
    Partition,
    build_A,
    build_povm,
    edge_partition_5_2,
    sigma_to_b,
    uniform_partition,
)
from .spin_ops import HalfInt, SpinSystem

__all__ = [
    "FIG4_THETA_OVER_PI",
    "FIG4_B_GRID",
    "SweepSpec",
    "SweepRow",
    "FRow",
    "ThresholdResult",
    "make_partition",
    "equal_gap_row",
    "sweep_k_vs_b",
    "sweep_f_vs_sigma",
    "violation_threshold",
]

FIG4_THETA_OVER_PI = (0.06, 0.34, 0.50, 0.95)
FIG4_B_GRID = tuple(round(0.01 * i, 12) for i in range(101))


def make_partition(j, partition: str) -> Partition:
    """Resolve ``"edge5_2"`` or ``"uniform:<block_size>"`` for spin ``j``."""
    sys = SpinSystem.of(j)
    if partition == "edge5_2":
        if sys.j != HalfInt(5):
            raise InvalidInputError(f"the edge5_2 partition needs j=5/2, got j={sys.j}")
        return edge_partition_5_2()
    kind, _, size = partition.partition(":")
    if kind == "uniform" and size.strip().isdigit():
        return uniform_partition(sys, int(size))
    raise InvalidInputError(f"unknown partition {partition!r}; use edge5_2 or uniform:<block_size>")


def _check_grid(name, values, lo=None, hi=None, open_lo=False):
    values = tuple(float(v) for v in values)
    if not values:
        raise InvalidInputError(f"{name} grid is empty")
    if not all(math.isfinite(v) for v in values):
        raise InvalidInputError(f"{name} grid has non-finite values")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InvalidInputError(f"{name} grid must be strictly ascending")
    if lo is not None and (values[0] < lo or (open_lo and values[0] <= lo)):
        raise InvalidInputError(f"{name} grid value {values[0]} below domain")
    if hi is not None and values[-1] > hi:
        raise InvalidInputError(f"{name} grid value {values[-1]} above domain")
    return values


@dataclass(frozen=True)
class SweepSpec:
    j: HalfInt
    partition: str
    theta_over_pi: tuple[float, ...] = FIG4_THETA_OVER_PI
    b: tuple[float, ...] = FIG4_B_GRID

    def __post_init__(self):
        object.__setattr__(self, "j", HalfInt.parse(self.j))
        object.__setattr__(self, "theta_over_pi", _check_grid("theta/pi", self.theta_over_pi))
        object.__setattr__(self, "b", _check_grid("b", self.b, 0.0, 1.0))
        make_partition(self.j, self.partition)

    @classmethod
    def from_sigmas(cls, j, partition, theta_over_pi, sigmas) -> SweepSpec:
        sigmas = _check_grid("sigma", sigmas, 0.0, open_lo=True)
        return cls(j, partition, tuple(theta_over_pi), tuple(sigma_to_b(s) for s in sigmas))


@dataclass(frozen=True)
class SweepRow:
    theta_over_pi: float
    b: float
    C_theta: float
    C_3theta: float

    @property
    def K(self) -> float:
        return 3 * self.C_theta - self.C_3theta

    @property
    def violated(self) -> bool:
        return abs(self.K) > 2


def equal_gap_row(partition: Partition, b: float, theta_over_pi: float) -> SweepRow:
    """One equal-gap point on the maximally mixed state, where K = 3 C(theta) - C(3 theta)."""
    sys = partition.sys
    param = MeasurabilityParam(b)
    povm = build_povm(build_A(partition, param), partition, param)
    dyn = DynamicsParams(sys.j)
    rho0 = maximally_mixed(sys)
    theta = math.pi * theta_over_pi
    c1 = two_time_correlation(povm, rho0, dyn, theta).C
    c3 = two_time_correlation(povm, rho0, dyn, 3 * theta).C
    return SweepRow(theta_over_pi, param.b, c1, c3)


def sweep_k_vs_b(spec: SweepSpec, jobs: int = 1) -> list[SweepRow]:
    """Rows for every (theta, b), theta-major and b-ascending.

    ``jobs > 1`` evaluates points on a thread pool; ``map`` keeps input order,
    so the output does not depend on scheduling.
    """
    partition = make_partition(spec.j, spec.partition)
    points = [(t, b) for t in spec.theta_over_pi for b in spec.b]
    if jobs <= 1:
        return [equal_gap_row(partition, b, t) for t, b in points]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda tb: equal_gap_row(partition, tb[1], tb[0]), points))


@dataclass(frozen=True)
class FRow:
    sigma: float
    a: float
    b: float
    c: float


def sweep_f_vs_sigma(sigmas) -> list[FRow]:
    """Weights of the j = 5/2 edge example: a at offset 0, b at offset 1, c = b**4 at offset 2."""
    sigmas = [float(s) for s in sigmas]
    rows = []
    for s in sigmas:
        b = sigma_to_b(s)
        rows.append(FRow(s, 1.0, b, b**4))
    return rows


@dataclass(frozen=True)
class ThresholdResult:
    """Crossings of |K| = 2 on b in [0, 1].

    ``b_star`` is set only when exactly one crossing exists; with several,
    every root and its bracketing interval are reported instead.
    """

    roots: tuple[float, ...]
    brackets: tuple[tuple[float, float], ...]

    @property
    def b_star(self) -> float | None:
        return self.roots[0] if len(self.roots) == 1 else None


def violation_threshold(j, partition: str, theta_over_pi: float, scan_points: int = 201, tol: float = 1e-8) -> ThresholdResult:
    """Locate the b where |K| crosses 2 by a coarse scan followed by bisection."""
    part = make_partition(j, partition)

    def excess(b):
        return abs(equal_gap_row(part, b, theta_over_pi).K) - 2

    grid = np.linspace(0.0, 1.0, scan_points)
    values = [excess(b) for b in grid]
    brackets = []
    for lo, hi, vlo, vhi in zip(grid, grid[1:], values, values[1:]):
        if (vlo > 0) != (vhi > 0):
            brackets.append((float(lo), float(hi)))

    roots = []
    for lo, hi in brackets:
        flo = excess(lo) > 0
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if (excess(mid) > 0) == flo:
                lo = mid
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return ThresholdResult(tuple(roots), tuple(brackets))
