"""Self-test suite behind ``lgpovm check``.

Each check returns ``(ok, detail)``; :func:`run_checks` runs them all and
never raises, so a broken build is reported rather than crashing the CLI.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .correlations import (
    DynamicsParams,
    correlation_closed_form,
    k_lg,
    k_lg_four_measurements,
    maximally_mixed,
    two_time_correlation,
)
from .measurability import (
    build_A,
    build_povm,
    edge_partition_5_2,
    neumark_verify,
    uniform_partition,
)
from .spin_ops import SpinSystem, jx_matrix, jy_matrix, jz_matrix, parity_matrix, rotation_x
from .sweep import FIG4_B_GRID, FIG4_THETA_OVER_PI, equal_gap_row

SPINS = ("1/2", "1", "3/2", "2", "5/2", "3", "7/2")
B_VALUES = (0.0, 0.25, 0.5, 0.75, 1.0)


def _partitions():
    out = [edge_partition_5_2()]
    for j in SPINS:
        sys = SpinSystem.of(j)
        out.extend(uniform_partition(sys, n) for n in range(1, sys.dim + 1, 2) if sys.dim % n == 0)
    return out


def analytic_c(theta: float) -> float:
    """Parity correlation for j = 5/2 on the maximally mixed state."""
    return (math.cos(theta) + math.cos(3 * theta) + math.cos(5 * theta)) / 3


def check_su2_algebra():
    worst = 0.0
    for j in SPINS:
        sys = SpinSystem.of(j)
        jx, jy, jz = jx_matrix(sys), jy_matrix(sys), jz_matrix(sys)
        worst = max(worst, np.max(np.abs(jx @ jy - jy @ jx - 1j * jz)))
    return worst <= 1e-12, f"max |[Jx,Jy] - iJz| = {worst:.2e}"


def check_rotations():
    rng = np.random.default_rng(7)
    worst_u = worst_g = worst_p = 0.0
    for j in SPINS:
        sys = SpinSystem.of(j)
        P = parity_matrix(sys)
        for t1, t2 in rng.uniform(-4 * np.pi, 4 * np.pi, size=(10, 2)):
            U1, U2 = rotation_x(sys, t1), rotation_x(sys, t2)
            worst_u = max(worst_u, np.max(np.abs(U1.conj().T @ U1 - np.eye(sys.dim))))
            worst_g = max(worst_g, np.max(np.abs(U1 @ U2 - rotation_x(sys, t1 + t2))))
            worst_p = max(worst_p, np.max(np.abs(P @ U1 @ P - rotation_x(sys, -t1))))
    ok = worst_u <= 1e-12 and worst_g <= 1e-11 and worst_p <= 1e-11
    return ok, f"unitarity {worst_u:.2e}, group {worst_g:.2e}, parity {worst_p:.2e}"


def check_povm_and_dilation():
    rng = np.random.default_rng(11)
    worst = 0.0
    for part in _partitions():
        d = part.sys.dim
        for b in B_VALUES:
            povm = build_povm(build_A(part, b))
            a = np.diag(povm.A)
            if np.any(np.abs(a) > 1 + 1e-12) or np.min(np.diag(povm.E_minus)) < -1e-12:
                return False, f"POVM out of range for {part.sys}, b={b}"
            worst = max(worst, np.max(np.abs(povm.E_plus + povm.E_minus - np.eye(d))))
            psi = rng.normal(size=d) + 1j * rng.normal(size=d)
            psi /= np.linalg.norm(psi)
            for rho in (maximally_mixed(part.sys), np.outer(psi, psi.conj())):
                worst = max(worst, neumark_verify(povm, rho).max_deviation)
    return worst <= 1e-10, f"max deviation {worst:.2e}"


def check_oracle_equivalence():
    worst = 0.0
    thetas = np.linspace(0, 2 * np.pi, 13)
    for part in _partitions():
        sys = part.sys
        dyn = DynamicsParams(sys.j)
        rho = maximally_mixed(sys)
        for b in B_VALUES:
            A = build_A(part, b)
            povm = build_povm(A)
            for t in thetas:
                c = two_time_correlation(povm, rho, dyn, t).C
                worst = max(worst, abs(c - correlation_closed_form(A, sys, t)))
    return worst <= 1e-10, f"max |C_op - C_closed| = {worst:.2e}"


def check_omega_and_control():
    part = edge_partition_5_2()
    rho = maximally_mixed(part.sys)
    spread = 0.0
    bound = 0.0
    for b in B_VALUES:
        povm = build_povm(build_A(part, b))
        for t in np.linspace(0.05, 3.0, 7):
            ks = [k_lg(povm, rho, DynamicsParams(part.sys.j, 1.0, om), (t, t, t)).K for om in (0.0, 1.0, 17.3)]
            spread = max(spread, max(ks) - min(ks))
            four = k_lg_four_measurements(povm, rho, DynamicsParams(part.sys.j), (t, t, t))
            bound = max(bound, abs(four.K))
    ok = spread <= 1e-12 and bound <= 2 + 1e-10
    return ok, f"Omega spread {spread:.2e}, four-measurement max |K| {bound:.6f}"


def check_figure4():
    part = edge_partition_5_2()
    problems = []
    for top in FIG4_THETA_OVER_PI:
        row = equal_gap_row(part, 1.0, top)
        t = math.pi * top
        expected = 3 * analytic_c(t) - analytic_c(3 * t)
        if abs(row.K - expected) > 1e-6:
            problems.append(f"K(b=1, {top}pi)={row.K:.6f} vs {expected:.6f}")
        ks = np.abs([equal_gap_row(part, b, top).K for b in FIG4_B_GRID])
        if ks[-1] < ks.max() - 1e-12:
            problems.append(f"max |K| not at b=1 for {top}pi")
        if top in (0.06, 0.95) and np.any(np.diff(ks) < -1e-9):
            problems.append(f"|K| not monotone in b for {top}pi")
    k = {b: equal_gap_row(part, b, 0.06).K for b in (0.98, 0.61, 0.008)}
    if not (k[0.98] > 2 and k[0.61] <= 2 and k[0.008] <= 2):
        problems.append(f"dotted-line classification wrong: {k}")
    return not problems, "; ".join(problems) or "endpoints, monotonicity and classification ok"


CHECKS: dict[str, Callable[[], tuple[bool, str]]] = {
    "su2-algebra": check_su2_algebra,
    "rotations": check_rotations,
    "povm-dilation": check_povm_and_dilation,
    "oracle-equivalence": check_oracle_equivalence,
    "omega-and-control": check_omega_and_control,
    "figure4": check_figure4,
}


def run_checks():
    results = []
    for name, fn in CHECKS.items():
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check, not a crashed CLI
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results
