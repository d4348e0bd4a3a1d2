"""Exit criteria. Each test records one PASS/FAIL line, printed in the pytest summary."""
import math
import subprocess
import sys

import numpy as np
import pytest

from lgpovm.correlations import (
    DynamicsParams,
    correlation_closed_form,
    k_lg,
    k_lg_four_measurements,
    maximally_mixed,
    two_time_correlation,
)
from lgpovm.measurability import (
    MeasurabilityParam,
    build_A,
    build_povm,
    edge_partition_5_2,
    neumark_verify,
    uniform_partition,
)
from lgpovm.spin_ops import SpinSystem, rotation_x
from lgpovm.sweep import FIG4_B_GRID, FIG4_THETA_OVER_PI, SweepSpec, sweep_k_vs_b
from oracles import analytic_c52
from test_measurability import random_partition, random_state

SPINS = ("1/2", "1", "3/2", "5/2", "7/2")
B_VALUES = (0.0, 0.25, 0.5, 0.75, 1.0)
THETAS = np.linspace(0.0, 2 * np.pi, 50)
# b=1, j=5/2 values of 3C(t) - C(3t), evaluated with mpmath
K_FIG4_B1 = {0.06: 2.491754, 0.34: 1.048636, 0.50: 0.0, 0.95: -2.472357}


def grid_partitions():
    """Both partition families over the criterion-5 spins."""
    parts = [edge_partition_5_2()]
    for j in SPINS:
        sys_ = SpinSystem.of(j)
        parts.extend(uniform_partition(sys_, n) for n in range(1, sys_.dim + 1, 2) if sys_.dim % n == 0)
    return parts


def povm_for(part, b):
    param = MeasurabilityParam(b)
    return build_povm(build_A(part, param), part, param)


def k_analytic_52(theta):
    return 3 * analytic_c52(theta) - analytic_c52(3 * theta)


@pytest.fixture(scope="module")
def fig4_rows():
    rows = sweep_k_vs_b(SweepSpec("5/2", "edge5_2", FIG4_THETA_OVER_PI, FIG4_B_GRID))
    table = {}
    for r in rows:
        table.setdefault(r.theta_over_pi, []).append(r)
    return table


def test_1_qubit_parity_benchmark(report):
    part = uniform_partition(SpinSystem.of("1/2"), 1)
    povm = povm_for(part, 1.0)
    rho = maximally_mixed(part.sys)
    dyn = DynamicsParams("1/2")
    thetas = np.arange(0, 1001) * math.pi / 1000
    ks = np.array([k_lg(povm, rho, dyn, [t] * 3).K for t in thetas])
    best = int(np.argmax(ks))
    err = abs(ks[best] - 2 * math.sqrt(2))
    at = abs(thetas[best] - math.pi / 4)
    ok = err <= 1e-6 and at <= math.pi / 1000 + 1e-15
    report(1, ok, f"max K = {ks[best]:.9f} (|err| {err:.1e}) at theta/pi = {thetas[best] / math.pi:.3f}")
    assert ok


def test_2_fig4_b1_endpoints(report):
    part = edge_partition_5_2()
    povm = povm_for(part, 1.0)
    rho = maximally_mixed(part.sys)
    dyn = DynamicsParams("5/2")
    worst = 0.0
    for top, frozen in K_FIG4_B1.items():
        t = math.pi * top
        k = k_lg(povm, rho, dyn, [t] * 3).K
        # frozen constants carry 6 decimals, hence the half-ulp allowance
        worst = max(worst, abs(k - k_analytic_52(t)), abs(k - frozen) - 5e-7)
    ok = worst <= 1e-6
    report(2, ok, f"max deviation from 3C(t)-C(3t) {worst:.1e}")
    assert ok


def test_3_dotted_line_classification(report):
    rows = sweep_k_vs_b(SweepSpec("5/2", "edge5_2", (0.06,), (0.008, 0.61, 0.98)))
    k = {r.b: r.K for r in rows}
    ok = k[0.98] > 2 and k[0.61] <= 2 and k[0.008] <= 2
    report(3, ok, f"K(0.98)={k[0.98]:.4f} K(0.61)={k[0.61]:.4f} K(0.008)={k[0.008]:.4f}")
    assert ok


def test_4_monotonicity_and_maximum(report, fig4_rows):
    problems = []
    for top in (0.06, 0.95):
        absk = np.abs([r.K for r in fig4_rows[top]])
        drop = float(np.min(np.diff(absk)))
        if drop < -1e-9:
            problems.append(f"|K| decreases by {-drop:.2e} at theta/pi={top}")
    for top in FIG4_THETA_OVER_PI:
        rows = fig4_rows[top]
        absk = np.abs([r.K for r in rows])
        # at theta = pi/2 every b gives K = 0 up to roundoff, so ties within 1e-12 count as b=1
        if rows[-1].b != 1.0 or absk[-1] < absk.max() - 1e-12:
            problems.append(f"max |K| not at b=1 for theta/pi={top}")
    ok = not problems
    report(4, ok, "; ".join(problems) or "|K| nondecreasing on 0.06/0.95 curves, max at b=1 for all four")
    assert ok


def test_5_oracle_equivalence(report):
    worst = 0.0
    count = 0
    for part in grid_partitions():
        rho = maximally_mixed(part.sys)
        dyn = DynamicsParams(part.sys.j)
        for b in B_VALUES:
            povm = povm_for(part, b)
            for t in THETAS:
                c = two_time_correlation(povm, rho, dyn, t).C
                worst = max(worst, abs(c - correlation_closed_form(povm.A, part.sys, t)))
                count += 1
    ok = worst <= 1e-10
    report(5, ok, f"{count} points, max |C_operational - C_closed| = {worst:.1e}")
    assert ok


def test_6_povm_and_dilation(report):
    rng = np.random.default_rng(20240606)
    worst = 0.0
    for case in range(200):
        j = SPINS[rng.integers(len(SPINS))]
        kind = case % 3
        if kind == 0:
            part = random_partition(rng, j)
        elif kind == 1:
            part = edge_partition_5_2()
        else:
            part = uniform_partition(SpinSystem.of(j), 1)
        b = float(rng.random())
        povm = povm_for(part, b)
        d = part.sys.dim
        a = np.diag(povm.A)
        worst = max(
            worst,
            float(np.max(np.abs(povm.E_plus + povm.E_minus - np.eye(d)))),
            max(0.0, -float(np.linalg.eigvalsh(povm.E_plus)[0])),
            max(0.0, -float(np.linalg.eigvalsh(povm.E_minus)[0])),
            max(0.0, float(np.max(np.abs(a))) - 1),
            neumark_verify(povm, random_state(rng, d)).max_deviation,
        )
    ok = worst <= 1e-10
    report(6, ok, f"200 cases, max deviation {worst:.1e}")
    assert ok


def test_7_four_measurement_control(report):
    worst = 0.0
    for part in grid_partitions():
        rho = maximally_mixed(part.sys)
        dyn = DynamicsParams(part.sys.j)
        for b in B_VALUES:
            povm = povm_for(part, b)
            for t in THETAS:
                worst = max(worst, abs(k_lg_four_measurements(povm, rho, dyn, [t] * 3).K))
    ok = worst <= 2 + 1e-10
    report(7, ok, f"max |K| with all four measurements = {worst:.12f}")
    assert ok


def test_8_omega_independence_and_unitarity(report):
    spread = 0.0
    unitarity = 0.0
    for part in grid_partitions():
        rho = maximally_mixed(part.sys)
        for b in (0.25, 1.0):
            povm = povm_for(part, b)
            for t in THETAS[::5]:
                ks = [k_lg(povm, rho, DynamicsParams(part.sys.j, 1.0, om), [t] * 3).K for om in (0.0, 1.0, 17.3)]
                spread = max(spread, max(ks) - min(ks))
    for j in SPINS:
        sys_ = SpinSystem.of(j)
        for t in np.concatenate([THETAS, 3 * THETAS, -THETAS]):
            U = rotation_x(sys_, t)
            unitarity = max(unitarity, float(np.max(np.abs(U.conj().T @ U - np.eye(sys_.dim)))))
    ok = spread <= 1e-12 and unitarity <= 1e-12
    report(8, ok, f"Omega spread {spread:.1e}, max |U^dag U - I| {unitarity:.1e}")
    assert ok


def test_9_cli_reproducibility(report, tmp_path):
    base = [sys.executable, "-m", "lgpovm", "sweep-kb", "--j", "5/2", "--partition", "edge5_2",
            "--theta-over-pi", "0.06,0.34,0.50,0.95", "--b", "0:1:0.01"]
    outs = []
    for name in ("first.csv", "second.csv"):
        path = tmp_path / name
        proc = subprocess.run(base + ["--output", str(path)], capture_output=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(path.read_bytes())
    check = subprocess.run([sys.executable, "-m", "lgpovm", "check"], capture_output=True)
    rows = outs[0].count(b"\n") - 1
    ok = outs[0] == outs[1] and rows == 404 and check.returncode == 0
    report(9, ok, f"identical={outs[0] == outs[1]}, rows={rows}, check exit={check.returncode}")
    assert ok
