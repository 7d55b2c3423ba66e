"""Acceptance checks.  Each test prints one PASS/FAIL line with the measured
quantity and its runtime; run with ``pytest tests/test_acceptance.py -v``.
"""

import contextlib
import math
import time

import numpy as np
from hypothesis import given, settings, strategies as st

from dephasing import cli, singlemode as sm
from dephasing.criteria import (
    RegionLabel,
    classify,
    count_alternations,
    monte_carlo_fraction,
    separable_fraction,
)
from dephasing.kernels import (
    Kernel,
    big_A,
    big_B,
    big_E,
    big_S,
    big_Sbar,
    decoherence_time,
    gamma,
    kernel,
)
from dephasing.model import BathSpec, QubitBloch, qubit_from_polar
from dephasing.quadrature import DEFAULT_QUADRATURE

from oracles import trapezoid_kernel


@contextlib.contextmanager
def criterion(capsys, number, title, budget):
    """Time the block and print a PASS/FAIL line; ``rec["detail"]`` is echoed."""
    rec = {"detail": ""}
    start = time.perf_counter()
    ok = False
    try:
        yield rec
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        if ok and elapsed > budget:
            ok = False
            rec["detail"] += f" (over the {budget:g} s budget)"
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {number:2d} {title}: {rec['detail']} "
                  f"[{elapsed:.2f} s]")
    assert elapsed <= budget


def test_01_lindblad_rate(capsys):
    with criterion(capsys, 1, "high-T decoherence rate", 1.0) as rec:
        ratios = []
        for T in (50.0, 100.0):
            ratios.append(gamma(BathSpec(1e-3, temperature=T), 50.0) / (4 * math.pi * 1e-3 * T))
        rec["detail"] = "gamma/(4 pi kappa T) = " + ", ".join(f"{q:.5f}" for q in ratios)
        assert all(abs(q - 1) < 0.02 for q in ratios)


def test_02_separable_at_decoherence_crossover(capsys):
    with criterion(capsys, 2, "crossover temperature T*", 30.0) as rec:
        state = qubit_from_polar(0.98, 0.0)
        Ts = np.round(np.arange(0.5, 5.0001, 0.05), 10)
        labels = [classify(BathSpec(1e-3, temperature=T),
                           decoherence_time(BathSpec(1e-3, temperature=T)), state) for T in Ts]
        sep = np.array([lab is RegionLabel.SEPARABLE for lab in labels])
        # last non-separable temperature followed only by separable ones
        assert sep[-1] and not sep[0]
        k = np.flatnonzero(~sep)[-1]
        T_star = 0.5 * (Ts[k] + Ts[k + 1])
        rec["detail"] = f"T* = {T_star:.3f} (labels below: {labels[k].value})"
        assert 1.5 <= T_star <= 3.0


def test_03_separable_fraction(capsys):
    with criterion(capsys, 3, "separable fraction vs Monte Carlo", 60.0) as rec:
        parts = []
        for T, check in ((10.0, lambda p: p > 0.9), (0.1, lambda p: p < 0.01)):
            bath = BathSpec(1e-3, temperature=T)
            p = separable_fraction(bath)
            mc, err = monte_carlo_fraction(bath, 1_000_000, seed=0, p_ref=p)
            parts.append(f"T={T:g}: p={p:.6g} mc={mc:.6g} se={err:.2g}")
            assert check(p)
            assert abs(mc - p) <= 3 * err
        rec["detail"] = "; ".join(parts)


def test_04_pure_and_diagonal_limits(capsys):
    with criterion(capsys, 4, "pure / diagonal limits", 30.0) as rec:
        counts = {"pure": 0, "diag": 0}

        @settings(max_examples=60, deadline=None, derandomize=True)
        @given(T=st.sampled_from([0.1, 1.0]), t=st.floats(1e-3, 100.0),
               phi=st.floats(0, 2 * math.pi))
        def pure(T, t, phi):
            bath = BathSpec(1.0, temperature=T)
            if big_E(bath, t) > 0:
                counts["pure"] += 1
                assert classify(bath, t, qubit_from_polar(1.0, 0.0, phi)) is RegionLabel.ENTANGLED

        @settings(max_examples=60, deadline=None, derandomize=True)
        @given(T=st.floats(0.01, 50.0), t=st.floats(0.0, 1e4), z=st.floats(-1.0, 1.0),
               kappa=st.floats(1e-4, 1.0))
        def diagonal(T, t, z, kappa):
            counts["diag"] += 1
            assert classify(BathSpec(kappa, temperature=T), t, QubitBloch(0.0, 0.0, z)) \
                is RegionLabel.SEPARABLE

        pure()
        diagonal()
        rec["detail"] = f"{counts['pure']} pure-state and {counts['diag']} diagonal-state points"


def test_05_alternations(capsys):
    with criterion(capsys, 5, "separable/entangled alternations", 60.0) as rec:
        bath = BathSpec(1e-3, temperature=0.3)
        state = qubit_from_polar(0.95, 0.0)
        count, labels = count_alternations(bath, state, np.linspace(0.25, 500.0, 2000))
        n_unknown = sum(lab is RegionLabel.UNKNOWN for lab in labels)
        rec["detail"] = f"{count} alternations, {n_unknown} unknown points"
        assert count >= 2


def test_06_single_mode_crossings(capsys):
    with criterion(capsys, 6, "Fock PPT/NPT vs analytic crossings", 300.0) as rec:
        state = qubit_from_polar(0.75, 0.2)
        t_max = 4 * math.pi * (1 - 1e-9)
        worst, n_T, n_cross = 0.0, 0, 0
        for T in np.linspace(0.2, 2.0, 10):
            mode = sm.ModeSpec(1.0, 0.2, float(T))
            assert mode.n_trunc <= 120
            crit = sm.tau_crit(state, mode, 0.0, t_max, n_grid=2000)
            ent = sm.tau_ent_single(state, mode, t_max)
            assert len(crit) == len(ent) > 0
            worst = max(worst, max(abs(a - b) / b for a, b in zip(crit, ent)))
            n_T += 1
            n_cross += len(ent)
        rec["detail"] = f"{n_T} temperatures, {n_cross} crossings, max rel. dev. {worst:.4f}"
        assert n_T >= 10 and worst <= 0.02


def test_07_witness_soundness(capsys):
    with criterion(capsys, 7, "witness soundness on a 20x50 grid", 300.0) as rec:
        state = qubit_from_polar(0.75, 0.2)
        bad = 0
        for T in np.geomspace(0.2, 5.0, 20):
            mode = sm.ModeSpec(1.0, 0.2, float(T))
            for t in np.linspace(0.05, 4 * math.pi, 50):
                lam = sm.min_pt_eigenvalue(sm.evolve_total(state, mode, 0.0, float(t)))
                if sm.det_p(state, mode, t) >= 0 and lam < -1e-8:
                    bad += 1
                if sm.ept_value(state, mode, t) < 0 and not lam < 0:
                    bad += 1
        rec["detail"] = f"{bad} counterexamples in 1000 points"
        assert bad == 0


def test_08_kernel_identities_and_oracle(capsys):
    with criterion(capsys, 8, "kernel identities and calibration", 30.0) as rec:
        rng = np.random.default_rng(8)
        tol = 10 * DEFAULT_QUADRATURE.rel_tol
        worst_id = 0.0
        for T, t in zip(rng.uniform(0.05, 10.0, 100), rng.uniform(0.01, 100.0, 100)):
            b = BathSpec(1e-3, temperature=float(T))
            S, A, B = big_S(b, t), big_A(b, t), big_B(b, t)
            E, Sbar = big_E(b, t), big_Sbar(b, t)
            worst_id = max(worst_id, abs(S - (A + B)) / S, abs(E - (S - Sbar)) / S)
        assert worst_id <= tol
        worst_cal = 0.0
        for t in (0.5, 1.0, 5.0):
            b = BathSpec(1.0, temperature=1.0)
            for kind in (Kernel.A, Kernel.B, Kernel.S, Kernel.SBAR, Kernel.E):
                ref = trapezoid_kernel(kind.value, 1.0, 1.0, t)
                worst_cal = max(worst_cal, abs(kernel(kind, b, t) - ref) / ref)
        rec["detail"] = f"identity rel. err {worst_id:.2g}, oracle rel. err {worst_cal:.2g}"
        assert worst_cal < 5e-7


def test_09_reduced_dynamics(capsys):
    with criterion(capsys, 9, "single-mode reduced dynamics", 60.0) as rec:
        rng = np.random.default_rng(9)
        worst = 0.0
        for _ in range(5):
            omega = rng.uniform(0.5, 2.0)
            mode = sm.ModeSpec(omega, rng.uniform(0.05, 0.3) * omega, rng.uniform(0.3, 3.0))
            omega_q = rng.uniform(0.0, 1.0)
            x, y, z = rng.uniform(-0.5, 0.5, 3)
            state = QubitBloch(x, y, z)
            for t in np.linspace(0.0, 4 * math.pi / omega, 60):
                q = sm.reduced_qubit(sm.evolve_total(state, mode, omega_q, t))
                expected = 0.5 * (x - 1j * y) * np.exp(-1j * omega_q * t
                                                        - sm.gamma_single(mode, t))
                worst = max(worst, abs(q[0, 1] - expected))
        rec["detail"] = f"max |rho01 - closed form| = {worst:.2g}"
        assert worst <= 1e-8


COMMAND_ARGS = {
    "rate": ["--t-count", "20"],
    "phase-diagram": ["--T-count", "4", "--t-count", "10", "--tau-dec", "--threads", "2"],
    "fraction": ["--T-count", "3", "--mc-samples", "20000", "--seed", "11", "--threads", "2"],
    "bloch-cut": ["--T-count", "3", "--z-count", "11"],
    "oscillations": ["--temperature", "0.3", "--r", "0.95", "--t-min", "1", "--t-max", "100",
                     "--t-count", "50", "--t-spacing", "linear"],
    "single-mode": ["--T-min", "0.5", "--T-max", "2", "--T-count", "3", "--n-grid", "300",
                    "--r", "0.75", "--z", "0.2"],
}


def test_10_cli_determinism(capsys, tmp_path):
    with criterion(capsys, 10, "CLI determinism", 600.0) as rec:
        same = 0
        for name, extra in COMMAND_ARGS.items():
            outputs = []
            for k in range(2):
                path = tmp_path / f"{name}-{k}.csv"
                assert cli.run([name, *extra, "--out", str(path)]) == 0
                outputs.append(path.read_bytes())
            capsys.readouterr()
            assert outputs[0] == outputs[1], name
            same += 1
        rec["detail"] = f"{same}/{len(COMMAND_ARGS)} commands byte-identical"
