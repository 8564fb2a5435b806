"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Tolerances are the stated ones; nothing here is relaxed or marked xfail.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from hoquant.critical import Kind, classification_agrees, find_critical_points, hocond_verdict
from hoquant.crosscheck import shift_comparison
from hoquant.dsl import Domain, Potential
from hoquant.flow import PhaseState, hamiltonian_field, integrate
from hoquant.fock import commutator_check, spectrum
from hoquant.grid import GridSpec
from hoquant.potentials import builtin
from hoquant.reduction import BUILTIN_PLANS, PGParams, THOParams, inverse_square_constant, pg_potential, reduction_residual
from hoquant.spectral import Tridiag, lowest_eigenvalues, richardson_refine
from hoquant.verdict import Verdict

CHECK = GridSpec.closed(0.3, 5.0, 200)


@pytest.fixture
def verdict_line(capsys):
    def emit(label: str, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        return ok

    return emit


def test_criterion_1_example1_identity(verdict_line):
    t0 = time.perf_counter()
    tho = THOParams(1.0, 1.0, 1.0)
    res = reduction_residual(BUILTIN_PLANS["example1"], builtin("example1", tho.as_params()), CHECK, tho)
    const = inverse_square_constant(BUILTIN_PLANS["example1"])
    dt = time.perf_counter() - t0
    ok = res < 1e-9 and const == Fraction(-5, 36) and dt < 1.0
    assert verdict_line("1 example-1 identity", ok, f"residual={res:.3e} q^-2 coefficient={const} runtime={dt:.3f}s")


def test_criterion_2_example2_identity(verdict_line):
    t0 = time.perf_counter()
    tho = THOParams(1.0, 1.0, 1.0)
    res = reduction_residual(BUILTIN_PLANS["example2"], builtin("example2", tho.as_params()), CHECK, tho)
    const = inverse_square_constant(BUILTIN_PLANS["example2"])
    dt = time.perf_counter() - t0
    ok = res < 1e-9 and const == Fraction(-3, 16) and dt < 1.0
    assert verdict_line("2 example-2 identity", ok, f"residual={res:.3e} q^-2 coefficient={const} runtime={dt:.3f}s")


def test_criterion_3_fock_spectrum(verdict_line):
    t0 = time.perf_counter()
    spec = spectrum(10)
    comm = commutator_check(16)
    dt = time.perf_counter() - t0
    ok = (
        spec == [Fraction(2 * n + 1, 2) for n in range(10)]
        and comm.identity_indices == tuple(range(15))
        and dt < 0.1
    )
    assert verdict_line("3 Bargmann-Fock spectrum", ok, f"top={spec[-1]} identity on 0..{comm.identity_indices[-1]} runtime={dt:.4f}s")


def test_criterion_4_schrodinger_fock_agreement(verdict_line):
    t0 = time.perf_counter()
    V = Potential.from_text("q^2/2")
    vals = richardson_refine(V, GridSpec(-12.0, 12.0, 2400), 6, kinetic=0.5)
    dt = time.perf_counter() - t0
    rel = max(abs(v - (n + 0.5)) / (n + 0.5) for n, v in enumerate(vals))
    ok = rel < 1e-4 and dt < 10.0
    assert verdict_line("4 Schrodinger/Fock agreement", ok, f"max relative error={rel:.3e} runtime={dt:.2f}s")


def test_criterion_5_spectrum_shift_law(verdict_line):
    t0 = time.perf_counter()
    tho = THOParams(1.0, 1.0, 1.0)
    cmp = shift_comparison(BUILTIN_PLANS["example1"], builtin("example1", tho.as_params()), tho, k=3)
    dt = time.perf_counter() - t0
    rel = max(abs(d - tho.rho) / abs(tho.rho) for d in cmp.differences)
    ok = rel < 1e-2 and dt < 30.0
    diffs = ", ".join(f"{d:.4f}" for d in cmp.differences)
    assert verdict_line("5 spectrum-shift law", ok, f"z-q differences=[{diffs}] expected rho=1 max relative error={rel:.3e} runtime={dt:.2f}s")


CORPUS = [
    "q^2",
    "-q^2",
    "q^4 - 2*q^2",
    "q^4 - q^2 + 0.3*q^3",
    "q^3 - 3*q",
    "q^6 - 4*q^4 + 3*q^2",
    "(q^2 - 1)^2*(q^2 - 4)",
    "q^4 + q",
    "2*q^2 - q^4/4",
    "q^5 - 5*q^3 + 4*q",
    "0.5*q^2 + 0.1*q^4",
    "-q^4 + 3*q^2",
    "q^4 - 0.5*q^3 - q^2",
    "(q - 1)^2*(q + 2)^2",
    "q^2*(q - 3)",
    "cos(q)",
]
BUILTIN_CASES = [
    ("ho", {}),
    ("example1", {"omega": 1.0, "lambda": 3.0}),
    ("example2", {"omega": 1.0, "rho": -1.0, "lambda": 1.0}),
    ("pseudo-gaussian", {}),
]


def test_criterion_6_classification_cross_check(verdict_line):
    potentials = [Potential.from_text(t) for t in CORPUS] + [builtin(n, p) for n, p in BUILTIN_CASES]
    assert len(potentials) == 20
    checked = agreed = 0
    for V in potentials:
        for cp in find_critical_points(V):
            if cp.kind is Kind.DEGENERATE:
                continue
            checked += 1
            agreed += classification_agrees(V, cp)
    ok = checked > 0 and agreed == checked
    assert verdict_line("6 classification cross-check", ok, f"{agreed}/{checked} nondegenerate points agree over 20 potentials")


def test_criterion_7_pseudo_gaussian_counterexample(verdict_line):
    t0 = time.perf_counter()
    rep = hocond_verdict(pg_potential(PGParams(1, 1, 2)))
    dt = time.perf_counter() - t0
    ok = rep.proper.verdict is Verdict.FALSE and rep.ho_integrable is not Verdict.TRUE and dt < 1.0
    assert verdict_line(
        "7 pseudo-Gaussian verdict", ok,
        f"proper={rep.proper.verdict.value} ho_integrable={rep.ho_integrable.value} runtime={dt:.3f}s",
    )


def test_criterion_8_flow_quality(verdict_line):
    f = hamiltonian_field(Potential.from_text("q^2"))
    fwd = integrate(f, PhaseState(1.0, 0.0), 1e-3, 100.0, record_every=10)
    back = integrate(f, fwd.final, -1e-3, 100.0, record_every=10**6)
    drift = fwd.max_energy_drift
    rev = abs(back.final.q - 1.0) + abs(back.final.p)
    ok = drift < 1e-6 and rev < 1e-8
    assert verdict_line("8 flow quality", ok, f"max energy drift={drift:.10e} (bound 1e-6) reversibility={rev:.3e}")


def test_criterion_9_oracle_integrity(verdict_line):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 9))
        diag = rng.uniform(-10, 10, n)
        off = rng.uniform(-10, 10, n - 1)
        t = Tridiag(tuple(diag), tuple(off))
        got = np.array(lowest_eigenvalues(t, n))
        ref = np.linalg.eigvalsh(t.dense())
        worst = max(worst, float(np.max(np.abs(got - ref))))
    ok = worst < 1e-10
    assert verdict_line("9 Sturm oracle integrity", ok, f"max |sturm - dense| over 100 matrices={worst:.3e}")
