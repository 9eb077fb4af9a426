"""
Acceptance criteria.  Each test prints one PASS/FAIL line with its
residuals, tolerances and runtime, then asserts the same condition.

Run ``python tests/test_acceptance.py`` for the lines alone.
"""

import json
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from opercalc import fields as F
from opercalc import relconv as RC
from opercalc import suites as S
from opercalc.config import load_config
from opercalc.reps import Representation


def _check(cases):
    """cases: (label, residual, tolerance) -> (ok, text)."""
    ok = all(res <= tol for _, res, tol in cases)
    text = "; ".join(f"{label} {res:.3g} <= {tol:g}{'' if res <= tol else ' (no)'}"
                     for label, res, tol in cases)
    return ok, text


def _line(num, title, cases, seconds, limit):
    ok, text = _check(cases)
    in_time = limit is None or seconds <= limit
    ok = ok and in_time
    budget = f"{seconds:.1f} s" + ("" if limit is None else f" <= {limit:g} s")
    if not in_time:
        budget += " (no)"
    return ok, f"{'PASS' if ok else 'FAIL'} criterion {num} ({title}): {text}; runtime {budget}"


def _timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def criterion_1():
    cfg = load_config()
    cases, dt = _timed(S.group_axioms, cfg, count=1000)
    assert len(cases) == 4
    return _line(1, "group axioms, 4 groups x 1000 triples", cases, dt, 5)


def criterion_2():
    cfg = load_config()
    cases, dt = _timed(S.section_cocycle, cfg, count=1000)
    assert len(cases) == 6
    cases = [(c[0], c[1], 1e-12) for c in cases]
    return _line(2, "section and cocycle, 6 quotients x 1000", cases, dt, 5)


def criterion_3():
    cfg = load_config()
    cases, dt = _timed(S.twist_zn, cfg, ns=list(range(2, 17)), pairs=20)
    hom, closed, assoc = cases
    cases = [("homomorphism / (n |k1| |k2|)", hom[1], 1e-10),
             ("closed vs generic", closed[1], 1e-12)]
    return _line(3, "twisted convolution on Z_n, n = 2..16", cases, dt, 30)


def _derivative_scalar(cfg):
    """Fit c in Op(q) e = c e' on a periodic plane wave."""
    line = S._line(cfg)
    sp = RC.symbol_grid(line, cfg.hbar, periodic=True)
    Qp, _ = sp.mesh()
    t = line.nodes
    om = 2.0 / (line.n * line.step)
    e = np.exp(2j * np.pi * om * t)
    qe = RC.weyl_quantize(F.PlaneField(sp, Qp), line, cfg.hbar, periodic=True).matrix @ e
    de = 2j * np.pi * om * e
    m = slice(4, -4)
    return complex(np.vdot(de[m], qe[m]) / np.vdot(de[m], de[m]))


# regression pin of the scalar in Op(q) = c d/dt at hbar = 1
DERIVATIVE_SCALAR = 1 / (2j * np.pi)


def criterion_4():
    cfg = load_config()
    assert (cfg.line["n"], cfg.line["a"], cfg.line["b"]) == (128, -8.0, -cfg.line["a"])
    t0 = time.perf_counter()
    cases = {c[0]: c for c in S.weyl(cfg)}
    c = _derivative_scalar(cfg)
    dt = time.perf_counter() - t0
    rows = [("sigma=1 identity (rel)", cases["sigma = 1 is the identity"][1], 1e-8),
            ("sigma=p multiplication", cases["sigma = p multiplies by t"][1], 1e-6),
            ("sigma=q derivative", cases["sigma = q is d/dt / (2 pi i hbar)"][1], 1e-6),
            (f"scalar {c:.6g} vs pinned 1/(2 pi i)", abs(c - DERIVATIVE_SCALAR), 1e-6),
            ("composition (rel)", cases["Op(s1)Op(s2) = pi(s1^ # s2^)"][1], 1e-3)]
    return _line(4, "Weyl calculus, N = 128 on [-8, 8]", rows, dt, 60)


def criterion_5():
    cfg = load_config()
    cases, dt = _timed(S.kn_dual, cfg, ns=(2, 3, 4, 5, 6, 7, 8), count=50)
    return _line(5, "Kohn-Nirenberg dual path, n <= 8, 50 symbols",
                 [(c[0], c[1], 1e-10) for c in cases], dt, 10)


def criterion_6():
    cfg = load_config()
    cases, dt = _timed(S.fourier_wigner, cfg)
    return _line(6, "Fourier-Wigner isometry, 10 pairs, N = 256",
                 [(c[0], c[1], 1e-6) for c in cases], dt, 10)


def criterion_7():
    cfg = load_config()
    cases, dt = _timed(S.fsb, cfg)
    idem, pde, sep, rep = cases
    rows = [("idempotency", idem[1], 1e-6), ("image PDE", pde[1], 1e-4),
            ("control separation (inverse ratio)", sep[1], 1 / 10), ("reproducing", rep[1], 1e-6)]
    return _line(7, "FSB projection", rows, dt, 60)


def criterion_8():
    cfg = load_config()
    cases, dt = _timed(S.berezin, cfg, ns=(4, 8), pairs=20)
    tols = {"symbol_compose = (AB)~": 1e-10, "Kohn-Nirenberg symbol recovery": 1e-12}
    rows = [(c[0], c[1], tols[c[0]]) for c in cases if c[0] in tols]
    return _line(8, "Berezin calculus on Z_4, Z_8", rows, dt, 20)


def criterion_9():
    cfg = load_config()
    t0 = time.perf_counter()
    th, e51, rep = S.schur_theta(cfg, ns=(4, 8))
    rng = np.random.default_rng(cfg.seed + 9)
    literal = 0.0
    for n in (4, 8):
        r = Representation.named("ahw-schrodinger", n=n)
        for _ in range(10):
            v, f = S._crandn(rng, n), S._crandn(rng, n)
            literal = max(literal, RC.reproducing_literal_residual(v, f, r))
    dt = time.perf_counter() - t0
    rows = [("|M_w W_v - theta I| / n", th[1], 1e-10), ("wavelet twist identity", e51[1], 1e-10),
            ("v~ = f~ # v~ (literal order)", literal, 1e-10),
            ("v~ # f~ = v~ (consistent order)", rep[1], 1e-10)]
    return _line(9, "Schur scalar and wavelet twist on Z_4, Z_8", rows, dt, 10)


def criterion_10():
    cfg = load_config()
    assert cfg.disk == {"n_r": 200, "n_theta": 256, "r_max": 0.95}
    t0 = time.perf_counter()
    cases = {c[0]: c for c in S.bergman(cfg)}
    kq = F.DiskQuadrature(32, 48, 0.9)
    k1, k2 = S._su11_kernels(kq)
    r = Representation.named("su11")
    P1, P2, P12 = (RC.relative_convolution(k, r)
                   for k in (k1, k2, RC.twisted_convolution_su11(k1, k2)))
    zt = np.array([0, 0.1, 0.2j, -0.3 + 0.1j, 0.4])
    twist = []
    for label, seed in (("1", F.Seed.monomial(0)), ("z", F.Seed(((1.0, 1, 0, 0),))),
                        ("z^2", F.Seed(((1.0, 2, 0, 0),))), ("conj z", F.Seed(((1.0, 0, 1, 0),)))):
        lhs, rhs = P1(P2(seed))(zt), P12(seed)(zt)
        twist.append((f"SU(1,1) twist, seed {label}",
                      float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs))), 1e-2))
    dt = time.perf_counter() - t0
    rows = [("rep composition", cases["SU(1,1) representation composition"][1], 1e-10),
            ("idempotency", cases["projection idempotency"][1], 1e-3),
            ("monomials", cases["monomial fixed points"][1], 1e-3),
            ("Toeplitz radial", cases["radial Toeplitz diagonalization"][1], 1e-3),
            ("symbol symmetry", cases["covariant symbol conjugate symmetry"][1], 1e-10),
            *twist]
    return _line(10, "Bergman and SU(1,1), 200 x 256, r_max 0.95", rows, dt, 120)


def criterion_11():
    cfg = load_config()
    cases, dt = _timed(S.dynin, cfg)
    tols = (1e-12, 1e-10, 1e-8)
    return _line(11, "Dynin group", [(c[0], c[1], t) for c, t in zip(cases, tols)], dt, 30)


def criterion_12():
    cfg = load_config()
    t0 = time.perf_counter()
    (case,) = S.cli_roundtrip(cfg)
    runs = []
    with tempfile.TemporaryDirectory() as d:
        for i in range(2):
            js = Path(d) / f"r{i}.json"
            p = subprocess.run([sys.executable, "-m", "opercalc", "verify", "all", "--json", str(js)],
                               capture_output=True)
            runs.append((p.returncode, p.stdout, js.read_bytes()))
    dt = time.perf_counter() - t0
    rep = json.loads(runs[0][2])
    same = runs[0] == runs[1]
    rows = [("quantize -> apply (rel)", case[1], 1e-8),
            ("verify all exit code", float(runs[0][0]), 0),
            ("suites reported short of 12", float(max(0, 12 - rep["summary"]["suites"])), 0),
            ("repeat runs differ", float(not same), 0)]
    return _line(12, "CLI round trip and determinism", rows, dt, None)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12]


@pytest.fixture
def emit(capsys):
    def out(text):
        with capsys.disabled():
            print("\n" + text)
    return out


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i + 1}" for i in range(12)])
def test_criterion(crit, emit):
    ok, text = crit()
    emit(text)
    assert ok, text


if __name__ == "__main__":
    bad = 0
    for crit in CRITERIA:
        ok, text = crit()
        print(text, flush=True)
        bad += not ok
    sys.exit(1 if bad else 0)
