"""Acceptance criteria, each run at its stated tolerance and time limit.

Every criterion prints one ``PASS``/``FAIL`` line; the lines are repeated
in the pytest terminal summary. Run directly with
``python3 tests/test_acceptance.py`` for just the summary.
"""

import itertools
import subprocess
import sys
import time

import numpy as np
import pytest

from artinian import greenberg as gb
from artinian import linalg as la
from artinian import matgrp as mg
from artinian import transporters as tr
from artinian.rings import _int_index, ring_make
from artinian.suites import HYPOTHESIS, PASS, run_suite
from artinian.witt import verify_ghost_identity, witt_table

RESULTS: list[str] = []


class Criterion:
    def __init__(self, number: int, title: str, limit: float | None):
        self.number, self.title, self.limit = number, title, limit
        self.failures: list[str] = []

    def check(self, ok, what: str):
        if not ok:
            self.failures.append(what)

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc is not None:
            self.failures.append(f"{exc_type.__name__}: {exc}")
        if self.limit is not None and elapsed >= self.limit:
            self.failures.append(f"took {elapsed:.1f} s, limit {self.limit:.0f} s")
        status = "FAIL" if self.failures else "PASS"
        limit = f" / {self.limit:.0f} s" if self.limit is not None else ""
        line = f"{status} criterion {self.number}: {self.title} [{elapsed:.1f} s{limit}]"
        if self.failures:
            line += " -- " + "; ".join(self.failures)
        RESULTS.append(line)
        print(line)
        assert not self.failures, line
        return False


def test_1_witt_conformance():
    with Criterion(1, "Witt vectors vs integers mod p^r, ghost identities", 5) as c:
        for p, r in [(2, 2), (2, 3), (3, 2), (5, 2)]:
            A, N = ring_make(f"W{r}(F{p})"), p**r
            phi = np.array([_int_index(A, n) for n in range(N)])
            a, b = np.divmod(np.arange(N * N), N)
            c.check(sorted(phi.tolist()) == list(range(N)), f"W{r}(F{p}) bijection")
            c.check((A.add_table[phi[a], phi[b]] == phi[(a + b) % N]).all(), f"W{r}(F{p}) addition")
            c.check((A.mul_table[phi[a], phi[b]] == phi[(a * b) % N]).all(), f"W{r}(F{p}) multiplication")
        for p, n in itertools.product((2, 3, 5), range(4)):
            c.check(bool(verify_ghost_identity(witt_table(p, n))), f"ghost p={p} n={n}")


def test_2_order_formula():
    cases = [("GL", 2, "F3[t]/t^2", 3888), ("GL", 3, "F2[t]/t^2", 86016), ("SL", 2, "Z/4", 48),
             ("GL", 2, "Z/8", 1536)]
    with Criterion(2, "enumeration counts equal the order formula", 30) as c:
        for kind, n, spec, expected in cases:
            A = ring_make(spec)
            G = mg.ambient_group(kind, n, A)
            k_order = G.at_length(1).order()
            c.check(len(G.enumerate()) == expected == A.q ** ((A.length - 1) * G.dim) * k_order,
                    f"{kind}{n}({spec})")


def test_3_smoothness():
    rng = np.random.default_rng(0)
    with Criterion(3, "equal reduction fibers, lift_point round trips", 10) as c:
        for kind, spec in itertools.product(("GL", "SL"), ("F3[t]/t^2", "Z/9")):
            A = ring_make(spec)
            k = A.residue_ring()
            G = mg.ambient_group(kind, 2, A)
            red = la.reduce_entries(A, G.enumerate().matrices, 1)
            _, counts = np.unique(red.reshape(len(red), -1), axis=0, return_counts=True)
            c.check(len(counts) == G.at_length(1).order() and set(counts.tolist()) == {A.q**G.dim},
                    f"fibers {kind}2({spec})")
            for g in mg.ambient_group(kind, 2, k).random(rng, 500):
                h = mg.lift_point(k, la.Matrix(k, g), kind, A)
                if not (G.contains(h.entries)[0] and (la.reduce_entries(A, h.entries, 1) == g).all()):
                    c.check(False, f"lift {kind}2({spec})")
                    break


def brute_normalizer(S, T):
    return S.filter(np.array([T.conj(g) == T for g in S.matrices]))


def test_4_torus_normalizer_is_monomial():
    with Criterion(4, "Monomial(A) is the normalizer of T(A)", 60) as c:
        for n, spec in itertools.product((2, 3), ("F3[t]/t^2", "Z/9")):
            A = ring_make(spec)
            G = mg.general_linear(n, A)
            T = mg.torus(mg.GL, n, A).enumerate()
            # n = 2 scans every point of G; n = 3 lifts level by level, pruning by reduction
            N = brute_normalizer(G.enumerate(), T) if n == 2 else tr.normalizer_points(G, T)
            c.check(N == mg.monomial(mg.GL, n, A).enumerate(), f"GL{n}({spec})")


def test_5_cartan():
    with Criterion(5, "Cartan suite at q = 3, 16-vs-4 at q = 2", 60) as c:
        for n, spec in itertools.product((2, 3), ("F3", "F3[t]/t^2", "Z/9")):
            res = run_suite("cartan", "GL", n, spec)
            c.check(res.verdict == PASS and res.sizes["weyl"] == (2 if n == 2 else 6), f"GL{n}({spec})")
        res = run_suite("cartan", "GL", 2, "F2[t]/t^2")
        c.check(res.verdict == HYPOTHESIS and (res.sizes["centralizer"], res.sizes["torus"]) == (16, 4),
                "GL2(F2[t]/t^2) discrepancy")


def sylow_intersection(kind, n, A):
    k = A.residue_ring()
    P = mg.preimage(mg.unipotent(kind, n, k), A).enumerate()
    out = P
    for g in mg.ambient_group(kind, n, k).enumerate().matrices:
        out = out.intersection(P.conj(mg.lift_point(k, la.Matrix(k, g), kind, A)))
    return out


def test_6_radical():
    with Criterion(6, "O_p is G^1; B(A) G^1 is the preimage of B(k)", 30) as c:
        for kind, spec, size in (("GL", "F3[t]/t^2", 81), ("SL", "Z/4", 8)):
            A = ring_make(spec)
            O = gb.largest_normal_p_subgroup(mg.ambient_group(kind, 2, A).enumerate())
            K = mg.congruence_kernel(kind, 2, A, 1).enumerate()
            c.check(len(O) == size and O == K, f"O_p {kind}2({spec})")
            c.check(O == sylow_intersection(kind, 2, A), f"Sylow oracle {kind}2({spec})")
        for spec in ("F2[t]/t^2", "F3[t]/t^2"):
            A = ring_make(spec)
            c.check(gb.borel_preimage_check(mg.general_linear(2, A), mg.borel(mg.GL, 2, A)), f"B G^1 {spec}")


def test_7_parabolics_and_borel_conjugacy():
    with Criterion(7, "parabolic self-normalization over F2[t]/t^2, Borel conjugacy", 120) as c:
        for n, shape in ((2, (1, 1)), (3, (1, 1, 1)), (3, (2, 1))):
            res = run_suite("parabolic", "GL", n, "F2[t]/t^2", shape=shape)
            c.check(res.verdict == PASS,
                    f"GL{n} shape {shape}: {res.verdict} (P={res.sizes['parabolic']}, N={res.sizes['normalizer']})")
        res = run_suite("borel", "SL", 2, "Z/4", trials=50)
        c.check(res.sizes == {"trials": 50, "passed": 50, "bruteforce": 50}, f"SL2(Z/4) {res.sizes}")
        res = run_suite("borel", "GL", 3, "Z/8", trials=50)
        c.check(res.verdict == PASS and res.sizes["passed"] == 50, f"GL3(Z/8) {res.sizes}")


def test_8_torus_injectivity():
    with Criterion(8, "torus injectivity on 500 pairs", 30) as c:
        for spec in ("F3[t]/t^2", "Z/9"):
            res = run_suite("torus", "GL", 2, spec, trials=500)
            c.check(res.verdict == PASS and res.sizes["pairs"] == 500, f"GL2({spec})")


def verify_all(*extra):
    proc = subprocess.run([sys.executable, "-m", "artinian", "verify", "--all", "--format", "json", *extra],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


@pytest.mark.slow
def test_9_determinism():
    with Criterion(9, "verify --all is byte-identical across runs and worker counts", None) as c:
        first = verify_all()
        c.check(first == verify_all(), "second run differs")
        c.check(first == verify_all("--workers", "4"), "four workers differ")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
