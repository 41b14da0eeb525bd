"""Acceptance criteria 1-10, one test each.

Every test records a PASS/FAIL line; the lines are printed at the end of the
pytest run.  Run this file directly to execute only these checks.
"""
import contextlib
import random
import sys
import time
from fractions import Fraction

import pytest

from acceptance_report import record
from shannon_lattice.construction import (
    ConstructionParams,
    build_ab,
    build_d,
    build_m_alpha,
    build_r_alpha,
    check_det_identity,
    derive,
    verify_family,
    verify_perturbation,
)
from shannon_lattice.exact import Matrix, det, is_p0, principal_minor
from shannon_lattice.graphs import (
    FractionGraphPower,
    alpha_grp_exhaustive,
    build_quotient,
    is_independent,
    lift_bound,
    lift_set,
    map_up,
)
from shannon_lattice.lattice import PAryLattice, certify, lambda_inf, reduce_mod_p
from shannon_lattice.limits import convergence_table, delta
from shannon_lattice import mis


def sweep():
    for n in range(1, 6):
        for k in range(1, 11):
            for b in range(1, 5):
                for r in range(0, b + 1):
                    for s in range(0, 17):
                        yield ConstructionParams(n, k, b, r, s)


@contextlib.contextmanager
def criterion(number, title):
    detail = {}
    t0 = time.monotonic()
    try:
        yield detail
    except BaseException:
        record(number, False, title, _fmt(detail, t0))
        raise
    record(number, True, title, _fmt(detail, t0))


def _fmt(detail, t0):
    parts = [f"{k}={v}" for k, v in detail.items()]
    parts.append(f"{time.monotonic() - t0:.2f}s")
    return ", ".join(parts)


def test_criterion_01_two_dimensional_pair():
    with criterion(1, "two-dimensional example (2,1,2,1,0)") as info:
        t0 = time.monotonic()
        prm = ConstructionParams(2, 1, 2, 1, 0)
        A, B = build_ab(prm)
        assert A == Matrix([[2, 1], [-1, 2]])
        assert B == Matrix([[2, -1], [1, 2]])
        assert A @ B == Matrix.identity(2).scale(5)
        assert det(B) == 5
        assert lambda_inf(PAryLattice(A, 5)) == 2
        cert = certify(A, B, 5, 2)
        S = reduce_mod_p(A, 5)
        assert len(S) == 5 and is_independent(FractionGraphPower(5, 2, 2), list(S.elements))
        assert cert.valid and cert.statement() == "alpha_grp(E_{5/2}^2) >= 5"
        info["claim"] = cert.statement()
        assert time.monotonic() - t0 < 1


def test_criterion_02_family_sweep():
    with criterion(2, "verify_family VALID over the full sweep") as info:
        t0 = time.monotonic()
        bad = [p.as_tuple() for p in sweep() if not verify_family(p).valid]
        info["tuples"] = sum(1 for _ in sweep())
        info["invalid"] = len(bad)
        assert not bad, bad[:5]
        assert time.monotonic() - t0 < 300


def test_criterion_03_closed_forms():
    with criterion(3, "purple and green closed forms for p") as info:
        checked = 0
        for prm in sweep():
            n, k, b, r, s = prm.as_tuple()
            if (b, r, s) == (2, 1, 0):
                a = k * 2**n + 1
                assert derive(prm).a == a
                assert derive(prm).p == Fraction(a**n - a ** (n - 1), 2**n)
                checked += 1
            elif (b, r, s) == (2, 1, 1):
                a = k * 2**n + 3
                assert derive(prm).a == a
                assert derive(prm).p == Fraction(a ** (n + 1) - 3 * a**n + 2**n, 2**n * (a - 2))
                checked += 1
        info["tuples"] = checked
        assert checked == 100


def test_criterion_04_remark_values():
    with criterion(4, "alpha_grp(E_{5/2}) = 1 and alpha_grp(E_{10/4}) = 2") as info:
        t0 = time.monotonic()
        a, b = alpha_grp_exhaustive(5, 2), alpha_grp_exhaustive(10, 4)
        info["values"] = (a, b)
        assert (a, b) == (1, 2)
        assert time.monotonic() - t0 < 1


def test_criterion_05_mis_oracle():
    with criterion(5, "alpha(E_{5/2}^2) = 5 and alpha(E_{8/3}^3) = 12") as info:
        t0 = time.monotonic()
        small = mis.solve(FractionGraphPower(5, 2, 2).materialize())
        assert small.size == 5 and small.optimal
        assert time.monotonic() - t0 < 1
        G = FractionGraphPower(8, 3, 3).materialize()
        assert G.n == 512
        big = mis.solve(G, time_limit=600)
        info["nodes"] = big.nodes_explored
        info["seconds_8_3"] = round(big.seconds, 1)
        assert big.optimal and big.size == 12
        assert G.is_independent(big.witness)


TABLE = [
    ((14, 3), (1, 2, 3), 6, 84),
    ((17, 3), (1, 2, 4), 9, 153),
    ((17, 4), (1, 2, 4), 4, 68),
    ((19, 3), (1, 2, 3), 12, 228),
    ((19, 5), (1, 2, 5), 2, 38),
]


def test_criterion_06_quotient_table():
    with criterion(6, "five quotient rows with lifted sets re-verified") as info:
        t0 = time.monotonic()
        got = []
        for (p, q), gen, alpha_q, bound in TABLE:
            G = FractionGraphPower(p, q, 3)
            Q = build_quotient(G, [gen])
            res = mis.solve(Q.quotient, time_limit=1800)
            assert res.optimal
            lifted = lift_set(Q, res.witness)
            assert len(lifted) == lift_bound(Q, res.witness)
            assert G.materialize().is_independent([G.index(v) for v in lifted])
            got.append((res.size, len(lifted)))
            assert (res.size, len(lifted)) == (alpha_q, bound)
        info["rows"] = got
        assert time.monotonic() - t0 < 1800


def test_criterion_07_perturbation():
    with criterion(7, "perturbed pair passes all four checks, d 3..8, l 1..3") as info:
        t0 = time.monotonic()
        for d in range(3, 9):
            for ell in range(1, 4):
                rep = verify_perturbation(d, ell)
                assert all(rep.checks[c] == "pass" for c in ("product", "det", "integral", "p0")), (d, ell, rep.checks)
                assert rep.valid
        info["pairs"] = 18
        assert time.monotonic() - t0 < 120


def test_criterion_08_delta_bound():
    with criterion(8, "certified Delta <= 6b^2/n on the sweep") as info:
        t0 = time.monotonic()
        count = 0
        for prm in sweep():
            d = delta(prm, 30)
            if d.hypotheses_met:
                count += 1
                assert d.certified and d.exact_check, prm
        info["tuples"] = count
        assert count > 0
        assert time.monotonic() - t0 < 60


@pytest.mark.xfail(
    strict=True,
    reason="for integer x the scheduled tuples give p^(1/n) = x exactly, so every gap is 0 and cannot strictly decrease",
)
def test_criterion_09_convergence_literal():
    with criterion(9, "certified gaps strictly decreasing for x = 100, 1000, 10000") as info:
        rows = convergence_table([100, 1000, 10000], Fraction(1, 2))
        gaps = [float(r.gap_upper) for r in rows]
        info["n"] = [r.n for r in rows]
        info["gaps"] = gaps
        assert all(r.within_bound for r in rows)
        assert all(g1 > g2 for g1, g2 in zip(gaps, gaps[1:]))


def test_criterion_09_convergence_supporting():
    # on the same inputs n grows while the guaranteed bound shrinks and the gaps stay below it
    rows = convergence_table([100, 1000, 10000], Fraction(1, 2))
    assert [r.n for r in rows] == [5, 7, 9]
    bounds = [r.gap_bound for r in rows]
    assert all(b1 > b2 for b1, b2 in zip(bounds, bounds[1:]))
    assert all(r.within_bound for r in rows)
    gaps = [r.gap_upper for r in rows]
    assert all(g1 >= g2 for g1, g2 in zip(gaps, gaps[1:]))
    frac = convergence_table([Fraction(201, 2), Fraction(2001, 2), Fraction(20001, 2)], Fraction(1, 2))
    assert all(r.within_bound and r.gap_upper > 0 for r in frac)


def _rand_q(rng):
    return Fraction(rng.randint(-20, 20), rng.randint(1, 9))


def _rand_p0(rng):
    while True:
        n = rng.randint(1, 5)
        M = Matrix([[rng.randint(0, 6) if i == j else rng.randint(-3, 3) for j in range(n)] for i in range(n)])
        if is_p0(M).holds:
            return M


def _unimodular(n, rng):
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(8):
        if n == 1:
            U = [[-U[0][0]]]
            continue
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-2, -1, 1, 2])
        for row in U:
            row[j] += c * row[i]
    return Matrix(U)


def test_criterion_10_property_suites():
    with criterion(10, "matrix identities, P0 heredity, unimodular invariance, witness checks") as info:
        t0 = time.monotonic()
        rng = random.Random(2024)
        for _ in range(100):
            n = rng.randint(1, 6)
            assert check_det_identity(n, _rand_q(rng), _rand_q(rng), _rand_q(rng))
        for _ in range(100):
            n, alpha = rng.randint(1, 6), _rand_q(rng)
            R, I = build_r_alpha(n, alpha), Matrix.identity(n)
            assert build_m_alpha(n, alpha) @ (R - I) == R + I.scale(alpha)
        for _ in range(100):
            n, alpha = rng.randint(1, 6), _rand_q(rng)
            beta = _rand_q(rng) or Fraction(1)
            lhs = build_d(n, beta) @ build_r_alpha(n, alpha) @ build_d(n, 1 / beta)
            assert lhs == build_r_alpha(n, alpha / beta**n).scale(beta)
        for _ in range(100):
            M = _rand_p0(rng)
            idx = sorted(rng.sample(range(M.n), rng.randint(1, M.n)))
            sub = Matrix([[M[i, j] for j in idx] for i in range(M.n) if i in idx])
            assert is_p0(sub).holds
            assert principal_minor(M, idx) >= 0
        fams = [p for p in sweep() if p.n <= 3 and p.k <= 2 and derive(p).p <= 400]
        for prm in rng.sample(fams, 50):
            t = derive(prm)
            A, _ = build_ab(prm)
            base = lambda_inf(PAryLattice(A, t.p))
            assert lambda_inf(PAryLattice(A @ _unimodular(prm.n, rng), t.p)) == base
        calls = 0
        real = mis.ExplicitGraph.is_independent

        def counted(self, vs):
            nonlocal calls
            calls += 1
            return real(self, vs)

        mis.ExplicitGraph.is_independent = counted
        try:
            for p, q, n in [(5, 2, 2), (7, 2, 2), (8, 3, 2), (7, 3, 3)]:
                mis.solve(FractionGraphPower(p, q, n).materialize())
                mis.solve(FractionGraphPower(p, q, n).materialize(), strategy="max-degree") if n == 2 else None
        finally:
            mis.ExplicitGraph.is_independent = real
        assert calls == 7
        info["solver_checks"] = calls
        assert time.monotonic() - t0 < 120


def test_monotonicity_on_acceptance_instances():
    # map_up keeps independence on every subgroup certified above
    A, _ = build_ab(ConstructionParams(2, 1, 2, 1, 0))
    S = reduce_mod_p(A, 5)
    for (p, q), *_ in TABLE:
        if Fraction(5, 2) <= Fraction(p, q):
            img, target = map_up(S, 5, 2, p, q)
            assert is_independent(target, img)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
