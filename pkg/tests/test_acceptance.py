"""Acceptance checks, one ``criterion`` marker per numbered item.

The terminal summary prints a PASS/FAIL line per criterion (see conftest).
Tolerances and time budgets are pinned below.
"""

import itertools
import math
import random
import time
from fractions import Fraction

import pytest

from conftest import HARD8, PHI, PHI_PRIME, random_problem
from descsat.anf import AnfPoly
from descsat.descriptor import (
    DescriptorVector,
    MergeStats,
    clause_descriptor,
    descriptor_from_matrix,
    merge,
    solve,
)
from descsat.oracle import brute_force
from descsat.preprocess import apply_model_back, permute_trajectories, sort_problem
from descsat.problem import Problem
from descsat.randmodel import (
    GenSpec,
    corollary_alpha,
    expected_solutions,
    feasible_alpha,
    gen_exact_uniform,
    m_alpha,
    m_alpha_curve,
    polarity_audit,
    solution_decay_curve,
    threshold_exact,
)
from descsat.tmatrix import TernaryMatrix, clause_matrix, conjoin, reduce

THRESHOLD_TOL = 1e-6
COROLLARY_TOL = 1e-3
CURVE_REL_TOL = 0.15

P = AnfPoly.parse

PHI_MODELS = {
    (0, 0, 0, 0), (0, 0, 0, 1), (0, 1, 0, 0), (0, 1, 1, 0), (0, 1, 1, 1), (1, 0, 0, 0),
    (1, 0, 0, 1), (1, 0, 1, 0), (1, 0, 1, 1), (1, 1, 0, 0), (1, 1, 1, 0), (1, 1, 1, 1),
}
PRINTED_H4 = "a4 + a1*a4 + a2*a4 + a1*a2*a4 + a1*a3*a4 + a2*a3*a4 + a1*a2*a3*a4"
PRINTED_H5 = "a5 + a1*a5 + a2*a5 + a1*a2*a5 + a2*a3*a5"


class Timer:
    def __init__(self, budget):
        self.budget = budget

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.budget, f"{self.elapsed:.2f}s over {self.budget}s"


def fold(clauses, n):
    d = DescriptorVector.identity(n)
    for c in clauses:
        d = merge(d, clause_descriptor(c, n))
    return d


def same_function(p, q, n):
    return all(p.evaluate(bits) == q.evaluate(bits) for bits in itertools.product((0, 1), repeat=n))


# 1 ---------------------------------------------------------------------------


@pytest.mark.criterion(1, "matrix golden")
def test_c1_matrix_golden():
    with Timer(1.0):
        phi = conjoin(clause_matrix((1, 2, -3)), clause_matrix((-2, 3, -4)))
        assert phi.enumerate_models(4) == PHI_MODELS
        assert len(phi) == 4
        assert sorted(phi.row_strings()) == sorted(["101.", ".00.", ".100", ".11."])
        assert reduce(phi) == phi


# 2 ---------------------------------------------------------------------------


@pytest.mark.criterion(2, "descriptor golden")
def test_c2_descriptor_golden():
    with Timer(1.0):
        a1, a2, a3, a4 = (AnfPoly.var(i) for i in range(1, 5))
        d = descriptor_from_matrix(conjoin(clause_matrix((1, 2, -3)), clause_matrix((-2, 3, -4))), 4)
        h3 = (a1 + 1) * (a2 + 1) * a3 + a3
        h4 = a2 * (a3 + 1) * a4 + a4
        assert same_function(d[3], h3, 4) and d[3] == h3
        assert same_function(d[4], h4, 4) and d[4] == h4


# 3 ---------------------------------------------------------------------------


def _phi_merge():
    stats = MergeStats()
    d = merge(fold(PHI, 5), fold(PHI_PRIME, 5), stats=stats)
    return d, stats


@pytest.mark.criterion(3, "merge golden")
def test_c3_merge_h3_h5_and_calls():
    with Timer(1.0):
        d, stats = _phi_merge()
        assert d[3] == P("a2*a3")
        assert d[5] == P(PRINTED_H5)
        assert stats.recursive_calls == 0


@pytest.mark.criterion(3, "merge golden")
@pytest.mark.xfail(strict=True, reason="printed h4 admits (1,0,0,1,0), which violates (-1, 3, -4)")
def test_c3_merge_printed_h4(request):
    d, _ = _phi_merge()
    request.node._criterion_note = f"measured h4 = {d[4]}"
    assert d[4] == P(PRINTED_H4)


@pytest.mark.criterion(3, "merge golden")
def test_c3_merged_descriptor_is_exact():
    d, _ = _phi_merge()
    exact = fold(PHI, 5).models() & fold(PHI_PRIME, 5).models()
    assert d.models() == exact
    printed = DescriptorVector.parse(["a1", "a2", "a2*a3", PRINTED_H4, PRINTED_H5])
    assert printed.models() - exact == {(1, 0, 0, 1, 0)}


# 4 ---------------------------------------------------------------------------


@pytest.mark.criterion(4, "hard-instance table")
def test_c4_hard_table():
    with Timer(1.0):
        res = solve(Problem(3, HARD8))
        lens = [r.max_len for r in res.trace]
        assert lens[:7] == [3, 1, 2, 1, 1, 1, 1]
        assert res.trace[-1].unsat and res.decision == "UNSAT"
        assert [r.models for r in res.trace] == [7, 6, 5, 4, 3, 2, 1, 0]


# 5 ---------------------------------------------------------------------------


@pytest.mark.criterion(5, "oracle equivalence")
def test_c5_oracle_equivalence(request):
    rng = random.Random(20240601)
    sat = 0
    with Timer(300.0) as t:
        for k in range(1000):
            n = rng.randint(4, 12)
            alpha = feasible_alpha(n, rng.uniform(1, 8))
            p = gen_exact_uniform(GenSpec(n, alpha, seed=k))
            res = solve(p, count_models=False)
            ref = brute_force(p, materialize=n <= 10)
            assert res.sat == ref.sat, (k, n, alpha)
            if res.sat:
                sat += 1
                assert p.satisfied_by(res.witness())
                if n <= 10:
                    assert res.descriptor.models() == ref.models, (k, n, alpha)
    request.node._criterion_note = f"1000 instances, {sat} SAT, {t.elapsed:.0f}s"


# 6 ---------------------------------------------------------------------------


@pytest.mark.criterion(6, "threshold constants")
def test_c6_threshold_constants():
    assert abs(threshold_exact() - 5.19089307) < THRESHOLD_TOL
    assert abs(corollary_alpha(5.19) - 4.14135) < COROLLARY_TOL


# 7 ---------------------------------------------------------------------------


@pytest.mark.criterion(7, "density sums to clause count")
@pytest.mark.parametrize("n", [10, 100, 1000])
@pytest.mark.parametrize("alpha", [Fraction(2), Fraction(4), Fraction(16, 3)])
def test_c7_density_identity(n, alpha):
    total = sum(m_alpha(i, n, alpha) for i in range(3, n + 1))
    assert isinstance(total, Fraction)
    assert total == alpha * n


# 8 ---------------------------------------------------------------------------


@pytest.mark.criterion(8, "trajectory bound peaks")
@pytest.mark.xfail(strict=True, reason="recurrence as stated peaks near half the quoted values")
@pytest.mark.parametrize("alpha, target, kmax", [(4, 294, 30), (8, 1160, 55)])
def test_c8_curve_peaks(request, alpha, target, kmax):
    with Timer(10.0):
        k, peak = m_alpha_curve(10**5, alpha).peak()
    request.node._criterion_note = f"alpha={alpha}: peak {peak:.1f} at k={k}"
    assert k <= kmax
    assert abs(peak - target) <= CURVE_REL_TOL * target


# 9 ---------------------------------------------------------------------------


@pytest.mark.criterion(9, "non-uniform family")
@pytest.mark.parametrize("m", range(1, 7))
def test_c9_family(m):
    n = 2 * m + 1
    positive = Problem(n, [(2 * i - 1, 2 * i, n) for i in range(1, m + 1)])
    negative = Problem(n, [(-(2 * i - 1), -2 * i, -n) for i in range(1, m + 1)])
    relabeled = sort_problem(negative)
    assert relabeled.clauses == [(-1, -2 * i, -(2 * i + 1)) for i in range(1, m + 1)]
    assert solve(positive).max_len() == 3 ** (m + 1) - 3**m + 1
    assert solve(negative).max_len() == 2**m
    res = solve(relabeled)
    assert res.max_len() == 2
    assert sum(r.work for r in res.trace) == 2 * m
    assert all(r.recursive_calls == 0 for r in res.trace)


# 10 --------------------------------------------------------------------------


@pytest.mark.criterion(10, "expected solutions")
def test_c10_expected_solutions():
    with Timer(10.0):
        assert expected_solutions(4, 2) == Fraction(49, 4)
        counts = []
        for signs in itertools.product((1, -1), repeat=6):
            p = Problem(4, [
                tuple(s * v for s, v in zip(signs[:3], (1, 2, 3))),
                tuple(s * v for s, v in zip(signs[3:], (2, 3, 4))),
            ])
            counts.append(solution_decay_curve(p).observed[-1])
        assert min(counts) >= 12 and max(counts) <= 13
        assert Fraction(sum(counts), len(counts)) == Fraction(49, 4)


# 11 --------------------------------------------------------------------------


def _random_matrix(rng, n=5):
    rows = ["".join(rng.choice("01.") for _ in range(n)) for _ in range(rng.randint(0, 4))]
    return TernaryMatrix(range(1, n + 1), rows)


@pytest.mark.criterion(11, "property suites")
def test_c11_lattice_laws():
    rng = random.Random(7)
    cols = range(1, 6)
    top, bottom = TernaryMatrix.full(cols), TernaryMatrix.empty(cols)
    with Timer(120.0):
        for _ in range(10**4):
            a, b, c = (_random_matrix(rng) for _ in range(3))
            assert reduce(a | (a & b)) == reduce(a)
            assert reduce(a & (a | b)) == reduce(a)
            assert reduce(a & (b | c)) == reduce((a & b) | (a & c))
            assert reduce(a | (b & c)) == reduce((a | b) & (a | c))
            assert reduce(a | a) == reduce(a) == reduce(a & a)
            assert reduce(a | bottom) == reduce(a) == reduce(a & top)
            assert reduce(a | top) == reduce(top)
            assert (a & bottom).is_empty()


@pytest.mark.criterion(11, "property suites")
def test_c11_preprocessing_bijection():
    rng = random.Random(11)
    with Timer(120.0):
        for _ in range(500):
            n = rng.randint(4, 10)
            p = random_problem(rng, n, rng.randint(1, 5 * n))
            ref = brute_force(p).models
            for q in (sort_problem(p), permute_trajectories(p)):
                mapped = [apply_model_back(q, x) for x in brute_force(q).models]
                assert len(mapped) == len(set(mapped))
                assert set(mapped) == ref


@pytest.mark.criterion(11, "property suites")
def test_c11_generator_audit():
    rng = random.Random(13)
    with Timer(120.0):
        for seed in range(200):
            n = rng.randint(3, 60)
            alpha = feasible_alpha(n, rng.uniform(1, 8))
            spec = GenSpec(n, alpha, seed)
            p = gen_exact_uniform(spec)
            assert p.m == spec.m
            assert polarity_audit(p, spec.per_polarity)
            assert all(len({abs(l) for l in c}) == 3 for c in p.clauses)
