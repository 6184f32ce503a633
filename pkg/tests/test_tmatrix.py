import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from descsat.tmatrix import (
    EnumerationLimitError,
    TernaryMatrix,
    block_decompositions,
    clause_matrix,
    conjoin,
    count_models,
    disjoin,
    enumerate_models,
    extend,
    pairwise_reduce,
    reduce,
)

PSI1_ROWS = {
    (0, 0, 0), (0, 1, 0), (0, 1, 1), (1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1),
}
# second clause over (x2, x3, x4)
PSI2_ROWS = {
    (0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1), (1, 1, 0), (1, 1, 1), (1, 0, 0),
}
PHI_MODELS = {
    (0, 0, 0, 0), (0, 0, 0, 1), (0, 1, 0, 0), (0, 1, 1, 0), (0, 1, 1, 1), (1, 0, 0, 0),
    (1, 0, 0, 1), (1, 0, 1, 0), (1, 0, 1, 1), (1, 1, 0, 0), (1, 1, 1, 0), (1, 1, 1, 1),
}

NMAX = 5
cells = st.sampled_from("01.")


@st.composite
def matrices(draw, n=NMAX):
    cols = sorted(draw(st.sets(st.integers(1, n), min_size=1, max_size=n)))
    rows = draw(st.lists(st.text(cells, min_size=len(cols), max_size=len(cols)), max_size=5))
    return TernaryMatrix(cols, rows)


def models(a, n=NMAX):
    return a.enumerate_models(n)


def omega():
    return TernaryMatrix.full(range(1, NMAX + 1))


def empty():
    return TernaryMatrix.empty(range(1, NMAX + 1))


def test_clause_matrices():
    m1 = clause_matrix((1, 2, -3))
    assert m1.columns == (1, 2, 3)
    assert set(m1.enumerate_models(3)) == PSI1_ROWS
    assert len(m1) == 7
    m2 = clause_matrix((-2, 3, -4))
    assert m2.columns == (2, 3, 4)
    assert {m[1:] for m in m2.enumerate_models(4)} == PSI2_ROWS


@pytest.mark.parametrize("signs", list(itertools.product((1, -1), repeat=3)))
def test_every_clause_has_seven_models(signs):
    c = tuple(s * v for s, v in zip(signs, (2, 4, 5)))
    assert clause_matrix(c).count_models() == 7


def test_extend():
    a = TernaryMatrix([1, 2, 4], ["010", "1.1"])
    b = extend(a, [1, 2, 3, 4])
    assert b.columns == (1, 2, 3, 4)
    assert b.row_strings() == ["01.0", "1..1"]
    assert extend(a, a.columns) == a
    assert extend(TernaryMatrix.empty([1]), [1, 2]).is_empty()
    with pytest.raises(ValueError):
        extend(a, [1, 2])


def test_reduce_eq_no5():
    a = TernaryMatrix([1, 2, 3], ["000", "001", "010", "011", "100", "101", "110"])
    assert reduce(a).row_strings() == ["0..", "10.", "110"]
    assert reduce(reduce(a)) == reduce(a)
    # the intermediate 4-row form is another valid reduction of the same set
    mid = TernaryMatrix([1, 2, 3], ["00.", "01.", "10.", "110"])
    assert reduce(mid) == reduce(a)


def test_reduce_full_block():
    a = TernaryMatrix([1, 2, 3], ["".join(b) for b in itertools.product("01", repeat=3)])
    assert reduce(a).row_strings() == ["..."]


def test_disjoin_blocks_rebuild_clause():
    blocks = [TernaryMatrix([1], ["1"]), TernaryMatrix([1, 2], ["01"]), TernaryMatrix([1, 2, 3], ["000"])]
    acc = blocks[0]
    for b in blocks[1:]:
        acc = disjoin(acc, b)
    assert acc == reduce(clause_matrix((1, 2, -3)))


def test_bounds():
    a = TernaryMatrix([1, 3], ["0.", "11"])
    om, em = omega(), empty()
    assert models(a | em) == models(a)
    assert models(a | om) == models(om)
    assert models(a & om) == models(a)
    assert models(a & em) == set()
    assert count_models(om, 7) == 2**7
    assert count_models(em, NMAX) == 0
    assert enumerate_models(em, NMAX) == set()


def test_conjoin_golden():
    phi = conjoin(clause_matrix((1, 2, -3)), clause_matrix((-2, 3, -4)))
    assert phi.enumerate_models(4) == PHI_MODELS
    assert count_models(phi, 4) == 12
    assert sorted(phi.row_strings()) == sorted(["101.", ".00.", ".100", ".11."])
    assert phi.is_canonical()


def test_render_layout():
    a = TernaryMatrix([1, 2, 10], ["0.1", "11."])
    text = a.render()
    assert text.splitlines()[0] == "x1 x2 x10"
    assert TernaryMatrix.parse(text) == a


def test_block_decomposition():
    m = clause_matrix((1, 2, -3))
    blocks = m.block_decompose()
    got = {(b.columns, b.row_strings()[0]) for b in blocks}
    assert got == {((1,), "1"), ((1, 2), "01"), ((1, 2, 3), "000")}
    acc = TernaryMatrix.empty([1, 2, 3])
    for b in blocks:
        acc = acc | b
    assert acc == reduce(m)
    assert len(block_decompositions(m)) == 6
    single = TernaryMatrix([2, 5], ["10"])
    assert [b.row_strings() for b in single.block_decompose()] == [["10"]]


def test_enumeration_cutoff():
    with pytest.raises(EnumerationLimitError):
        TernaryMatrix.full([1]).enumerate_models(27)


def test_bad_rows():
    with pytest.raises(ValueError):
        TernaryMatrix([1, 2], ["0"])
    with pytest.raises(ValueError):
        TernaryMatrix([1, 2], ["0x"])


@given(matrices(), matrices())
def test_semantic_laws(a, b):
    ma, mb = models(a), models(b)
    assert models(a & b) == ma & mb
    assert models(a | b) == ma | mb
    assert models(reduce(a)) == ma
    wider = extend(a, range(1, NMAX + 1))
    assert models(wider) == ma


@given(matrices())
def test_count_matches_enumeration(a):
    assert a.count_models(NMAX) == len(models(a))


@given(matrices(), st.integers(0, 2**32))
def test_reduction_is_confluent(a, seed):
    rng = random.Random(seed)
    assert reduce(pairwise_reduce(a, rng)) == reduce(a)
    assert models(pairwise_reduce(a, rng)) == models(a)


@given(matrices())
def test_canonical_rows_are_disjoint(a):
    r = reduce(a)
    total = sum(2 ** (NMAX - bin(c).count("1")) for c, _ in r.rows)
    assert total == len(models(a))
    assert r.is_canonical()
