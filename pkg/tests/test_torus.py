import random

import pytest
from hypothesis import given, strategies as st
from sympy import Matrix, factorint, prime

from brstack.linalg import FgAbGroup, IntMatrix
from brstack.torus import (
    UnitsComplexSpec,
    alternating_sum,
    bottom_row_cohomology,
    coface_maps,
    differential,
    displayed_formula,
    even_closed_form,
    gln_bottom_row,
    gln_coface_maps,
    odd_closed_form,
)

Z = FgAbGroup.free(1)


def spec(k, max_degree=6, units=Z):
    return UnitsComplexSpec(units, FgAbGroup.free(k), max_degree)


# independent oracle: apply the coface operations to explicit lists of vectors
def coface_on_list(a, j):
    p = len(a)
    zero = [0] * (len(a[0]) if a else 1)
    if j == 0:
        return [zero] + a
    if j == p + 1:
        return a + [zero]
    return a[:j] + [a[j - 1]] + a[j:]


def oracle_differential(a, k):
    p = len(a)
    out = [[0] * k for _ in range(p + 1)]
    for j in range(p + 2):
        img = coface_on_list(a, j) if a else [[0] * k]
        for s in range(p + 1):
            for e in range(k):
                out[s][e] += (-1) ** j * img[s][e]
    return out


def flatten(a):
    return [x for v in a for x in v]


def test_coface_examples():
    d0, d1, _ = coface_maps(1, 1)
    assert d1.matrix.apply([5]) == [5, 5]
    assert d0.matrix.apply([5]) == [0, 5]
    assert coface_maps(2, 1)[3].matrix.apply([4, 7]) == [4, 7, 0]
    assert len(coface_maps(4, 2)) == 6


def test_differential_examples():
    s = spec(1)
    assert differential(1, s).matrix.apply([0, 9]) == [0, 0, 0]
    assert differential(2, s).matrix.apply([0, 3, 5]) == [0, -3, 0, 5]
    assert differential(1, s).matrix.apply([7, 0]) == [7, 0, 0]  # 1 - 1 + 1 on units
    assert differential(0, s).matrix.is_zero()
    with pytest.raises(ValueError):
        differential(6, s)


@given(st.integers(0, 7), st.integers(1, 3), st.data())
def test_differential_matches_list_oracle(p, k, data):
    a = [[data.draw(st.integers(-9, 9)) for _ in range(k)] for _ in range(p)]
    m = alternating_sum(coface_maps(p, k))
    assert m.apply(flatten(a)) == flatten(oracle_differential(a, k))


@given(st.integers(0, 6), st.data())
def test_simplicial_identities(p, data):
    # delta_j delta_i = delta_i delta_{j-1} for i < j, as maps M^p -> M^(p+2)
    i = data.draw(st.integers(0, p + 1))
    j = data.draw(st.integers(i + 1, p + 2))
    lo, hi = coface_maps(p, 1), coface_maps(p + 1, 1)
    assert hi[j].matrix @ lo[i].matrix == hi[i].matrix @ lo[j - 1].matrix


@pytest.mark.parametrize("k", [1, 2, 3])
def test_d_squared_zero_up_to_eight(k):
    s = spec(k, max_degree=10)
    for p in range(9):
        assert (differential(p + 1, s).matrix @ differential(p, s).matrix).is_zero()


def test_closed_forms_match():
    for p in range(1, 9):
        for k in (1, 2):
            expected = even_closed_form(p, k) if p % 2 == 0 else odd_closed_form(p, k)
            assert alternating_sum(coface_maps(p, k)) == expected


@pytest.mark.parametrize("p", [2, 4, 6])
def test_even_closed_form_image_contained(p):
    from brstack.linalg import in_row_lattice

    computed_cols = alternating_sum(coface_maps(p, 1)).columns()
    for col in even_closed_form(p).columns():
        assert in_row_lattice(col, computed_cols, p + 1)


def test_subtracted_middle_sum_disagrees():
    for p in range(1, 9):
        expected = even_closed_form(p) if p % 2 == 0 else odd_closed_form(p)
        assert displayed_formula(p) != expected


def test_cohomology_rank_one():
    rep = bottom_row_cohomology(spec(1, max_degree=7))
    assert rep.e2[0] == Z
    assert rep.e2[1] == Z  # the character group survives in degree one
    assert all(rep.e2[p].is_trivial for p in range(2, 7))


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_degrees_two_through_eight_vanish(k):
    rep = bottom_row_cohomology(spec(k, max_degree=9, units=FgAbGroup(1, (6,))))
    assert rep.e2[1] == FgAbGroup.free(k)
    assert all(rep.e2[p].is_trivial for p in range(2, 9))
    assert rep.e2[0] == FgAbGroup(1, (6,))


def test_trivial_characters():
    rep = bottom_row_cohomology(spec(0))
    assert all(rep.e2[p].is_trivial for p in range(1, 6))


def test_degree_one_for_rank_two():
    assert bottom_row_cohomology(spec(2)).e2[1] == FgAbGroup.free(2)


def test_blocks_are_separate_and_scalar():
    rep = bottom_row_cohomology(spec(2, units=FgAbGroup(2, (2,))))
    for p in range(rep.spec.max_degree):
        assert rep.blocks_separate(p)
        g = rep.u_block(p).rows
        assert rep.u_block(p) == IntMatrix.identity(g).scale(p % 2)


def test_spec_validation():
    with pytest.raises(ValueError):
        UnitsComplexSpec(Z, FgAbGroup(1, (2,)), 4)
    with pytest.raises(ValueError):
        bottom_row_cohomology(spec(1, max_degree=1))


def test_report_json():
    js = bottom_row_cohomology(spec(1, max_degree=4)).to_json(audit=True)
    assert js["d_squared_zero"] and js["blocks_separate"]
    assert all(js["closed_form_checks"].values())
    assert not any(js["sign_convention"]["subtracted_middle_sum_agrees"].values())
    assert [d["p"] for d in js["degrees"]] == [0, 1, 2, 3]
    assert js["degrees"][2]["differential"] == [["0", "0", "0"], ["0", "-1", "0"], ["0", "0", "0"], ["0", "0", "1"]]


# GL_n: check the determinant cofaces against explicit matrices


def _random_gl_element(rng, n, q):
    # diag(q, 1, ..., 1) conjugated by an elementary matrix so that det = q
    D = Matrix.diag(q, *([1] * (n - 1)))
    if n == 1:
        return D
    E = Matrix.eye(n)
    E[0, n - 1] = rng.randint(-3, 3)
    return E * D * E.inv()


def _bar_face(h, j):
    p1 = len(h)
    if j == 0:
        return h[1:]
    if j == p1:
        return h[:-1]
    return h[: j - 1] + [h[j - 1] * h[j]] + h[j + 1:]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_gln_cofaces_against_matrices(n):
    rng = random.Random(n)
    for p in range(0, 5):
        primes = [prime(i + 1) for i in range(p + 1)]
        h = [_random_gl_element(rng, n, q) for q in primes]
        for j, f in enumerate(gln_coface_maps(p)):
            g = _bar_face(h, j)
            for i in range(p):
                exps = factorint(g[i].det())
                col = [exps.get(q, 0) for q in primes]
                assert col == [f.matrix[t, i] for t in range(p + 1)]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_gln_matches_rank_one_torus(n):
    g = gln_bottom_row(n, 6)
    t = bottom_row_cohomology(spec(1, 6))
    assert [d.matrix for d in g.differentials] == [d.matrix for d in t.differentials]
    assert g.e2 == t.e2
    assert g.labels[2] == ("u1", "det(g1)", "det(g2)")
    assert g.kind == f"GL{n}"


def test_gln_vanishing_for_n_two():
    rep = gln_bottom_row(2, 4)
    assert rep.e2[2].is_trivial and rep.e2[3].is_trivial
