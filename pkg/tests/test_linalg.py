import random

import pytest
from hypothesis import given, strategies as st

from brstack.linalg import (
    CochainComplex,
    CompositionNonzero,
    FgAbGroup,
    GroupHom,
    IntMatrix,
    NotAHomomorphism,
    Presentation,
    group_invariants,
    hermite_normal_form,
    homology_at,
    in_row_lattice,
    is_torsion_free,
    kernel_basis,
    minors_gcd_invariants,
    reduce_mod_lattice,
    smith_normal_form,
    solve_integer,
    zero_hom,
)

entries = st.integers(-20, 20)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    rows = draw(st.lists(st.lists(entries, min_size=c, max_size=c), min_size=r, max_size=r))
    return IntMatrix.from_rows(rows, c)


def check_smith(M):
    snf = smith_normal_form(M)
    assert snf.U @ M @ snf.V == snf.S
    if M.rows:
        assert abs(snf.U.det()) == 1
        assert snf.U @ snf.U_inv == IntMatrix.identity(M.rows)
    if M.cols:
        assert abs(snf.V.det()) == 1
        assert snf.V @ snf.V_inv == IntMatrix.identity(M.cols)
    d = snf.diagonal
    for i in range(M.rows):
        for j in range(M.cols):
            if i != j:
                assert snf.S[i, j] == 0
    assert all(x >= 0 for x in d)
    nz = [x for x in d if x]
    assert d[: len(nz)] == nz  # zeros trail
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    return snf


def test_identity_snf():
    snf = check_smith(IntMatrix.identity(2))
    assert snf.S == IntMatrix.identity(2)
    assert snf.U == IntMatrix.identity(2) and snf.V == IntMatrix.identity(2)


def test_two_by_two_example():
    snf = check_smith(IntMatrix.from_rows([[2, 4], [6, 8]]))
    assert snf.diagonal == [2, 4]


def test_already_diagonal():
    assert check_smith(IntMatrix.from_rows([[1, 0], [0, 0]])).diagonal == [1, 0]


def test_empty_matrices():
    for shape in [(0, 0), (0, 3), (3, 0)]:
        snf = check_smith(IntMatrix.zeros(*shape))
        assert snf.diagonal == []


def test_big_integers_survive():
    big = 10**40 + 7
    snf = check_smith(IntMatrix.from_rows([[big, 0], [0, big * 3]]))
    assert snf.diagonal == [big, 3 * big]


@given(matrices())
def test_smith_invariants(M):
    check_smith(M)


@given(matrices())
def test_smith_matches_minor_oracle(M):
    snf = smith_normal_form(M)
    assert [d for d in snf.diagonal if d] == minors_gcd_invariants(M)


def test_minor_oracle_hand_case():
    assert minors_gcd_invariants(IntMatrix.from_rows([[2, 4], [6, 8]])) == [2, 4]
    assert minors_gcd_invariants(IntMatrix.from_rows([[0, 0], [0, 0]])) == []


def test_group_invariants_examples():
    assert group_invariants(1, IntMatrix.zeros(0, 1)) == FgAbGroup.free(1)
    assert group_invariants(2, IntMatrix.from_rows([[2, 0]])) == FgAbGroup(1, (2,))
    assert group_invariants(2, IntMatrix.from_rows([[2, 4], [6, 8]])) == FgAbGroup(0, (2, 4))
    assert group_invariants(0, IntMatrix.zeros(0, 0)) == FgAbGroup()


def test_torsion_free():
    assert is_torsion_free(FgAbGroup.free(3))
    assert not is_torsion_free(FgAbGroup(1, (2,)))
    assert not is_torsion_free(group_invariants(2, IntMatrix.from_rows([[2, 4], [6, 8]])))


@given(matrices(max_rows=4, max_cols=4), st.randoms(use_true_random=False))
def test_canonical_under_permutation_and_redundancy(R, rnd):
    g = R.cols
    G = group_invariants(g, R)
    perm = list(range(g))
    rnd.shuffle(perm)
    permuted = IntMatrix.from_rows([[row[p] for p in perm] for row in R.data], g)
    assert group_invariants(g, permuted) == G
    if R.rows:
        coeffs = [rnd.randint(-3, 3) for _ in range(R.rows)]
        extra = [sum(c * R[i, j] for i, c in enumerate(coeffs)) for j in range(g)]
        assert group_invariants(g, R.vstack(IntMatrix.from_rows([extra], g))) == G


def test_fg_ab_group_validation_and_text():
    with pytest.raises(ValueError):
        FgAbGroup(0, (4, 2))
    with pytest.raises(ValueError):
        FgAbGroup(0, (1,))
    G = FgAbGroup.from_cyclic_orders([4, 2, 0])
    assert G == FgAbGroup(1, (2, 4))
    assert str(G) == "Z/2 + Z/4 + Z"
    assert str(FgAbGroup()) == "0"
    assert FgAbGroup.from_json(G.to_json()) == G
    assert FgAbGroup.from_json([6, 0]) == FgAbGroup(1, (6,))
    assert FgAbGroup.cyclic(6) + FgAbGroup.cyclic(4) == FgAbGroup(0, (2, 12))
    assert G.torsion() == FgAbGroup(0, (2, 4))
    assert FgAbGroup(0, (2, 4)).order() == 8 and G.order() is None


def test_homology_examples():
    Z, zero = Presentation.free(1), Presentation.free(0)
    assert homology_at(zero_hom(zero, Z), zero_hom(Z, zero)) == FgAbGroup.free(1)
    double = GroupHom(Z, Z, IntMatrix.from_rows([[2]]))
    assert homology_at(double, zero_hom(Z, zero)) == FgAbGroup.cyclic(2)
    Z12 = Presentation(1, IntMatrix.from_rows([[12]]))
    # Koszul degree-2 slot for trivial action: every differential vanishes
    C = CochainComplex((Z12, Z12.power(2), Z12), (zero_hom(Z12, Z12.power(2)), zero_hom(Z12.power(2), Z12)))
    assert C.cohomology(2) == FgAbGroup.cyclic(12)


def test_composition_nonzero():
    Z = Presentation.free(1)
    f = GroupHom(Z, Z, IntMatrix.identity(1))
    with pytest.raises(CompositionNonzero):
        homology_at(f, f)


def test_hom_must_respect_relations():
    Z2 = Presentation(1, IntMatrix.from_rows([[2]]))
    with pytest.raises(NotAHomomorphism):
        GroupHom(Z2, Presentation.free(1), IntMatrix.identity(1))
    GroupHom(Presentation.free(1), Z2, IntMatrix.identity(1))


@given(matrices(max_rows=4, max_cols=4))
def test_exact_pairs_have_trivial_homology(A):
    # Z^c --A--> Z^r --> coker(A): exact at the middle
    src, mid = Presentation.free(A.cols), Presentation.free(A.rows)
    quot = Presentation(A.rows, A.T)
    d_in = GroupHom(src, mid, A)
    d_out = GroupHom(mid, quot, IntMatrix.identity(A.rows))
    assert homology_at(d_in, d_out).is_trivial


@given(matrices(max_rows=4, max_cols=5))
def test_kernel_basis(A):
    for v in kernel_basis(A):
        assert all(x == 0 for x in A.apply(v))
    snf = smith_normal_form(A)
    assert len(kernel_basis(A)) == A.cols - snf.rank


@given(matrices(max_rows=4, max_cols=4), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_solve_integer(A, coeffs):
    b = A.apply(coeffs[: A.cols])
    x = solve_integer(A, b)
    assert x is not None and A.apply(x) == b


def test_solve_integer_unsolvable():
    assert solve_integer(IntMatrix.from_rows([[2]]), [1]) is None


@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), max_size=4),
       st.lists(st.integers(-20, 20), min_size=3, max_size=3),
       st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_hermite_form_canonical(rows, v, w):
    H = hermite_normal_form(rows, 3)
    for r in rows:
        assert in_row_lattice(r, H, 3)
    for h in H:
        assert in_row_lattice(h, rows, 3)
    shifted = [v[j] + sum(w[i] * rows[i][j] for i in range(len(rows))) for j in range(3)]
    assert reduce_mod_lattice(v, H) == reduce_mod_lattice(shifted, H)


def test_matrix_json_round_trip():
    M = IntMatrix.from_rows([[10**30, -1], [0, 5]])
    assert M.to_json()[0][0] == str(10**30)
    assert IntMatrix.from_json(M.to_json()) == M


def test_bareiss_det_against_expansion():
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randint(1, 4)
        rows = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
        assert IntMatrix.from_rows(rows).det() == _leibniz(rows)


def _leibniz(rows):
    from itertools import permutations

    n, total = len(rows), 0
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = 1
        for i, j in enumerate(perm):
            prod *= rows[i][j]
        total += -prod if inv % 2 else prod
    return total
