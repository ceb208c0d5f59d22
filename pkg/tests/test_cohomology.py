from itertools import permutations
from math import comb

import pytest
from hypothesis import given, strategies as st

from brstack.cohomology import (
    InvalidAction,
    NoncommutingActions,
    ZrModule,
    group_cohomology,
    koszul_cochain_complex,
    module_from_json,
)
from brstack.linalg import FgAbGroup, IntMatrix, Presentation, kernel_basis

Z = FgAbGroup.free(1)


def sign_module(*signs):
    return ZrModule(Presentation.free(1), tuple(IntMatrix.from_rows([[s]]) for s in signs))


def test_rank_zero_is_the_module():
    assert group_cohomology(ZrModule.trivial(FgAbGroup.cyclic(5), 0)) == [FgAbGroup.cyclic(5)]


def test_rank_one_trivial():
    C = koszul_cochain_complex(ZrModule.trivial(Z, 1))
    assert C.differentials[0].matrix == IntMatrix.from_rows([[0]])
    assert group_cohomology(ZrModule.trivial(Z, 1)) == [Z, Z]


def test_rank_two_trivial_shapes():
    C = koszul_cochain_complex(ZrModule.trivial(Z, 2))
    assert [t.generators for t in C.terms] == [1, 2, 1]
    assert all(d.matrix.is_zero() for d in C.differentials)


def test_twisted_degree_one_to_two_map():
    C = koszul_cochain_complex(sign_module(-1, 1))
    assert C.differentials[1].matrix == IntMatrix.from_rows([[0, 2]])
    assert C.differentials[0].matrix == IntMatrix.from_rows([[-2], [0]])
    assert group_cohomology(sign_module(-1, 1)) == [FgAbGroup(), FgAbGroup.cyclic(2), FgAbGroup.cyclic(2)]


def test_top_degree_with_torsion_coefficients():
    assert group_cohomology(ZrModule.trivial(FgAbGroup.cyclic(12), 2))[2] == FgAbGroup.cyclic(12)


def test_top_degree_returns_a_finite_unit_model():
    # H^2 of Z^2 acting trivially on a model of A^x returns the model
    model = FgAbGroup(1, (2, 6))
    assert group_cohomology(ZrModule.trivial(model, 2))[2] == model


@pytest.mark.parametrize("r", [0, 1, 2, 3])
@pytest.mark.parametrize("orders", [[0], [3], [2, 0], [4, 12]])
def test_trivial_action_exterior_pattern(r, orders):
    M = FgAbGroup.from_cyclic_orders(orders)
    H = group_cohomology(ZrModule.trivial(M, r))
    for p in range(r + 1):
        expect = FgAbGroup()
        for _ in range(comb(r, p)):
            expect = expect + M
        assert H[p] == expect


def _random_commuting(draw, g, r):
    # diagonal sign actions conjugated by a product of elementary matrices
    A, A_inv = IntMatrix.identity(g), IntMatrix.identity(g)
    for _ in range(draw(st.integers(0, 3))):
        i, j = draw(st.integers(0, g - 1)), draw(st.integers(0, g - 1))
        if i == j:
            continue
        k = draw(st.integers(-2, 2))
        E = [[int(a == b) for b in range(g)] for a in range(g)]
        E_inv = [row[:] for row in E]
        E[i][j], E_inv[i][j] = k, -k
        A = A @ IntMatrix.from_rows(E)
        A_inv = IntMatrix.from_rows(E_inv) @ A_inv
    out = []
    for _ in range(r):
        D = IntMatrix.from_rows([[draw(st.sampled_from([1, -1])) if a == b else 0 for b in range(g)] for a in range(g)])
        out.append(A @ D @ A_inv)
    return tuple(out)


@st.composite
def free_modules(draw):
    g = draw(st.integers(1, 3))
    r = draw(st.integers(1, 3))
    return ZrModule(Presentation.free(g), _random_commuting(draw, g, r))


@given(free_modules(), st.data())
def test_order_independence(M, data):
    H = group_cohomology(M)
    order = data.draw(st.permutations(list(range(M.r))))
    assert group_cohomology(M.permuted(order)) == H


@given(free_modules())
def test_invariants_match_fixed_points(M):
    # H^0 is the common fixed sublattice, computed directly from stacked T_i - 1
    g = M.underlying.generators
    eye = IntMatrix.identity(g)
    stacked = IntMatrix.from_rows([row for T in M.actions for row in (T - eye).data], g)
    assert group_cohomology(M)[0] == FgAbGroup.free(len(kernel_basis(stacked)))


@given(free_modules())
def test_euler_characteristic_of_ranks_vanishes(M):
    # alternating sum of free ranks of the terms is 0 for r >= 1, and so is
    # the alternating sum of ranks of cohomology
    H = group_cohomology(M)
    assert sum((-1) ** p * h.rank for p, h in enumerate(H)) == 0


def test_all_orders_for_rank_three():
    M = ZrModule(Presentation.free(1), tuple(IntMatrix.from_rows([[s]]) for s in (-1, 1, -1)))
    H = group_cohomology(M)
    for order in permutations(range(3)):
        assert group_cohomology(M.permuted(order)) == H


def test_invalid_actions():
    Z2 = Presentation(1, IntMatrix.from_rows([[2]]))
    with pytest.raises(InvalidAction):
        ZrModule(Presentation.free(1), (IntMatrix.from_rows([[2]]),))
    with pytest.raises(InvalidAction):
        ZrModule(Presentation.free(2), (IntMatrix.identity(3),))
    with pytest.raises(InvalidAction):
        # x -> 3x is fine on Z/2, x -> 2x is not invertible there
        ZrModule(Z2, (IntMatrix.from_rows([[2]]),))
    ZrModule(Z2, (IntMatrix.from_rows([[3]]),))


def test_noncommuting_actions():
    S = IntMatrix.from_rows([[0, 1], [1, 0]])
    D = IntMatrix.from_rows([[-1, 0], [0, 1]])
    with pytest.raises(NoncommutingActions):
        ZrModule(Presentation.free(2), (S, D))


def test_module_json():
    M = module_from_json({"generators": 1, "relations": [], "actions": [[[-1]], [[1]]]})
    assert group_cohomology(M)[2] == FgAbGroup.cyclic(2)
    M = module_from_json({"generators": 1, "relations": [["12"]], "r": 2})
    assert group_cohomology(M) == [FgAbGroup.cyclic(12), FgAbGroup(0, (12, 12)), FgAbGroup.cyclic(12)]
