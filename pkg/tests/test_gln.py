import random

import pytest
import sympy
from hypothesis import given, strategies as st

from brstack.gln import (
    DetRingElement,
    NotAUnit,
    NotImage,
    PhiImage,
    SizeBoundExceeded,
    cofactor_determinant,
    det_is_multiplicative,
    det_nonzerodivisor_probe,
    determinant_poly,
    divide_exact,
    recognize_phi_image,
    shifted_det_leading,
    substitute_scalar_matrix,
    units_report,
    variable_names,
)
from brstack.rings import BaseRing, GroupRingElement

ZZ = BaseRing.parse("ZZ")
NIL = BaseRing.parse("ZZ[a]/(a^2)")


def P(text, base=ZZ, n=2):
    return DetRingElement.parse(text, base, n)


def test_small_determinants():
    assert str(determinant_poly(1)) == "X11"
    assert determinant_poly(2) == P("X11*X22 - X12*X21").numerator
    assert len(determinant_poly(3)) == 6
    with pytest.raises(SizeBoundExceeded):
        determinant_poly(6)
    with pytest.raises(SizeBoundExceeded):
        determinant_poly(0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_determinant_against_cofactor_and_sympy(n):
    d = determinant_poly(n)
    assert d == cofactor_determinant(n)
    assert len(d) == [1, 2, 6, 24][n - 1]
    syms = sympy.symbols(variable_names(n))
    sym_det = sympy.Poly(sympy.Matrix(n, n, syms).det(method="berkowitz"), *syms)
    ours = {e: c for e, c in d.terms}
    assert ours == {tuple(e): int(c) for e, c in sym_det.terms()}


def test_scalar_substitution_examples():
    T = lambda s: GroupRingElement.parse(s, ZZ, 1, ["T"])  # noqa: E731
    assert substitute_scalar_matrix(determinant_poly(2), 2) == T("T^2")
    assert substitute_scalar_matrix(P("X12").numerator, 2).is_zero()
    s = substitute_scalar_matrix(P("det + a", NIL).numerator, 2)
    assert s == GroupRingElement.parse("T^2 + a", NIL, 1, ["T"])


@st.composite
def polys(draw, base=ZZ, n=2):
    terms = {}
    for _ in range(draw(st.integers(0, 3))):
        e = tuple(draw(st.integers(0, 2)) for _ in range(n * n))
        terms[e] = draw(st.integers(-4, 4))
    return GroupRingElement.from_dict(base, n * n, terms, variable_names(n))


@given(polys(), polys())
def test_substitution_is_a_ring_map(f, g):
    s = lambda x: substitute_scalar_matrix(x, 2)  # noqa: E731
    assert s(f * g) == s(f) * s(g)
    assert s(f + g) == s(f) + s(g)


@given(polys(), polys())
def test_divide_exact(f, g):
    det = determinant_poly(2)
    assert divide_exact(f * det, det) == f
    if not g.is_zero() and g.base.is_unit(g.terms[-1][1]):
        q = divide_exact(f, g)
        if q is not None:
            assert q * g == f


def test_canonical_form_cancels_det():
    x = P("(X11 + 1)*det^2*det^-3")
    assert x.det_power == 1 and x.numerator == P("X11 + 1").numerator
    assert P("det*det^-1").is_one()


def test_recognition_examples():
    F11 = BaseRing.parse("GF(11)")
    r = recognize_phi_image(P("7*det^3", F11), P("8*det^-3", F11))
    assert r == PhiImage(7, 3)
    r = recognize_phi_image(P("det + a", NIL), P("(det - a)*det^-2", NIL))
    assert isinstance(r, NotImage) and r.witness == "no exact match at any k"
    assert recognize_phi_image(P("det^-2"), P("det^2")) == PhiImage(1, -2)
    assert recognize_phi_image(P("-1"), P("-1")) == PhiImage(-1, 0)


def test_not_a_unit():
    with pytest.raises(NotAUnit):
        recognize_phi_image(P("det"), P("det + 1"))
    with pytest.raises(NotAUnit):
        recognize_phi_image(P("2*det"), P("det^-1"))


def test_nilpotent_counterexample():
    assert (P("det + a", NIL) * P("det - a", NIL)) == P("det^2", NIL)
    assert (P("det + a", NIL) * P("(det - a)*det^-2", NIL)).is_one()


def test_other_nonreduced_base():
    Z4 = BaseRing.parse("ZZ/4")
    assert (P("det + 2", Z4) * P("(det - 2)*det^-2", Z4)).is_one()
    assert isinstance(recognize_phi_image(P("det + 2", Z4), P("(det - 2)*det^-2", Z4)), NotImage)


def test_disconnected_reduced_base():
    # ZZ/6 is reduced but splits as F2 x F3; 3 and 4 are complementary idempotents
    Z6 = BaseRing.parse("ZZ/6")
    w, w_inv = P("3*det + 4", Z6), P("3*det^-1 + 4", Z6)
    assert (w * w_inv).is_one()
    r = recognize_phi_image(w, w_inv)
    assert isinstance(r, NotImage) and r.stage == "scalar substitution"


UNIT_BASES = [ZZ, BaseRing.parse("ZZ/6"), BaseRing.parse("GF(5)"), BaseRing.parse("GF(7)[a]/(a^2+1)")]


def units_of(base):
    if base.kind == "ZZ":
        return [1, -1]
    return [x for x in base.elements() if base.is_unit(x)]


@pytest.mark.parametrize("base", UNIT_BASES, ids=str)
@given(data=st.data())
def test_phi_round_trip(base, data):
    n = data.draw(st.integers(1, 3))
    a = data.draw(st.sampled_from(units_of(base)))
    m = data.draw(st.integers(-3, 3))
    w = DetRingElement.det_power_of(base, n, m, a)
    w_inv = DetRingElement.det_power_of(base, n, -m, base.inverse(a))
    assert recognize_phi_image(w, w_inv) == PhiImage(a, m)


def test_phi_injective():
    for base in UNIT_BASES:
        seen = {}
        for a in units_of(base):
            for m in range(-3, 4):
                x = DetRingElement.det_power_of(base, 2, m, a)
                key = (x.numerator, x.det_power)
                assert key not in seen, (a, m, seen.get(key))
                seen[key] = (a, m)


def test_nonzerodivisor_examples():
    assert det_nonzerodivisor_probe(ZZ, 2, ["X11"])["counterexamples"] == []
    Z4 = BaseRing.parse("ZZ/4")
    assert det_nonzerodivisor_probe(Z4, 2, ["2"]) == {"base": "ZZ/4", "n": 2, "checked": 1, "counterexamples": []}
    assert det_nonzerodivisor_probe(NIL, 2, ["a"])["checked"] == 1
    assert (P("a", NIL) * P("det", NIL)).numerator.terms  # a*det has a nonzero coefficient


@pytest.mark.parametrize("text", ["ZZ", "ZZ/4", "ZZ/6", "GF(3)", "ZZ[a]/(a^2)", "ZZ/4[a]/(a^2)"])
def test_nonzerodivisor_probe_random(text):
    rep = det_nonzerodivisor_probe(BaseRing.parse(text), 2, samples=30, seed=1)
    assert rep["checked"] > 0 and rep["counterexamples"] == []


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_shifted_det_is_monic(n):
    deg, lead = shifted_det_leading(n)
    assert deg == n
    assert lead == GroupRingElement.one(ZZ, n * n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_det_multiplicative(n):
    assert det_is_multiplicative(n)


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_arithmetic_consistency(i, j):
    x, y = P(f"det^{i}"), P(f"det^{j}")
    assert x * y == P(f"det^{i + j}")
    assert (x + y) - y == x


def test_json_report():
    rep = units_report(NIL, 2, "det + a", "(det - a)*det^-2")
    assert rep["result"]["kind"] == "NotImage" and rep["base_is_reduced"] is False
    rep = units_report(BaseRing.parse("GF(11)"), 3, "7*det^3", "8*det^-3")
    assert rep["result"] == {"kind": "Image", "a": "7", "m": "3"}


def test_random_units_with_nilpotent_perturbation_rejected():
    rng = random.Random(0)
    for _ in range(10):
        k = rng.randint(1, 3)
        w = P(f"det^{k} + a*X12", NIL)
        w_inv = P(f"(det^{k} - a*X12)*det^{-2 * k}", NIL)
        assert (w * w_inv).is_one()
        assert isinstance(recognize_phi_image(w, w_inv), NotImage)
