"""The coordinate ring A[X_ij, 1/det] of GL_n over a base ring A.

Elements are stored as numerator / det^k with the numerator a polynomial in
the n^2 variables X11, X12, .., Xnn (a GroupRingElement with nonnegative
exponents).  Canonical form cancels powers of det from the numerator by
exact division; det has lex-leading term X11 X22 .. Xnn with coefficient 1,
so ordinary lex division decides divisibility over any base.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations

from .rings import BaseRing, GroupRingElement, GroupRingMatrix, parse_expression

MAX_N = 5


class SizeBoundExceeded(ValueError):
    pass


class NotAUnit(ValueError):
    pass


def variable_names(n: int) -> tuple[str, ...]:
    return tuple(f"X{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1))


def _check_n(n: int):
    if not 1 <= n <= MAX_N:
        raise SizeBoundExceeded(f"n must be between 1 and {MAX_N}, got {n}")


def _sign(perm) -> int:
    s, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            s = -s
    return s


@lru_cache(maxsize=None)
def _det_cached(n: int, base: BaseRing) -> GroupRingElement:
    terms = {}
    for perm in permutations(range(n)):
        e = [0] * (n * n)
        for i, j in enumerate(perm):
            e[i * n + j] = 1
        terms[tuple(e)] = base.from_int(_sign(perm))
    return GroupRingElement.from_dict(base, n * n, terms, variable_names(n))


def determinant_poly(n: int, base: BaseRing | None = None) -> GroupRingElement:
    """Leibniz expansion: n! signed products X_{1,s(1)} .. X_{n,s(n)}."""
    _check_n(n)
    return _det_cached(n, base or BaseRing.integers())


def variable_matrix(n: int, base: BaseRing | None = None) -> GroupRingMatrix:
    base = base or BaseRing.integers()
    names = variable_names(n)
    return GroupRingMatrix.from_rows(
        [[GroupRingElement.variable(base, n * n, i * n + j, 1, names) for j in range(n)] for i in range(n)]
    )


def cofactor_determinant(n: int, base: BaseRing | None = None) -> GroupRingElement:
    """Independent route: Laplace expansion of the generic matrix."""
    _check_n(n)
    return variable_matrix(n, base).det()


def substitute_scalar_matrix(f: GroupRingElement, n: int) -> GroupRingElement:
    """X_ii -> T, X_ij -> 0 (i != j).  Result is a Laurent polynomial in T."""
    if f.rank != n * n:
        raise ValueError(f"expected a polynomial in {n * n} variables")
    diag = [i * n + i for i in range(n)]

    def image(e):
        if any(x for k, x in enumerate(e) if k not in diag):
            return None
        return (sum(e[k] for k in diag),)

    return f.map_exponents(image, 1, ("T",))


def divide_exact(f: GroupRingElement, g: GroupRingElement) -> GroupRingElement | None:
    """f / g if g divides f, else None.  Needs the lex-leading coefficient of g to be a unit."""
    B = f.base
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    lead_e, lead_c = g.terms[-1]
    if not B.is_unit(lead_c):
        raise ValueError("leading coefficient of the divisor is not a unit")
    inv = B.inverse(lead_c)
    rem = dict(f.terms)
    quot: dict = {}
    while rem:
        e = max(rem)
        c = rem[e]
        shift = tuple(a - b for a, b in zip(e, lead_e))
        if any(x < 0 for x in shift):
            return None
        q = B.mul(c, inv)
        quot[shift] = q
        for ge, gc in g.terms:
            t = tuple(a + b for a, b in zip(ge, shift))
            v = B.sub(rem.get(t, B.zero()), B.mul(q, gc))
            if B.is_zero(v):
                rem.pop(t, None)
            else:
                rem[t] = v
    return GroupRingElement.from_dict(B, f.rank, quot, f.names)


@dataclass(frozen=True)
class DetRingElement:
    base: BaseRing
    n: int
    numerator: GroupRingElement
    det_power: int = 0

    def __post_init__(self):
        if self.det_power < 0:
            raise ValueError("det_power must be nonnegative")
        if self.numerator.rank != self.n * self.n:
            raise ValueError("numerator has the wrong number of variables")
        if any(x < 0 for e, _ in self.numerator.terms for x in e):
            raise ValueError("numerator must be a polynomial")

    @classmethod
    def make(cls, numerator: GroupRingElement, n: int, det_power: int = 0) -> "DetRingElement":
        """Canonical form: strip factors of det while det_power > 0."""
        det = determinant_poly(n, numerator.base)
        k = det_power
        while k > 0 and not numerator.is_zero():
            q = divide_exact(numerator, det)
            if q is None:
                break
            numerator, k = q, k - 1
        if numerator.is_zero():
            k = 0
        return cls(numerator.base, n, numerator, k)

    @classmethod
    def constant(cls, base: BaseRing, n: int, c) -> "DetRingElement":
        return cls.make(GroupRingElement.constant(base, n * n, c, variable_names(n)), n)

    @classmethod
    def det_power_of(cls, base: BaseRing, n: int, m: int, a=1) -> "DetRingElement":
        """a * det^m for any integer m."""
        num = determinant_poly(n, base) ** max(m, 0)
        if isinstance(a, int):
            a = base.from_int(a)
        num = num.scale(a)
        return cls.make(num, n, max(-m, 0))

    @classmethod
    def variable(cls, base: BaseRing, n: int, i: int, j: int) -> "DetRingElement":
        g = GroupRingElement.variable(base, n * n, (i - 1) * n + (j - 1), 1, variable_names(n))
        return cls(base, n, g, 0)

    def _lift(self, other) -> "DetRingElement":
        if isinstance(other, DetRingElement):
            if other.base != self.base or other.n != self.n:
                raise ValueError("elements of different determinant rings")
            return other
        return DetRingElement.constant(self.base, self.n, other)

    def __add__(self, other) -> "DetRingElement":
        o = self._lift(other)
        k = max(self.det_power, o.det_power)
        det = determinant_poly(self.n, self.base)
        a = self.numerator * det ** (k - self.det_power)
        b = o.numerator * det ** (k - o.det_power)
        return DetRingElement.make(a + b, self.n, k)

    __radd__ = __add__

    def __neg__(self) -> "DetRingElement":
        return DetRingElement(self.base, self.n, -self.numerator, self.det_power)

    def __sub__(self, other) -> "DetRingElement":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "DetRingElement":
        return self._lift(other) - self

    def __mul__(self, other) -> "DetRingElement":
        o = self._lift(other)
        return DetRingElement.make(self.numerator * o.numerator, self.n, self.det_power + o.det_power)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "DetRingElement":
        if k < 0:
            raise ValueError("negative powers need an explicit inverse")
        out = DetRingElement.constant(self.base, self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def is_one(self) -> bool:
        return self.det_power == 0 and self.numerator == GroupRingElement.one(self.base, self.n * self.n)

    def __str__(self) -> str:
        num = str(self.numerator)
        if self.det_power == 0:
            return num
        d = "det" if self.det_power == 1 else f"det^{self.det_power}"
        if len(self.numerator) > 1:
            num = f"({num})"
        return f"{num}/{d}"

    __repr__ = __str__

    @classmethod
    def parse(cls, text: str, base: BaseRing, n: int) -> "DetRingElement":
        """Expressions in X11..Xnn, ``det`` (any integer power) and the base variable."""
        _check_n(n)
        names = variable_names(n)
        index = {s: i for i, s in enumerate(names)}
        bvar = base.var if base.kind == "quotient" else None

        def atom(name, e):
            if name == "det":
                return cls.det_power_of(base, n, e)
            if e < 0:
                raise ValueError(f"negative power of {name}")
            if name in index:
                g = GroupRingElement.variable(base, n * n, index[name], e, names)
                return cls(base, n, g, 0)
            if name == bvar:
                return cls.constant(base, n, base.pow(base.generator(), e))
            raise ValueError(f"unknown symbol {name!r}")

        return parse_expression(text, atom, lambda c: cls.constant(base, n, c))


@dataclass(frozen=True)
class PhiImage:
    a: object
    m: int
    base: BaseRing = field(compare=False, default=None)

    def __str__(self):
        return f"Image({self.base.format(self.a) if self.base else self.a}, {self.m})"


@dataclass(frozen=True)
class NotImage:
    stage: str
    witness: str
    details: dict = field(default_factory=dict, compare=False)


def recognize_phi_image(w: DetRingElement, w_inv: DetRingElement) -> PhiImage | NotImage:
    """Decide whether the unit w equals a * det^m with a a unit of the base."""
    if not (w * w_inv).is_one():
        raise NotAUnit(f"({w}) * ({w_inv}) != 1")
    B, n = w.base, w.n
    f, k = w.numerator, w.det_power
    s = substitute_scalar_matrix(f, n)
    candidates = [(c, e[0] // n) for e, c in s.terms if e[0] % n == 0 and B.is_unit(c)]
    details = {"scalar_substitution": str(s), "candidates": [(B.format(c), d - k) for c, d in candidates]}
    if not candidates:
        return NotImage("scalar substitution", "no term a*T^(n*k) with a a unit", details)
    det = determinant_poly(n, B)
    for c, d in candidates:
        if f == (det ** d).scale(c):
            return PhiImage(c, d - k, B)
    return NotImage("exact comparison", "no exact match at any k", details)


def det_nonzerodivisor_probe(base: BaseRing, n: int, samples=20, seed: int = 0) -> dict:
    """Check det * f != 0 for sampled nonzero polynomials f."""
    _check_n(n)
    det = determinant_poly(n, base)
    if isinstance(samples, int):
        samples = _random_polys(base, n, samples, seed)
    checked, bad = 0, []
    for f in samples:
        if isinstance(f, str):
            f = DetRingElement.parse(f, base, n).numerator
        if f.is_zero():
            continue
        checked += 1
        if (det * f).is_zero():
            bad.append(str(f))
    return {"base": str(base), "n": n, "checked": checked, "counterexamples": bad}


def _random_polys(base: BaseRing, n: int, count: int, seed: int) -> list[GroupRingElement]:
    rng = random.Random(seed)
    names = variable_names(n)
    try:
        coeffs = list(base.elements())
    except ValueError:  # infinite base: small combinations of 1 and the generator
        gen = base.generator() if base.kind == "quotient" else base.zero()
        coeffs = [base.add(base.from_int(i), base.mul(base.from_int(j), gen))
                  for i in range(-3, 4) for j in range(-2, 3)]
    out = []
    for _ in range(count):
        terms = {}
        for _ in range(rng.randint(1, 4)):
            e = tuple(rng.randint(0, 2) if rng.random() < 0.3 else 0 for _ in range(n * n))
            terms[e] = rng.choice(coeffs)
        out.append(GroupRingElement.from_dict(base, n * n, terms, names))
    return out


def shifted_det_leading(n: int, base: BaseRing | None = None) -> tuple[int, GroupRingElement]:
    """After X_ii -> X_ii + X_11 (i >= 2), det as a polynomial in X_11:
    returns (degree, leading coefficient)."""
    _check_n(n)
    base = base or BaseRing.integers()
    X = variable_matrix(n, base)
    x11 = X[0, 0]
    rows = [[X[i, j] + x11 if i == j and i > 0 else X[i, j] for j in range(n)] for i in range(n)]
    d = GroupRingMatrix.from_rows(rows).det()
    deg = max(e[0] for e, _ in d.terms)
    lead = {(0,) + e[1:]: c for e, c in d.terms if e[0] == deg}
    return deg, GroupRingElement.from_dict(base, n * n, lead, variable_names(n))


def det_is_multiplicative(n: int, base: BaseRing | None = None) -> bool:
    """det(XY) = det(X) det(Y) for two generic n x n matrices."""
    _check_n(n)
    base = base or BaseRing.integers()
    g = 2 * n * n
    X = [[GroupRingElement.variable(base, g, i * n + j) for j in range(n)] for i in range(n)]
    Y = [[GroupRingElement.variable(base, g, n * n + i * n + j) for j in range(n)] for i in range(n)]
    mX, mY = GroupRingMatrix.from_rows(X), GroupRingMatrix.from_rows(Y)
    return (mX @ mY).det() == mX.det() * mY.det()


def units_report(base: BaseRing, n: int, w_text: str, w_inv_text: str) -> dict:
    w = DetRingElement.parse(w_text, base, n)
    w_inv = DetRingElement.parse(w_inv_text, base, n)
    out = {"base": str(base), "n": n, "w": str(w), "w_inv": str(w_inv),
           "base_is_reduced": base.is_reduced}
    res = recognize_phi_image(w, w_inv)
    if isinstance(res, PhiImage):
        out["result"] = {"kind": "Image", "a": base.format(res.a), "m": str(res.m)}
    else:
        out["result"] = {"kind": "NotImage", "stage": res.stage, "witness": res.witness,
                         "details": {"scalar_substitution": res.details["scalar_substitution"],
                                     "candidates": [[a, str(m)] for a, m in res.details["candidates"]]}}
    return out
