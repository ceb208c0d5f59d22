"""Elliptic curves y^2 = x^3 + a x + b over F_p (p >= 5) or Q.

For an elliptic curve E over a field k, Pic^0 of E at k-points is E(k), so
the torsion of Pic^0 is the torsion of the Mordell-Weil group.  Over F_p the
whole group is finite (points are enumerated); over Q the torsion subgroup
is found by Nagell-Lutz: torsion points are integral with y = 0 or
y^2 | 4a^3 + 27b^2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Iterator

from sympy import factorint, isprime

from .linalg import FgAbGroup

MAX_P = 10_000
MAX_COEFF = 10**6


class SingularCurve(ValueError):
    pass


@dataclass(frozen=True)
class CurvePoint:
    x: object = None
    y: object = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __str__(self) -> str:
        return "O" if self.is_infinity else f"({self.x}, {self.y})"

    def to_json(self):
        return "O" if self.is_infinity else [str(self.x), str(self.y)]


INFINITY = CurvePoint()


@dataclass(frozen=True)
class EllipticCurve:
    """``field`` is a prime p >= 5, or 0 for the rationals."""

    field: int
    a: int
    b: int

    def __post_init__(self):
        if self.field:
            if self.field < 5 or not isprime(self.field):
                raise ValueError("the field must be Q or F_p with p >= 5 prime")
            object.__setattr__(self, "a", self.a % self.field)
            object.__setattr__(self, "b", self.b % self.field)
        if self._reduce(4 * self.a**3 + 27 * self.b**2) == 0:
            raise SingularCurve(f"4a^3 + 27b^2 = 0 for {self}")

    @classmethod
    def over_rationals(cls, a: int, b: int) -> "EllipticCurve":
        return cls(0, a, b)

    @property
    def is_finite_field(self) -> bool:
        return self.field != 0

    @property
    def discriminant_term(self) -> int:
        """4a^3 + 27b^2 (the discriminant is -16 times this)."""
        return 4 * self.a**3 + 27 * self.b**2

    def __str__(self) -> str:
        k = f"F_{self.field}" if self.field else "Q"
        rhs = "x^3"
        for c, mono in ((self.a, "x"), (self.b, "")):
            if c:
                mag = "" if abs(c) == 1 and mono else str(abs(c))
                rhs += f" {'-' if c < 0 else '+'} {mag}{mono}"
        return f"y^2 = {rhs} over {k}"

    # -- field arithmetic ----------------------------------------------------
    def _reduce(self, v):
        return v % self.field if self.field else v

    def _div(self, u, v):
        if self.field:
            return u * pow(v, -1, self.field) % self.field
        return Fraction(u) / v

    def point(self, x, y) -> CurvePoint:
        if not self.field:
            x, y = Fraction(x), Fraction(y)
        else:
            x, y = x % self.field, y % self.field
        P = CurvePoint(x, y)
        if not self.contains(P):
            raise ValueError(f"{P} is not on {self}")
        return P

    def contains(self, P: CurvePoint) -> bool:
        if P.is_infinity:
            return True
        return self._reduce(P.y**2 - (P.x**3 + self.a * P.x + self.b)) == 0

    # -- group law -------------------------------------------------------------
    def neg(self, P: CurvePoint) -> CurvePoint:
        if P.is_infinity:
            return P
        return CurvePoint(P.x, self._reduce(-P.y))

    def add(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        if P.x == Q.x and self._reduce(P.y + Q.y) == 0:
            return INFINITY
        if P == Q:
            lam = self._div(3 * P.x**2 + self.a, 2 * P.y)
        else:
            lam = self._div(Q.y - P.y, Q.x - P.x)
        x = self._reduce(lam**2 - P.x - Q.x)
        y = self._reduce(lam * (P.x - x) - P.y)
        return CurvePoint(x, y)

    def mul(self, k: int, P: CurvePoint) -> CurvePoint:
        if k < 0:
            return self.mul(-k, self.neg(P))
        out, base = INFINITY, P
        while k:
            if k & 1:
                out = self.add(out, base)
            base = self.add(base, base)
            k >>= 1
        return out


# ---------------------------------------------------------------------------
# Finite fields
# ---------------------------------------------------------------------------

def _require_finite(E: EllipticCurve):
    if not E.is_finite_field:
        raise ValueError("needs a curve over a finite field")
    if E.field > MAX_P:
        raise ValueError(f"p = {E.field} exceeds the enumeration bound {MAX_P}")


def enumerate_points(E: EllipticCurve) -> list[CurvePoint]:
    _require_finite(E)
    p = E.field
    roots: dict[int, list[int]] = {}
    for y in range(p):
        roots.setdefault(y * y % p, []).append(y)
    pts = [INFINITY]
    for x in range(p):
        rhs = (x**3 + E.a * x + E.b) % p
        for y in roots.get(rhs, []):
            pts.append(CurvePoint(x, y))
    N = len(pts)
    # Hasse: (N - p - 1)^2 <= 4p
    assert (N - p - 1) ** 2 <= 4 * p, f"Hasse bound violated: N = {N}, p = {p}"
    return pts


def point_order(E: EllipticCurve, P: CurvePoint, multiple: int) -> int:
    """Order of P given some ``multiple`` of it that kills P."""
    if not E.mul(multiple, P).is_infinity:
        raise ValueError(f"{multiple} does not kill {P}")
    order = multiple
    for q in factorint(multiple):
        while order % q == 0 and E.mul(order // q, P).is_infinity:
            order //= q
    return order


@dataclass(frozen=True)
class GroupStructure:
    group: FgAbGroup
    order: int
    d1: int
    d2: int
    generator_big: CurvePoint  # order d2
    generator_small: CurvePoint  # order d1, independent of generator_big


def _independent_point(E: EllipticCurve, pts, span: set, d1: int) -> CurvePoint | None:
    """A point Q with d1 Q = O and jQ outside ``span`` for 0 < j < d1."""
    if d1 == 1:
        return INFINITY
    for cand in pts:
        if not E.mul(d1, cand).is_infinity:
            continue
        R, ok = cand, True
        for _ in range(1, d1):
            if R in span:
                ok = False
                break
            R = E.add(R, cand)
        if ok:
            return cand
    return None


def group_structure_certified(E: EllipticCurve) -> GroupStructure:
    """E(F_p) = Z/d1 + Z/d2 with d1 | d2, certified by generators.

    Points are scanned for one of large order m; once N/m divides m and a
    point Q of order N/m meets <P> trivially, <P> + <Q> has N elements.
    """
    pts = enumerate_points(E)
    N = len(pts)
    best, m = INFINITY, 1
    for cand in pts:
        k = point_order(E, cand, N)
        if k <= m:
            continue
        best, m = cand, k
        d1 = N // m
        if m % d1:
            continue
        span, R = set(), INFINITY
        for _ in range(m):
            span.add(R)
            R = E.add(R, best)
        Q = _independent_point(E, pts, span, d1)
        if Q is not None:
            assert (E.field - 1) % d1 == 0, "d1 must divide p - 1"
            return GroupStructure(FgAbGroup.from_cyclic_orders([d1, m]), N, d1, m, best, Q)
    raise AssertionError(f"could not certify the group structure of {E}")


def group_structure(E: EllipticCurve) -> FgAbGroup:
    return group_structure_certified(E).group


# ---------------------------------------------------------------------------
# Rationals
# ---------------------------------------------------------------------------

def _square_divisors(D: int) -> Iterator[int]:
    """Positive y with y^2 | D (D != 0)."""
    fac = factorint(abs(D))
    ys = [1]
    for q, e in fac.items():
        ys = [y * q**k for y in ys for k in range(e // 2 + 1)]
    return iter(sorted(ys))


def _integer_roots_cubic(a: int, c: int) -> list[int]:
    """Integer roots of x^3 + a x + c."""
    f = lambda x: x**3 + a * x + c  # noqa: E731
    # f is increasing outside [-k, k]
    k = isqrt(max(0, -a) // 3) + 2
    roots = [x for x in range(-k, k + 1) if f(x) == 0]
    bound = 1 + max(abs(a), abs(c))
    for lo, hi in ((-bound, -k - 1), (k + 1, bound)):
        if lo > hi or f(lo) > 0 or f(hi) < 0:
            continue
        while lo < hi:
            mid = (lo + hi) // 2
            if f(mid) < 0:
                lo = mid + 1
            else:
                hi = mid
        if f(lo) == 0:
            roots.append(lo)
    return sorted(set(roots))


def nagell_lutz_candidates(E: EllipticCurve) -> list[CurvePoint]:
    if E.is_finite_field:
        raise ValueError("needs a curve over Q")
    if abs(E.a) > MAX_COEFF or abs(E.b) > MAX_COEFF:
        raise ValueError(f"coefficients must be at most {MAX_COEFF} in absolute value")
    D = E.discriminant_term
    out = []
    for y in [0] + list(_square_divisors(D)):
        for x in _integer_roots_cubic(E.a, E.b - y * y):
            out.append(E.point(x, y))
            if y:
                out.append(E.point(x, -y))
    return out


@dataclass(frozen=True)
class TorsionResult:
    group: FgAbGroup
    points: dict  # CurvePoint -> order
    rejected: dict = field(default_factory=dict)  # candidate -> first multiple leaving the candidate set


def rational_torsion_certified(E: EllipticCurve) -> TorsionResult:
    cands = nagell_lutz_candidates(E)
    allowed = set(cands) | {INFINITY}
    torsion, rejected = {INFINITY: 1}, {}
    for P in cands:
        R, k = P, 1
        while not R.is_infinity:
            if R not in allowed:
                rejected[P] = (k, R)
                break
            R, k = E.add(R, P), k + 1
            if k > len(allowed):
                raise AssertionError(f"multiples of {P} cycle without reaching O")
        else:
            torsion[P] = k
    N = len(torsion)
    d2 = max(torsion.values())
    d1 = N // d2
    assert d1 * d2 == N and d2 % d1 == 0
    # closure under addition
    for P in torsion:
        for Q in torsion:
            assert E.add(P, Q) in torsion
    return TorsionResult(FgAbGroup.from_cyclic_orders([d1, d2]), torsion, rejected)


def rational_torsion(E: EllipticCurve) -> FgAbGroup:
    return rational_torsion_certified(E).group


# ---------------------------------------------------------------------------
# Verdict for the classifying stack of E
# ---------------------------------------------------------------------------

BR_EQUALS = "BrEqualsBrPrime"
BR_NOT_EQUAL = "BrNotEqual"

PIC0_IS_POINTS = "Pic^0 of an elliptic curve at k-points is E(k)"
BA_CRITERION = "Br = Br' for BA over a field k iff Pic^0_{A/k}(k) is torsion-free"
BA_DECOMPOSITION = "Br'(BA) = Br(k) + torsion of Pic^0_{A/k}(k), with Br(k) pulled back from the base"


@dataclass(frozen=True)
class BAVerdict:
    conclusion: str
    torsion: FgAbGroup
    trace: list


def pic0_torsion(E: EllipticCurve) -> FgAbGroup:
    return group_structure(E) if E.is_finite_field else rational_torsion(E)


def verdict_BA(E: EllipticCurve) -> BAVerdict:
    T = pic0_torsion(E)
    conclusion = BR_EQUALS if T.is_trivial else BR_NOT_EQUAL
    trace = [
        {"step": "identify", "statement": PIC0_IS_POINTS, "curve": str(E)},
        {
            "step": "torsion",
            "method": "point enumeration" if E.is_finite_field else "Nagell-Lutz",
            "torsion": str(T),
        },
        {"step": "criterion", "statement": BA_CRITERION, "conclusion": conclusion},
    ]
    return BAVerdict(conclusion, T, trace)


def curve_report(E: EllipticCurve) -> dict:
    v = verdict_BA(E)
    out = {"curve": str(E), "field": str(E.field) if E.field else "Q",
           "a": str(E.a), "b": str(E.b), "verdict": v.conclusion, "trace": v.trace}
    if E.is_finite_field:
        s = group_structure_certified(E)
        out["group"] = {"order": str(s.order), "d1": str(s.d1), "d2": str(s.d2),
                        "structure": str(s.group),
                        "generator_of_order_d2": s.generator_big.to_json(),
                        "generator_of_order_d1": s.generator_small.to_json(),
                        "hasse_bound_ok": (s.order - E.field - 1) ** 2 <= 4 * E.field}
    else:
        t = rational_torsion_certified(E)
        out["torsion"] = {
            "structure": str(t.group),
            "points": [{"point": P.to_json(), "order": str(k)} for P, k in sorted(
                t.points.items(), key=lambda kv: (kv[1], str(kv[0])))],
            "rejected_candidates": [
                {"point": P.to_json(), "multiple": str(k), "leaves_candidates_at": R.to_json()}
                for P, (k, R) in sorted(t.rejected.items(), key=lambda kv: str(kv[0]))
            ],
        }
    return out
