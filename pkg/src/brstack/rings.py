"""Group rings A[Z^r] (Laurent polynomials) over a closed family of base rings.

The base family is small on purpose: Z, Z/m, F_p, and univariate quotients
B[a]/(f) of those with f having a unit leading coefficient.  Every member has
decidable equality, zero test and unit test, which is all the unit
recognition below needs.  ``ZZ[a]/(a^2)`` is the standard ring with a
nonzero nilpotent.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Callable, Iterable, Sequence

from sympy import Poly, factorint, isprime, symbols
from sympy import GF as _sympy_GF


class BaseRingMismatch(ValueError):
    pass


class UnsupportedBase(ValueError):
    """The base ring is not certified to be an integral domain."""


# ---------------------------------------------------------------------------
# Base rings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BaseRing:
    """One member of the supported family.

    ``kind`` is one of ``"ZZ"``, ``"mod"``, ``"GF"``, ``"quotient"``.
    Elements are ints for the first three kinds and tuples of ``base``
    elements (coefficients of 1, a, a^2, ...) for quotients.
    """

    kind: str
    m: int = 0
    base: "BaseRing | None" = None
    modulus: tuple = ()
    var: str = "a"

    def __post_init__(self):
        if self.kind == "mod" and self.m < 2:
            raise ValueError("Z/m needs m >= 2")
        if self.kind == "GF" and not isprime(self.m):
            raise ValueError(f"GF({self.m}): {self.m} is not prime")
        if self.kind == "quotient":
            if self.base is None or self.base.kind == "quotient":
                raise ValueError("quotients are only supported over ZZ, ZZ/m or GF(p)")
            mod = tuple(self.base.normalize(c) for c in self.modulus)
            while mod and self.base.is_zero(mod[-1]):
                mod = mod[:-1]
            if len(mod) < 2:
                raise ValueError("modulus must have degree >= 1")
            if not self.base.is_unit(mod[-1]):
                raise ValueError("modulus must have a unit leading coefficient")
            object.__setattr__(self, "modulus", mod)
        elif self.kind not in ("ZZ", "mod", "GF"):
            raise ValueError(f"unknown base ring kind {self.kind!r}")

    # constructors --------------------------------------------------------
    @classmethod
    def integers(cls) -> "BaseRing":
        return cls("ZZ")

    @classmethod
    def integers_mod(cls, m: int) -> "BaseRing":
        return cls("mod", m)

    @classmethod
    def prime_field(cls, p: int) -> "BaseRing":
        return cls("GF", p)

    @classmethod
    def quotient(cls, base: "BaseRing", modulus: Sequence, var: str = "a") -> "BaseRing":
        return cls("quotient", 0, base, tuple(modulus), var)

    @classmethod
    def parse(cls, text: str) -> "BaseRing":
        """Read ``ZZ``, ``ZZ/6``, ``GF(5)``, ``ZZ[a]/(a^2)``, ``GF(7)[a]/(a^2+1)``."""
        text = text.replace(" ", "")
        mq = re.fullmatch(r"(.+)\[([a-z])\]/\((.+)\)", text)
        if mq:
            base = cls.parse(mq.group(1))
            var = mq.group(2)
            if var.startswith("t"):
                raise ValueError("quotient variable may not start with 't'")
            coeffs = _parse_univariate(mq.group(3), var)
            return cls.quotient(base, [base.from_int(c) for c in coeffs], var)
        if text in ("ZZ", "Z"):
            return cls.integers()
        m = re.fullmatch(r"ZZ?/(\d+)", text)
        if m:
            return cls.integers_mod(int(m.group(1)))
        m = re.fullmatch(r"(?:GF|F)\((\d+)\)", text)
        if m:
            return cls.prime_field(int(m.group(1)))
        raise ValueError(f"unrecognized base ring {text!r}")

    def __str__(self) -> str:
        if self.kind == "ZZ":
            return "ZZ"
        if self.kind == "mod":
            return f"ZZ/{self.m}"
        if self.kind == "GF":
            return f"GF({self.m})"
        mod = _format_univariate([self.base.to_int_repr(c) for c in self.modulus], self.var)
        return f"{self.base}[{self.var}]/({mod})"

    # arithmetic ----------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.modulus) - 1

    def zero(self):
        return 0 if self.kind != "quotient" else (self.base.zero(),) * self.degree

    def one(self):
        return self.from_int(1)

    def from_int(self, n: int):
        if self.kind == "ZZ":
            return n
        if self.kind in ("mod", "GF"):
            return n % self.m
        return (self.base.from_int(n),) + (self.base.zero(),) * (self.degree - 1)

    def generator(self):
        """The adjoined variable of a quotient ring."""
        if self.kind != "quotient":
            raise ValueError(f"{self} has no adjoined variable")
        return self.reduce([self.base.zero(), self.base.one()])

    def normalize(self, x):
        if self.kind == "ZZ":
            return int(x)
        if self.kind in ("mod", "GF"):
            return int(x) % self.m
        return self.reduce(list(x))

    def reduce(self, coeffs: list):
        """Reduce a coefficient list (low degree first) modulo the modulus."""
        B, d, f = self.base, self.degree, self.modulus
        c = [B.normalize(x) for x in coeffs]
        lc_inv = B.inverse(f[-1])
        for k in range(len(c) - 1, d - 1, -1):
            q = B.mul(c[k], lc_inv)
            if B.is_zero(q):
                continue
            for i in range(d + 1):
                c[k - d + i] = B.sub(c[k - d + i], B.mul(q, f[i]))
        c = c[:d] + [B.zero()] * (d - len(c))
        return tuple(c)

    def add(self, x, y):
        if self.kind == "ZZ":
            return x + y
        if self.kind in ("mod", "GF"):
            return (x + y) % self.m
        return tuple(self.base.add(a, b) for a, b in zip(x, y))

    def neg(self, x):
        if self.kind == "ZZ":
            return -x
        if self.kind in ("mod", "GF"):
            return (-x) % self.m
        return tuple(self.base.neg(a) for a in x)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        if self.kind == "ZZ":
            return x * y
        if self.kind in ("mod", "GF"):
            return (x * y) % self.m
        B = self.base
        out = [B.zero()] * (2 * self.degree - 1)
        for i, a in enumerate(x):
            if B.is_zero(a):
                continue
            for j, b in enumerate(y):
                out[i + j] = B.add(out[i + j], B.mul(a, b))
        return self.reduce(out)

    def pow(self, x, k: int):
        if k < 0:
            return self.pow(self.inverse(x), -k)
        out, base = self.one(), x
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def is_zero(self, x) -> bool:
        if self.kind == "quotient":
            return all(self.base.is_zero(a) for a in x)
        return x == 0

    def _mult_matrix(self, x) -> list[list]:
        # column j = x * a^j in the basis 1, a, ..., a^(d-1)
        d = self.degree
        cols = []
        for j in range(d):
            basis = [self.base.zero()] * d
            basis[j] = self.base.one()
            cols.append(self.mul(x, tuple(basis)))
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    def is_unit(self, x) -> bool:
        if self.kind == "ZZ":
            return x in (1, -1)
        if self.kind in ("mod", "GF"):
            return gcd(x, self.m) == 1
        # multiplication by x is invertible iff its determinant is a base unit
        return self.base.is_unit(_det(self.base, self._mult_matrix(x)))

    def inverse(self, x):
        if not self.is_unit(x):
            raise ZeroDivisionError(f"{self.format(x)} is not a unit of {self}")
        if self.kind == "ZZ":
            return x
        if self.kind in ("mod", "GF"):
            return pow(x, -1, self.m)
        B, d = self.base, self.degree
        A = self._mult_matrix(x)
        det_inv = B.inverse(_det(B, A))
        # x^{-1} = column 0 of A^{-1} = det^{-1} * adj(A)[:, 0]
        sol = []
        for i in range(d):
            minor = [[A[r][c] for c in range(d) if c != i] for r in range(d) if r != 0]
            cof = _det(B, minor)
            if i % 2:
                cof = B.neg(cof)
            sol.append(B.mul(det_inv, cof))
        return tuple(sol)

    # properties ----------------------------------------------------------
    @cached_property
    def is_integral_domain(self) -> bool:
        """Certified integral-domain test (False means 'not certified')."""
        if self.kind in ("ZZ", "GF"):
            return True
        if self.kind == "mod":
            return isprime(self.m)
        if self.base.kind == "ZZ" or (self.base.kind in ("mod", "GF") and isprime(self.base.m)):
            a = symbols("a")
            coeffs = [self.base.to_int_repr(c) for c in reversed(self.modulus)]
            if self.base.kind == "ZZ":
                poly = Poly(coeffs, a)
                # monic (up to sign) and irreducible over Z gives a domain
                return poly.is_irreducible
            poly = Poly(coeffs, a, domain=_sympy_GF(self.base.m))
            return poly.is_irreducible
        return False

    @cached_property
    def is_reduced(self) -> bool:
        """No nonzero nilpotents."""
        if self.is_integral_domain:
            return True
        if self.kind == "mod":
            return all(e == 1 for e in factorint(self.m).values())
        a = symbols("a")
        coeffs = [self.base.to_int_repr(c) for c in reversed(self.modulus)]
        if self.base.kind == "ZZ":
            return Poly(coeffs, a).is_sqf
        if self.base.kind == "GF" or isprime(self.base.m):
            return Poly(coeffs, a, domain=_sympy_GF(self.base.m)).is_sqf
        # finite non-field coefficients: search for a nilpotent
        elems = list(self.elements())
        for x in elems:
            if self.is_zero(x):
                continue
            y = x
            for _ in range(len(elems)):
                y = self.mul(y, x)
                if self.is_zero(y):
                    return False
        return True

    def to_int_repr(self, x):
        """Integer (or nested list) representation for serialization."""
        if self.kind == "mod" or self.kind == "GF":
            return int(x)
        if self.kind == "ZZ":
            return int(x)
        return [self.base.to_int_repr(c) for c in x]

    def format(self, x) -> str:
        if self.kind == "ZZ":
            return str(x)
        if self.kind in ("mod", "GF"):
            return str(x)
        return _format_univariate([self.base.to_int_repr(c) for c in x], self.var)

    def is_compound(self, x) -> bool:
        """Whether ``format(x)`` needs parentheses inside a product."""
        if self.kind != "quotient":
            return False
        return sum(1 for c in x if not self.base.is_zero(c)) > 1

    def elements(self) -> Iterable:
        """All elements of a finite base ring."""
        if self.kind in ("mod", "GF"):
            return range(self.m)
        if self.kind == "quotient" and self.base.kind != "ZZ":
            from itertools import product

            return (tuple(t) for t in product(range(self.base.m), repeat=self.degree))
        raise ValueError(f"{self} is infinite")


def _det(B: BaseRing, A: list[list]):
    """Division-free determinant by cofactor expansion (small sizes only)."""
    n = len(A)
    if n == 0:
        return B.one()
    if n == 1:
        return A[0][0]
    out = B.zero()
    for j in range(n):
        if B.is_zero(A[0][j]):
            continue
        minor = [row[:j] + row[j + 1:] for row in A[1:]]
        term = B.mul(A[0][j], _det(B, minor))
        out = B.sub(out, term) if j % 2 else B.add(out, term)
    return out


def _format_univariate(coeffs: Sequence, var: str) -> str:
    """Format integer coefficients (low degree first) as e.g. ``a^2 - 2*a + 1``."""
    pieces = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if not mono:
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}"
        pieces.append(("-" if c < 0 else "+", body))
    if not pieces:
        return "0"
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def _parse_univariate(text: str, var: str) -> list[int]:
    def atom(name, e):
        if name != var or e < 0:
            raise ValueError(f"unexpected symbol {name}^{e} in modulus")
        out = [0] * (e + 1)
        out[e] = 1
        return _UPoly(out)

    return parse_expression(text, atom, lambda n: _UPoly([n])).c


class _UPoly:
    # throwaway integer polynomial for parsing moduli
    def __init__(self, c):
        self.c = list(c)

    def __add__(self, o):
        n = max(len(self.c), len(o.c))
        return _UPoly([(self.c[i] if i < len(self.c) else 0) + (o.c[i] if i < len(o.c) else 0) for i in range(n)])

    def __neg__(self):
        return _UPoly([-x for x in self.c])

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        out = [0] * (len(self.c) + len(o.c) - 1)
        for i, a in enumerate(self.c):
            for j, b in enumerate(o.c):
                out[i + j] += a * b
        return _UPoly(out)

    def __pow__(self, k):
        out = _UPoly([1])
        for _ in range(k):
            out = out * self
        return out


# ---------------------------------------------------------------------------
# Expression parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\^-?\d+)|([-+*()]))")


def parse_expression(text: str, atom: Callable[[str, int], object], const: Callable[[int], object]):
    """Recursive-descent parser for sums of products.

    Grammar: ``expr := ['-'] term (('+'|'-') term)*``, ``term := factor ('*' factor)*``,
    ``factor := (INT | NAME | '(' expr ')') ['^' INT]``.  ``atom(name, exp)``
    builds a power of a named symbol (negative exponents are the callback's
    business); powers of parenthesized groups must be nonnegative.
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {text!r} at position {pos}")
        tokens.append(next(g for g in m.groups() if g is not None))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    if not tokens:
        raise ValueError("empty expression")
    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else None

    def take():
        nonlocal i
        i += 1
        return tokens[i - 1]

    def exponent():
        tok = peek()
        if tok is not None and tok.startswith("^"):
            take()
            return int(tok[1:])
        return None

    def factor():
        tok = take() if peek() is not None else None
        if tok is None:
            raise ValueError("unexpected end of expression")
        if tok == "(":
            val = expr()
            if peek() != ")":
                raise ValueError("unbalanced parentheses")
            take()
            e = exponent()
            if e is not None:
                if e < 0:
                    raise ValueError("negative power of a parenthesized expression")
                val = val ** e
            return val
        if tok.isdigit():
            val = const(int(tok))
            e = exponent()
            return val ** e if e is not None else val
        if re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", tok):
            e = exponent()
            return atom(tok, 1 if e is None else e)
        raise ValueError(f"unexpected token {tok!r}")

    def term():
        val = factor()
        while peek() == "*":
            take()
            val = val * factor()
        return val

    def expr():
        neg = False
        if peek() in ("-", "+"):
            neg = take() == "-"
        val = term()
        if neg:
            val = -val
        while peek() in ("+", "-"):
            op = take()
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    out = expr()
    if i != len(tokens):
        raise ValueError(f"trailing input in {text!r}")
    return out


# ---------------------------------------------------------------------------
# Group ring elements
# ---------------------------------------------------------------------------

Exponent = tuple  # tuple[int, ...]


@dataclass(frozen=True)
class GroupRingElement:
    """Finitely supported map Z^rank -> base, stored sorted by exponent.

    Zero coefficients are never stored.  ``names`` only affects printing.
    """

    base: BaseRing
    rank: int
    terms: tuple  # tuple[tuple[Exponent, coeff], ...]
    names: tuple | None = field(default=None, compare=False, repr=False)

    @classmethod
    def from_dict(cls, base: BaseRing, rank: int, terms: dict, names=None) -> "GroupRingElement":
        clean = []
        for e, c in terms.items():
            e = tuple(int(x) for x in e)
            if len(e) != rank:
                raise ValueError(f"exponent {e} has length {len(e)}, expected {rank}")
            c = base.normalize(c)
            if not base.is_zero(c):
                clean.append((e, c))
        clean.sort()
        return cls(base, rank, tuple(clean), names)

    @classmethod
    def zero(cls, base: BaseRing, rank: int, names=None) -> "GroupRingElement":
        return cls(base, rank, (), names)

    @classmethod
    def constant(cls, base: BaseRing, rank: int, c, names=None) -> "GroupRingElement":
        if isinstance(c, int):
            c = base.from_int(c)
        return cls.from_dict(base, rank, {(0,) * rank: c}, names)

    @classmethod
    def one(cls, base: BaseRing, rank: int, names=None) -> "GroupRingElement":
        return cls.constant(base, rank, 1, names)

    @classmethod
    def monomial(cls, base: BaseRing, exponent: Sequence[int], c=1, names=None) -> "GroupRingElement":
        if isinstance(c, int):
            c = base.from_int(c)
        return cls.from_dict(base, len(exponent), {tuple(exponent): c}, names)

    @classmethod
    def variable(cls, base: BaseRing, rank: int, i: int, power: int = 1, names=None) -> "GroupRingElement":
        e = [0] * rank
        e[i] = power
        return cls.monomial(base, e, 1, names)

    # -- basic queries -----------------------------------------------------
    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __len__(self) -> int:
        return len(self.terms)

    def coefficient(self, exponent: Sequence[int]):
        return self.as_dict().get(tuple(exponent), self.base.zero())

    def _check(self, other: "GroupRingElement"):
        if not isinstance(other, GroupRingElement):
            raise TypeError(f"cannot combine with {type(other).__name__}")
        if self.base != other.base:
            raise BaseRingMismatch(f"{self.base} vs {other.base}")
        if self.rank != other.rank:
            raise BaseRingMismatch(f"lattice rank {self.rank} vs {other.rank}")

    def _lift(self, other) -> "GroupRingElement":
        if isinstance(other, int):
            return GroupRingElement.constant(self.base, self.rank, other, self.names)
        return other

    # -- ring operations ---------------------------------------------------
    def __add__(self, other) -> "GroupRingElement":
        other = self._lift(other)
        self._check(other)
        B = self.base
        out = self.as_dict()
        for e, c in other.terms:
            out[e] = B.add(out[e], c) if e in out else c
        return GroupRingElement.from_dict(B, self.rank, out, self.names or other.names)

    __radd__ = __add__

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement(self.base, self.rank, tuple((e, self.base.neg(c)) for e, c in self.terms), self.names)

    def __sub__(self, other) -> "GroupRingElement":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "GroupRingElement":
        return self._lift(other) - self

    def __mul__(self, other) -> "GroupRingElement":
        other = self._lift(other)
        self._check(other)
        B = self.base
        out: dict = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                p = B.mul(c1, c2)
                out[e] = B.add(out[e], p) if e in out else p
        return GroupRingElement.from_dict(B, self.rank, out, self.names or other.names)

    __rmul__ = __mul__

    def scale(self, c) -> "GroupRingElement":
        if isinstance(c, int):
            c = self.base.from_int(c)
        B = self.base
        return GroupRingElement.from_dict(B, self.rank, {e: B.mul(c, x) for e, x in self.terms}, self.names)

    def __pow__(self, k: int) -> "GroupRingElement":
        if k < 0:
            return self.inverse() ** (-k)
        out = GroupRingElement.one(self.base, self.rank, self.names)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> "GroupRingElement":
        """Inverse of a unit monomial ``u t^m``; other units are not handled."""
        if not self.is_monomial() or not self.base.is_unit(self.terms[0][1]):
            raise ZeroDivisionError(f"{self} is not a monomial with unit coefficient")
        e, c = self.terms[0]
        return GroupRingElement.monomial(self.base, [-x for x in e], self.base.inverse(c), self.names)

    def map_exponents(self, f: Callable[[Exponent], Exponent | None], rank: int, names=None) -> "GroupRingElement":
        """Push forward along a map of exponent lattices (``None`` drops the term)."""
        B = self.base
        out: dict = {}
        for e, c in self.terms:
            e2 = f(e)
            if e2 is None:
                continue
            e2 = tuple(e2)
            out[e2] = B.add(out[e2], c) if e2 in out else c
        return GroupRingElement.from_dict(B, rank, out, names)

    def total_degrees(self) -> set:
        return {sum(e) for e, _ in self.terms}

    # -- text --------------------------------------------------------------
    def variable_names(self) -> tuple:
        return self.names or tuple(f"t{i + 1}" for i in range(self.rank))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        B = self.base
        names = self.variable_names()
        pieces = []
        for e, c in reversed(self.terms):
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k != 0
            )
            cs = B.format(c)
            neg = cs.startswith("-") and not B.is_compound(c)
            if neg:
                cs = cs[1:]
            if B.is_compound(c) and (mono or len(self.terms) > 1):
                cs = f"({cs})"
            if not mono:
                body = cs
            elif cs == "1":
                body = mono
            else:
                body = f"{cs}*{mono}"
            pieces.append(("-" if neg else "+", body))
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    __repr__ = __str__

    @classmethod
    def parse(cls, text: str, base: BaseRing, rank: int, names: Sequence[str] | None = None) -> "GroupRingElement":
        default = tuple(f"t{i + 1}" for i in range(rank))
        names = tuple(names) if names else default
        stored = None if names == default else names
        index = {n: i for i, n in enumerate(names)}
        bvar = base.var if base.kind == "quotient" else None

        def atom(name, e):
            if name in index:
                return cls.variable(base, rank, index[name], e, stored)
            if name == bvar:
                if e < 0:
                    raise ValueError(f"negative power of {bvar}")
                return cls.constant(base, rank, base.pow(base.generator(), e), stored)
            raise ValueError(f"unknown symbol {name!r}")

        return parse_expression(text, atom, lambda n: cls.constant(base, rank, n, stored))

    def to_json(self) -> dict:
        return {
            "base": str(self.base),
            "rank": self.rank,
            "text": str(self),
            "terms": [
                {"exponent": [str(x) for x in e], "coefficient": _coeff_json(self.base, c)}
                for e, c in self.terms
            ],
        }


def _coeff_json(base: BaseRing, c):
    r = base.to_int_repr(c)
    if isinstance(r, list):
        return [_coeff_json(base.base, x) if isinstance(x, list) else str(x) for x in r]
    return str(r)


# ---------------------------------------------------------------------------
# Units
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Unit:
    coefficient: object
    exponent: tuple


@dataclass(frozen=True)
class NotUnit:
    reason: str


def recognize_unit(x: GroupRingElement) -> Unit | NotUnit:
    """Decide whether ``x`` is a unit of ``A[Z^r]`` for a domain ``A``.

    Over a domain every unit is ``u * t^m`` with ``u`` a unit of ``A``, so the
    test is: exactly one term, and its coefficient is a unit.
    """
    if not x.base.is_integral_domain:
        raise UnsupportedBase(f"{x.base} is not certified to be an integral domain")
    if x.is_zero():
        return NotUnit("zero element")
    if not x.is_monomial():
        return NotUnit(f"not a monomial ({len(x)} terms)")
    e, c = x.terms[0]
    if not x.base.is_unit(c):
        return NotUnit(f"coefficient {x.base.format(c)} is not a unit of {x.base}")
    return Unit(c, e)


# ---------------------------------------------------------------------------
# Matrices over group rings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupRingMatrix:
    entries: tuple  # tuple[tuple[GroupRingElement, ...], ...]

    def __post_init__(self):
        n = len(self.entries)
        if any(len(r) != n for r in self.entries):
            raise ValueError("group ring matrices must be square")
        flat = [x for r in self.entries for x in r]
        if flat:
            b, k = flat[0].base, flat[0].rank
            if any(x.base != b or x.rank != k for x in flat):
                raise BaseRingMismatch("entries over different rings")

    @classmethod
    def from_rows(cls, rows) -> "GroupRingMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, n: int, base: BaseRing, rank: int, names=None) -> "GroupRingMatrix":
        one = GroupRingElement.one(base, rank, names)
        zero = GroupRingElement.zero(base, rank, names)
        return cls.from_rows([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, diag: Sequence[GroupRingElement]) -> "GroupRingMatrix":
        zero = GroupRingElement.zero(diag[0].base, diag[0].rank, diag[0].names)
        n = len(diag)
        return cls.from_rows([[diag[i] if i == j else zero for j in range(n)] for i in range(n)])

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def ring(self) -> tuple[BaseRing, int]:
        x = self.entries[0][0]
        return x.base, x.rank

    def _check(self, other: "GroupRingMatrix"):
        if self.size != other.size:
            raise ValueError(f"dimension mismatch {self.size} vs {other.size}")
        if self.size and self.ring != other.ring:
            raise BaseRingMismatch("matrices over different rings")

    def __matmul__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        self._check(other)
        n = self.size
        zero = GroupRingElement.zero(*self.ring)
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = zero
                for k in range(n):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a.terms and b.terms:
                        acc = acc + a * b
                row.append(acc)
            rows.append(row)
        return GroupRingMatrix.from_rows(rows)

    def __add__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        self._check(other)
        return GroupRingMatrix.from_rows(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)]
        )

    def __sub__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        self._check(other)
        return GroupRingMatrix.from_rows(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)]
        )

    def scalar_mul(self, c: GroupRingElement) -> "GroupRingMatrix":
        return GroupRingMatrix.from_rows([[c * x for x in r] for r in self.entries])

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.entries for x in r)

    def det(self) -> GroupRingElement:
        """Laplace expansion with memoization on the remaining column set."""
        n = self.size
        base, rank = self.ring
        memo: dict = {}

        def rec(row: int, cols: frozenset) -> GroupRingElement:
            if row == n:
                return GroupRingElement.one(base, rank)
            if cols in memo:
                return memo[cols]
            acc = GroupRingElement.zero(base, rank)
            ordered = sorted(cols)
            for pos, j in enumerate(ordered):
                a = self.entries[row][j]
                if a.is_zero():
                    continue
                sub = rec(row + 1, cols - {j})
                if sub.is_zero():
                    continue
                term = a * sub
                acc = acc - term if pos % 2 else acc + term
            memo[cols] = acc
            return acc

        return rec(0, frozenset(range(n)))

    def adjugate(self) -> "GroupRingMatrix":
        n = self.size
        base, rank = self.ring
        if n == 1:
            return GroupRingMatrix.identity(1, base, rank)
        rows = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = GroupRingMatrix.from_rows(
                    [[self.entries[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
                )
                cof = minor.det()
                rows[j][i] = -cof if (i + j) % 2 else cof
        return GroupRingMatrix.from_rows(rows)

    def inverse(self) -> "GroupRingMatrix":
        """Inverse via adjugate; requires a monomial unit determinant."""
        d = self.det()
        return self.adjugate().scalar_mul(d.inverse())

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.entries]
