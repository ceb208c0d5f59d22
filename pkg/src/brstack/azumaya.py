"""Gluing data for the Azumaya algebra End(O + L + ... + L^(n-1)).

Given an n-torsion line bundle L trivialized on charts U_i by s_i, with
transition units xi_ab (s_a = xi_ab s_b on U_a cap U_b) and
beta_i = s_i^n under a fixed trivialization of L^n, the chart-local
multiplication-by-s map on the basis (1, s_i, .., s_i^(n-1)) is the companion
type matrix

    M_i = E[1,0] + E[2,1] + ... + E[n-1,n-2] + beta_i E[0,n-1]     (0-based)

and the change of basis on an overlap is D_ab = diag(1, xi_ab, .., xi_ab^(n-1)).
Everything is checked symbolically over Z[G] where G is the abelian group on
the symbols xi_ab, beta_i modulo the cocycle relations and one of the two
possible n-th power relations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

from .linalg import (
    FgAbGroup,
    IntMatrix,
    group_invariants,
    hermite_normal_form,
    reduce_mod_lattice,
    solve_integer,
)
from .rings import BaseRing, GroupRingElement, GroupRingMatrix

ZZ = BaseRing.integers()

# The two ways to orient the n-th power relation on an overlap (a, b).
FIRST_IS_SECOND_TIMES_XI_N = "beta_a = beta_b * xi_ab^n"
SECOND_IS_FIRST_TIMES_XI_N = "beta_b = beta_a * xi_ab^n"
ORIENTATIONS = (FIRST_IS_SECOND_TIMES_XI_N, SECOND_IS_FIRST_TIMES_XI_N)


class PreconditionError(ValueError):
    pass


def _symbol_names(charts: int) -> tuple[str, ...]:
    betas = [f"beta{i}" for i in range(1, charts + 1)]
    xis = [f"xi{a}{b}" for a, b in combinations(range(1, charts + 1), 2)]
    return tuple(betas + xis)


@dataclass(frozen=True)
class SymbolicUnitGroup:
    """Free abelian group on named symbols modulo integer relation rows."""

    names: tuple[str, ...]
    relations: tuple[tuple[int, ...], ...] = ()
    charts: int = 0
    n: int = 1
    orientation: str | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if any(len(r) != len(self.names) for r in self.relations):
            raise ValueError("relation length does not match the number of symbols")
        if self.invariants.is_trivial:
            raise ValueError("relations collapse the unit group to 0")

    @classmethod
    def for_cover(cls, n: int, charts: int, orientation: str | None = None,
                  extra: dict | None = None) -> "SymbolicUnitGroup":
        """Symbols beta_i, xi_ab (a < b) with cocycle relations, plus the
        n-th power relation in the given orientation (none if ``None``).

        ``extra`` maps a symbol to a dict of symbol exponents it is set equal
        to, e.g. ``{"xi12": {}, "beta2": {"beta1": 1}}`` for the untwisted case.
        """
        if charts < 2:
            raise ValueError("need at least two charts")
        if orientation is not None and orientation not in ORIENTATIONS:
            raise ValueError(f"unknown orientation {orientation!r}")
        names = _symbol_names(charts)
        idx = {s: i for i, s in enumerate(names)}
        g = len(names)
        rels = []
        for a, b, c in combinations(range(1, charts + 1), 3):
            row = [0] * g
            row[idx[f"xi{a}{b}"]] += 1
            row[idx[f"xi{b}{c}"]] += 1
            row[idx[f"xi{a}{c}"]] -= 1
            rels.append(tuple(row))
        if orientation is not None:
            sign = 1 if orientation == FIRST_IS_SECOND_TIMES_XI_N else -1
            for a, b in combinations(range(1, charts + 1), 2):
                # +-(beta_a - beta_b) - n xi_ab = 0
                row = [0] * g
                row[idx[f"beta{a}"]] = sign
                row[idx[f"beta{b}"]] = -sign
                row[idx[f"xi{a}{b}"]] = -n
                rels.append(tuple(row))
        for lhs, rhs in (extra or {}).items():
            row = [0] * g
            row[idx[lhs]] += 1
            for s, k in rhs.items():
                row[idx[s]] -= k
            rels.append(tuple(row))
        return cls(names, tuple(rels), charts, n, orientation)

    @property
    def rank(self) -> int:
        return len(self.names)

    @cached_property
    def invariants(self) -> FgAbGroup:
        rows = IntMatrix.from_rows(self.relations, self.rank) if self.relations else IntMatrix.zeros(0, self.rank)
        return group_invariants(self.rank, rows)

    @cached_property
    def _hnf(self) -> list[list[int]]:
        return hermite_normal_form(self.relations, self.rank)

    def symbol(self, name: str) -> list[int]:
        v = [0] * self.rank
        v[self.names.index(name)] = 1
        return v

    def xi(self, a: int, b: int) -> list[int]:
        """Exponent vector of xi_ab for an ordered pair of distinct charts."""
        if a == b:
            return [0] * self.rank
        if a < b:
            return self.symbol(f"xi{a}{b}")
        return [-x for x in self.symbol(f"xi{b}{a}")]

    def reduce(self, exponent) -> tuple[int, ...]:
        return tuple(reduce_mod_lattice(exponent, self._hnf))

    def equal(self, u, v) -> bool:
        return self.reduce([a - b for a, b in zip(u, v)]) == (0,) * self.rank

    def in_lattice(self, v, extra_rows=()) -> bool:
        rows = list(self.relations) + [list(r) for r in extra_rows]
        if all(x == 0 for x in v):
            return True
        if not rows:
            return False
        return solve_integer(IntMatrix.from_rows(rows, self.rank).T, list(v)) is not None

    def reduce_element(self, x: GroupRingElement) -> GroupRingElement:
        return x.map_exponents(self.reduce, self.rank, self.names)

    def reduce_matrix(self, A: GroupRingMatrix) -> GroupRingMatrix:
        return GroupRingMatrix.from_rows([[self.reduce_element(x) for x in r] for r in A.entries])

    def format(self, exponent) -> str:
        return str(GroupRingElement.monomial(ZZ, list(exponent), 1, self.names))


@dataclass(frozen=True)
class GluingData:
    n: int
    charts: int
    names: tuple[str, ...]
    M: tuple[GroupRingMatrix, ...]
    D: dict = field(compare=False)  # (a, b) -> GroupRingMatrix, 1-based charts
    basis: tuple[str, ...] = ()

    def free_group(self) -> SymbolicUnitGroup:
        return SymbolicUnitGroup.for_cover(self.n, self.charts, None)

    def monomial(self, exponent) -> GroupRingElement:
        return GroupRingElement.monomial(ZZ, list(exponent), 1, self.names)

    def pairs(self) -> list[tuple[int, int]]:
        r = range(1, self.charts + 1)
        return [(a, b) for a in r for b in r if a != b]


def build_gluing(n: int, charts: int = 2) -> GluingData:
    if n < 2:
        raise ValueError("n must be at least 2")
    G = SymbolicUnitGroup.for_cover(n, charts, None)
    g, names = G.rank, G.names
    zero = GroupRingElement.zero(ZZ, g, names)
    one = GroupRingElement.one(ZZ, g, names)
    Ms = []
    for i in range(1, charts + 1):
        rows = [[zero] * n for _ in range(n)]
        for r in range(1, n):
            rows[r][r - 1] = one
        rows[0][n - 1] = GroupRingElement.monomial(ZZ, G.symbol(f"beta{i}"), 1, names)
        Ms.append(GroupRingMatrix.from_rows(rows))
    Ds = {}
    for a in range(1, charts + 1):
        for b in range(1, charts + 1):
            if a != b:
                x = G.xi(a, b)
                Ds[(a, b)] = GroupRingMatrix.diagonal(
                    [GroupRingElement.monomial(ZZ, [l * c for c in x], 1, names) for l in range(n)]
                )
    basis = tuple(["1"] + ["s" if l == 1 else f"s^{l}" for l in range(1, n)])
    return GluingData(n, charts, names, tuple(Ms), Ds, basis)


@dataclass(frozen=True)
class OrientationCheck:
    orientation: str | None
    holds: bool
    discrepancies: dict  # (a, b) -> reduced GroupRingMatrix (lhs - rhs), only failing pairs
    raw: dict  # (a, b) -> (lhs, rhs) unreduced, only failing pairs


@dataclass(frozen=True)
class Holds:
    orientation: str
    relation: str
    pairs_checked: int
    other: OrientationCheck


@dataclass(frozen=True)
class Fails:
    checks: tuple[OrientationCheck, ...]
    reason: str


def check_orientation(data: GluingData, orientation: str | None) -> OrientationCheck:
    """Test D_ab M_a = xi_ab M_b D_ab for all ordered pairs modulo the relations."""
    G = SymbolicUnitGroup.for_cover(data.n, data.charts, orientation)
    bad, raw = {}, {}
    for a, b in data.pairs():
        D = data.D[(a, b)]
        xi = data.monomial(G.xi(a, b))
        lhs = D @ data.M[a - 1]
        rhs = (data.M[b - 1] @ D).scalar_mul(xi)
        diff = G.reduce_matrix(lhs - rhs)
        if not diff.is_zero():
            bad[(a, b)] = diff
            raw[(a, b)] = (lhs, rhs)
    return OrientationCheck(orientation, not bad, bad, raw)


def verify_gluing_identity(data: GluingData) -> Holds | Fails:
    checks = tuple(check_orientation(data, o) for o in ORIENTATIONS)
    good = [c for c in checks if c.holds]
    if len(good) == 1:
        other = next(c for c in checks if not c.holds)
        return Holds(good[0].orientation, good[0].orientation.replace("n", str(data.n)),
                     len(data.pairs()), other)
    reason = "holds under both orientations" if good else "holds under neither orientation"
    return Fails(checks, reason)


@dataclass(frozen=True)
class CoboundaryClass:
    orientation: str
    classes: dict  # (a, b) -> exponent tuple
    equals_xi: bool
    n_torsion: bool

    def formatted(self, G: SymbolicUnitGroup) -> dict:
        # prefer the xi_ab spelling when the class equals it
        return {
            f"{a},{b}": G.format(G.xi(a, b) if G.equal(e, G.xi(a, b)) else e)
            for (a, b), e in sorted(self.classes.items())
        }


def _unit_ratio(G: SymbolicUnitGroup, A: GroupRingMatrix, B: GroupRingMatrix):
    """The monomial u with A = u B (modulo relations), or None."""
    u = None
    for i in range(A.size):
        for j in range(A.size):
            x, y = G.reduce_element(A[i, j]), G.reduce_element(B[i, j])
            if x.is_zero() and y.is_zero():
                continue
            if not (x.is_monomial() and y.is_monomial()) or x.terms[0][1] != y.terms[0][1]:
                return None
            e = G.reduce([p - q for p, q in zip(x.terms[0][0], y.terms[0][0])])
            if u is None:
                u = e
            elif e != u:
                return None
    return u


def coboundary_class(data: GluingData, orientation: str | None = None,
                     extra: dict | None = None) -> CoboundaryClass:
    """Per overlap, the unit u with D_ab M_a D_ab^-1 = u M_b (reduced)."""
    verdict = verify_gluing_identity(data)
    if orientation is None:
        if not isinstance(verdict, Holds):
            raise PreconditionError(f"gluing identity does not hold: {verdict.reason}")
        orientation = verdict.orientation
    elif not check_orientation(data, orientation).holds:
        raise PreconditionError(f"gluing identity fails under {orientation}")
    G = SymbolicUnitGroup.for_cover(data.n, data.charts, orientation, extra)
    classes = {}
    for a, b in data.pairs():
        D = data.D[(a, b)]
        conj = D @ data.M[a - 1] @ D.inverse()
        u = _unit_ratio(G, conj, data.M[b - 1])
        if u is None:
            raise PreconditionError(f"the two lifts on overlap {a},{b} differ by a non-unit")
        classes[(a, b)] = u
    coboundaries = _beta_coboundaries(G)
    eq = all(G.equal(u, G.xi(a, b)) for (a, b), u in classes.items())
    tors = all(G.in_lattice([data.n * x for x in u], coboundaries) for u in classes.values())
    return CoboundaryClass(orientation, classes, eq, tors)


def _beta_coboundaries(G: SymbolicUnitGroup) -> list[list[int]]:
    rows = []
    for a, b in combinations(range(1, G.charts + 1), 2):
        rows.append([x - y for x, y in zip(G.symbol(f"beta{a}"), G.symbol(f"beta{b}"))])
    return rows


@dataclass(frozen=True)
class TorsionCertificate:
    n: int
    orientation: str | None
    holds: bool
    per_pair: dict  # (a, b) -> {"det_ratio": str, "u^n": str, "in_lattice": bool}


def determinant_torsion_bound(data: GluingData, orientation: str | None = FIRST_IS_SECOND_TIMES_XI_N) -> TorsionCertificate:
    """Certify u^n = det(M_a)/det(M_b) is a coboundary of the beta_i.

    From D M_a D^-1 = u M_b, taking determinants gives det M_a = u^n det M_b,
    so n-th powers of the class land in the span of beta_a - beta_b.  With
    ``orientation=None`` there is no relation tying xi to the beta_i and the
    certificate is expected to fail.
    """
    G = SymbolicUnitGroup.for_cover(data.n, data.charts, orientation)
    cob = _beta_coboundaries(G)
    per, ok = {}, True
    for a, b in data.pairs():
        da, db = data.M[a - 1].det(), data.M[b - 1].det()
        # both determinants are +-beta, a monomial unit
        ratio = [p - q for p, q in zip(da.terms[0][0], db.terms[0][0])]
        same_sign = da.terms[0][1] == db.terms[0][1]
        u_n = [data.n * x for x in G.xi(a, b)]
        matches = same_sign and G.equal(u_n, ratio)
        in_lat = G.in_lattice(u_n, cob)
        per[(a, b)] = {
            "det_ratio": G.format(ratio),
            "u^n": G.format(u_n),
            "u^n_equals_det_ratio": matches,
            "in_coboundary_lattice": in_lat,
        }
        ok = ok and matches and in_lat
    return TorsionCertificate(data.n, orientation, ok, per)


def triple_overlap_consistent(data: GluingData, orientation: str | None = None) -> bool:
    """D_bc D_ab = D_ac for all triples of distinct charts, modulo cocycle relations."""
    G = SymbolicUnitGroup.for_cover(data.n, data.charts, orientation)
    r = range(1, data.charts + 1)
    for a in r:
        for b in r:
            for c in r:
                if len({a, b, c}) < 3:
                    continue
                diff = data.D[(b, c)] @ data.D[(a, b)] - data.D[(a, c)]
                if not G.reduce_matrix(diff).is_zero():
                    return False
    return True


def conjugation_fixes_scalars(data: GluingData, scalar: GroupRingElement | None = None) -> bool:
    """M_i (u Id) M_i^-1 = u Id for each chart."""
    if scalar is None:
        scalar = data.monomial(SymbolicUnitGroup.for_cover(data.n, data.charts).xi(1, 2))
    base, rank = data.M[0].ring
    uI = GroupRingMatrix.identity(data.n, base, rank, data.names).scalar_mul(scalar)
    return all(((M @ uI) @ M.inverse() - uI).is_zero() for M in data.M)


def gluing_report(n: int, charts: int = 2) -> dict:
    data = build_gluing(n, charts)
    verdict = verify_gluing_identity(data)
    out = {
        "n": n,
        "charts": charts,
        "basis": list(data.basis),
        "symbols": list(data.names),
        "M": {str(i + 1): M.to_json() for i, M in enumerate(data.M)},
        "D": {f"{a},{b}": D.to_json() for (a, b), D in sorted(data.D.items())},
        "triple_overlap_consistent": triple_overlap_consistent(data),
        "conjugation_fixes_scalars": conjugation_fixes_scalars(data),
    }
    if isinstance(verdict, Holds):
        G = SymbolicUnitGroup.for_cover(n, charts, verdict.orientation)
        cls = coboundary_class(data, verdict.orientation)
        cert = determinant_torsion_bound(data, verdict.orientation)
        out["identity"] = {
            "holds": True,
            "orientation": verdict.orientation,
            "relation": verdict.relation,
            "pairs_checked": verdict.pairs_checked,
            "other_orientation_discrepancies": _discrepancy_json(verdict.other),
        }
        out["coboundary_class"] = {
            "classes": cls.formatted(G),
            "equals_xi": cls.equals_xi,
            "n_torsion": cls.n_torsion,
        }
        out["determinant_certificate"] = {
            "holds": cert.holds,
            "pairs": {f"{a},{b}": v for (a, b), v in sorted(cert.per_pair.items())},
        }
    else:
        out["identity"] = {
            "holds": False,
            "reason": verdict.reason,
            "checks": [
                {"orientation": c.orientation, "holds": c.holds, "discrepancies": _discrepancy_json(c)}
                for c in verdict.checks
            ],
        }
    return out


def _discrepancy_json(check: OrientationCheck) -> dict:
    out = {}
    for (a, b), diff in sorted(check.discrepancies.items()):
        lhs, rhs = check.raw[(a, b)]
        out[f"{a},{b}"] = {
            "lhs": lhs.to_json(),
            "rhs": rhs.to_json(),
            "reduced_difference": diff.to_json(),
        }
    return out
