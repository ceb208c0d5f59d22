"""Exact integer linear algebra.

Smith normal form, finitely generated abelian groups given by presentations,
homomorphisms between them, and homology of cochain complexes.  Everything is
done over Python ints, so there is no overflow and no rounding.

Conventions: a homomorphism matrix acts on column vectors of generator
coordinates (``y = A @ x``); a presentation stores its relations as *rows*.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence


class CompositionNonzero(ValueError):
    """Raised when consecutive differentials do not compose to zero."""


class NotAHomomorphism(ValueError):
    """Raised when a matrix does not respect the source relations."""


# ---------------------------------------------------------------------------
# Integer matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    data: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix dimension")
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise ValueError(f"entry count does not match shape {self.rows}x{self.cols}")
        for r in self.data:
            for x in r:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise TypeError(f"non-integer entry {x!r}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def diagonal(cls, entries: Sequence[int], rows: int | None = None, cols: int | None = None) -> "IntMatrix":
        rows = len(entries) if rows is None else rows
        cols = len(entries) if cols is None else cols
        data = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(entries):
            data[i][i] = d
        return cls.from_rows(data, cols)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        return cls.from_rows([[c[i] for c in columns] for i in range(rows)], len(columns))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.data[i][j]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.data]

    def column(self, j: int) -> list[int]:
        return [r[j] for r in self.data]

    def columns(self) -> list[list[int]]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([self.column(j) for j in range(self.cols)], self.rows)

    T = property(transpose)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = other.columns()
        return IntMatrix.from_rows(
            [[sum(a * b for a, b in zip(r, c)) for c in ocols] for r in self.data],
            other.cols,
        )

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix.from_rows(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)], self.cols
        )

    def __neg__(self) -> "IntMatrix":
        return IntMatrix.from_rows([[-a for a in r] for r in self.data], self.cols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix.from_rows([[k * a for a in r] for r in self.data], self.cols)

    def apply(self, v: Sequence[int]) -> list[int]:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return [sum(a * b for a, b in zip(r, v)) for r in self.data]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.data for x in r)

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.to_lists()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return IntMatrix.from_rows([r + s for r, s in zip(self.data, other.data)], self.cols + other.cols)

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return IntMatrix(self.rows + other.rows, self.cols, self.data + other.data)

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.data]

    @classmethod
    def from_json(cls, obj, cols: int | None = None) -> "IntMatrix":
        if not isinstance(obj, list) or any(not isinstance(r, list) for r in obj):
            raise ValueError("matrix must be a JSON array of arrays")
        rows = [[_parse_int(x) for x in r] for r in obj]
        if cols is None and rows:
            cols = len(rows[0])
        return cls.from_rows(rows, cols or 0)


def _parse_int(x) -> int:
    if isinstance(x, bool):
        raise ValueError(f"not an integer: {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        return int(x.strip())
    raise ValueError(f"not an integer: {x!r}")


def block_diagonal(*blocks: IntMatrix) -> IntMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    data = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                data[r0 + i][c0 + j] = b.data[i][j]
        r0 += b.rows
        c0 += b.cols
    return IntMatrix.from_rows(data, cols)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmithForm:
    """``U @ M @ V == S`` with U, V unimodular and S in Smith form."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix = field(repr=False, compare=False)
    V_inv: IntMatrix = field(repr=False, compare=False)

    @property
    def diagonal(self) -> list[int]:
        return [self.S[i, i] for i in range(min(self.S.rows, self.S.cols))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(M: IntMatrix) -> SmithForm:
    """Smith normal form of ``M``.

    Pivots on the nonzero entry of least absolute value in the remaining
    block.  Row operations are mirrored on U (and its inverse), column
    operations on V (and its inverse).
    """
    m, n = M.rows, M.cols
    A = M.to_lists()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        A[i], A[k] = A[k], A[i]
        U[i], U[k] = U[k], U[i]
        for row in Ui:
            row[i], row[k] = row[k], row[i]

    def swap_cols(j, k):
        for row in A:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]
        Vi[j], Vi[k] = Vi[k], Vi[j]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        if q == 0:
            return
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]
        for row in Ui:
            row[src] -= q * row[dst]

    def add_col(dst, src, q):
        # col_dst += q * col_src
        if q == 0:
            return
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]
        Vi[src] = [a - q * b for a, b in zip(Vi[src], Vi[dst])]

    def negate_row(i):
        A[i] = [-a for a in A[i]]
        U[i] = [-a for a in U[i]]
        for row in Ui:
            row[i] = -row[i]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] != 0 and (best is None or abs(A[i][j]) < best[0]):
                        best = (abs(A[i][j]), i, j)
            if best is None:
                break
            _, bi, bj = best
            if bi != t:
                swap_rows(t, bi)
            if bj != t:
                swap_cols(t, bj)
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    dirty |= A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    dirty |= A[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if best is None:
            break
        if A[t][t] < 0:
            negate_row(t)

    return SmithForm(
        U=IntMatrix.from_rows(U, m),
        S=IntMatrix.from_rows(A, n),
        V=IntMatrix.from_rows(V, n),
        U_inv=IntMatrix.from_rows(Ui, m),
        V_inv=IntMatrix.from_rows(Vi, n),
    )


# ---------------------------------------------------------------------------
# Lattice helpers built on SNF
# ---------------------------------------------------------------------------

def kernel_basis(A: IntMatrix) -> list[list[int]]:
    """A Z-basis of ``{x : A x = 0}``."""
    snf = smith_normal_form(A)
    r = snf.rank
    return [snf.V.column(j) for j in range(r, A.cols)]


def solve_integer(A: IntMatrix, b: Sequence[int]) -> list[int] | None:
    """An integer solution of ``A x = b``, or None if there is none."""
    if len(b) != A.rows:
        raise ValueError("right-hand side length mismatch")
    snf = smith_normal_form(A)
    c = snf.U.apply(b)
    diag = snf.diagonal
    y = [0] * A.cols
    for i, ci in enumerate(c):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if ci != 0:
                return None
        else:
            if ci % d:
                return None
            y[i] = ci // d
    return snf.V.apply(y)


def row_lattice_basis(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """A Z-basis for the lattice spanned by ``rows`` in Z^ncols."""
    if not rows:
        return []
    snf = smith_normal_form(IntMatrix.from_rows(rows, ncols))
    return [[d * x for x in snf.V_inv.data[i]] for i, d in enumerate(snf.diagonal) if d]


def hermite_normal_form(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Row-style HNF: nonzero rows in echelon form, positive pivots, entries
    above each pivot reduced into [0, pivot)."""
    work = [list(r) for r in rows if any(r)]
    out: list[list[int]] = []
    col = 0
    while work and col < ncols:
        live = [r for r in work if r[col]]
        if not live:
            col += 1
            continue
        rest = [r for r in work if not r[col]]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                q = r[col] // piv[col]
                r = [a - q * b for a, b in zip(r, piv)]
                (nxt if r[col] else rest).append(r)
            live = nxt
        piv = live[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        for prev in out:
            q = prev[col] // piv[col]
            if q:
                prev[:] = [a - q * b for a, b in zip(prev, piv)]
        out.append(piv)
        work = [r for r in rest if any(r)]
        col += 1
    return out


def reduce_mod_lattice(v: Sequence[int], hnf: Sequence[Sequence[int]]) -> list[int]:
    """Canonical representative of v + lattice, for a lattice given in HNF."""
    v = list(v)
    for row in hnf:
        c = next(i for i, a in enumerate(row) if a)
        q = v[c] // row[c]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return v


def in_row_lattice(v: Sequence[int], rows: Sequence[Sequence[int]], ncols: int) -> bool:
    if all(x == 0 for x in v):
        return True
    if not rows:
        return False
    return solve_integer(IntMatrix.from_rows(rows, ncols).T, v) is not None


# ---------------------------------------------------------------------------
# Finitely generated abelian groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FgAbGroup:
    """Z^rank + Z/d1 + ... + Z/dk with 1 < d1 | d2 | ... | dk."""

    rank: int = 0
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "invariant_factors", tuple(int(d) for d in self.invariant_factors))
        if self.rank < 0:
            raise ValueError("negative rank")
        f = self.invariant_factors
        if any(d < 2 for d in f):
            raise ValueError(f"invariant factors must be >= 2, got {f}")
        if any(f[i + 1] % f[i] for i in range(len(f) - 1)):
            raise ValueError(f"invariant factors must form a divisibility chain, got {f}")

    @classmethod
    def free(cls, rank: int) -> "FgAbGroup":
        return cls(rank, ())

    @classmethod
    def cyclic(cls, n: int) -> "FgAbGroup":
        """Z/n (with Z/0 = Z and Z/1 = 0)."""
        n = abs(n)
        if n == 0:
            return cls(1)
        return cls(0, (n,) if n > 1 else ())

    @classmethod
    def from_cyclic_orders(cls, orders: Iterable[int]) -> "FgAbGroup":
        orders = list(orders)
        return group_invariants(len(orders), IntMatrix.diagonal(orders))

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.invariant_factors

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    def order(self) -> int | None:
        if self.rank:
            return None
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def torsion(self) -> "FgAbGroup":
        return FgAbGroup(0, self.invariant_factors)

    def direct_sum(self, other: "FgAbGroup") -> "FgAbGroup":
        return FgAbGroup.from_cyclic_orders(self._cyclic_orders() + other._cyclic_orders())

    __add__ = direct_sum

    def _cyclic_orders(self) -> list[int]:
        return list(self.invariant_factors) + [0] * self.rank

    def presentation(self) -> "Presentation":
        f = self.invariant_factors
        g = len(f) + self.rank
        return Presentation(g, IntMatrix.diagonal(list(f), rows=len(f), cols=g))

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.invariant_factors] + ["Z"] * self.rank
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "invariant_factors": [str(d) for d in self.invariant_factors],
            "pretty": str(self),
        }

    @classmethod
    def from_json(cls, obj) -> "FgAbGroup":
        if isinstance(obj, dict):
            return cls(_parse_int(obj.get("rank", 0)), tuple(_parse_int(d) for d in obj.get("invariant_factors", [])))
        if isinstance(obj, list):
            # a list of cyclic orders; 0 means Z
            return cls.from_cyclic_orders(_parse_int(x) for x in obj)
        raise ValueError(f"cannot read a group from {obj!r}")


def group_invariants(generators: int, relations: IntMatrix) -> FgAbGroup:
    """The abelian group on ``generators`` generators subject to ``relations`` (rows)."""
    if relations.rows and relations.cols != generators:
        raise ValueError(f"relations have {relations.cols} columns, expected {generators}")
    if generators == 0:
        return FgAbGroup()
    diag = smith_normal_form(relations).diagonal if relations.rows else []
    nonzero = [d for d in diag if d != 0]
    return FgAbGroup(generators - len(nonzero), tuple(d for d in nonzero if d > 1))


def is_torsion_free(G: FgAbGroup) -> bool:
    return not G.invariant_factors


@dataclass(frozen=True)
class Presentation:
    """Z^generators modulo the row lattice of ``relations``."""

    generators: int
    relations: IntMatrix = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.relations is None:
            object.__setattr__(self, "relations", IntMatrix.zeros(0, self.generators))
        if self.relations.cols != self.generators:
            raise ValueError("relation width must equal the number of generators")

    @classmethod
    def free(cls, rank: int) -> "Presentation":
        return cls(rank)

    def invariants(self) -> FgAbGroup:
        return group_invariants(self.generators, self.relations)

    def contains_relation(self, v: Sequence[int]) -> bool:
        """True if ``v`` is zero in the presented group."""
        return in_row_lattice(v, self.relations.data, self.generators)

    def direct_sum(self, other: "Presentation") -> "Presentation":
        return Presentation(self.generators + other.generators, block_diagonal(self.relations, other.relations))

    def power(self, k: int) -> "Presentation":
        out = Presentation(0)
        for _ in range(k):
            out = out.direct_sum(self)
        return out


def direct_sum_of(parts: Iterable[Presentation]) -> Presentation:
    out = Presentation(0)
    for p in parts:
        out = out.direct_sum(p)
    return out


@dataclass(frozen=True)
class GroupHom:
    source: Presentation
    target: Presentation
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.generators, self.source.generators):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match "
                f"{self.target.generators}x{self.source.generators}"
            )
        for rel in self.source.relations.data:
            if not self.target.contains_relation(self.matrix.apply(rel)):
                raise NotAHomomorphism(f"relation {list(rel)} is not sent into the target relations")

    def is_zero(self) -> bool:
        return all(self.target.contains_relation(c) for c in self.matrix.columns())

    def compose(self, first: "GroupHom") -> "GroupHom":
        """``self o first``."""
        return GroupHom(first.source, self.target, self.matrix @ first.matrix)


def homology_at(d_in: GroupHom, d_out: GroupHom) -> FgAbGroup:
    """``ker(d_out) / im(d_in)`` as a canonical group."""
    B = d_in.target
    if B != d_out.source:
        raise ValueError("d_in target and d_out source differ")
    if not d_out.compose(d_in).is_zero():
        raise CompositionNonzero("d_out o d_in is not zero")
    b = B.generators
    if b == 0:
        return FgAbGroup()
    C = d_out.target
    # K = {x : d_out x lies in the relation lattice of C}
    big = d_out.matrix.hstack(C.relations.T.scale(-1)) if C.relations.rows else d_out.matrix
    spanning = [v[:b] for v in kernel_basis(big)]
    basis = row_lattice_basis(spanning, b)
    k = len(basis)
    if k == 0:
        return FgAbGroup()
    coords_of = IntMatrix.from_rows(basis, b).T
    rels = []
    for v in d_in.matrix.columns() + [list(r) for r in B.relations.data]:
        c = solve_integer(coords_of, v)
        if c is None:  # pragma: no cover - guarded by the composition check
            raise CompositionNonzero("image not contained in kernel")
        rels.append(c)
    return group_invariants(k, IntMatrix.from_rows(rels, k))


def zero_hom(source: Presentation, target: Presentation) -> GroupHom:
    return GroupHom(source, target, IntMatrix.zeros(target.generators, source.generators))


@dataclass(frozen=True)
class CochainComplex:
    """C^0 -> C^1 -> ... -> C^n with ``differentials[p]: C^p -> C^{p+1}``.

    ``d o d = 0`` is checked on construction.
    """

    terms: tuple[Presentation, ...]
    differentials: tuple[GroupHom, ...]

    def __post_init__(self):
        if len(self.differentials) != max(len(self.terms) - 1, 0):
            raise ValueError("need exactly one differential between consecutive terms")
        for p, d in enumerate(self.differentials):
            if d.source != self.terms[p] or d.target != self.terms[p + 1]:
                raise ValueError(f"differential {p} has the wrong source or target")
        for p in range(len(self.differentials) - 1):
            if not self.differentials[p + 1].compose(self.differentials[p]).is_zero():
                raise CompositionNonzero(f"d^{p + 1} o d^{p} != 0")

    def cohomology(self, p: int) -> FgAbGroup:
        if p < 0 or p >= len(self.terms):
            return FgAbGroup()
        C = self.terms[p]
        d_in = self.differentials[p - 1] if p > 0 else zero_hom(Presentation(0), C)
        d_out = self.differentials[p] if p < len(self.differentials) else zero_hom(C, Presentation(0))
        return homology_at(d_in, d_out)


def minors_gcd_invariants(M: IntMatrix) -> list[int]:
    """Nonzero invariant factors via gcds of k x k minors.

    Slow and independent of :func:`smith_normal_form`; kept as a cross-check.
    """
    from itertools import combinations

    out, prev = [], 1
    for k in range(1, min(M.rows, M.cols) + 1):
        g = 0
        for rs in combinations(range(M.rows), k):
            for cs in combinations(range(M.cols), k):
                g = gcd(g, IntMatrix.from_rows([[M[i, j] for j in cs] for i in rs], k).det())
                if g == 1:
                    break
            if g == 1:
                break
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out
