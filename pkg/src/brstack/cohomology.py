"""Cohomology of free abelian groups Z^r via the Koszul resolution.

A Z^r-module is a presented abelian group together with r commuting
automorphisms T_1, ..., T_r (matrices acting on generator coordinates).
The cochain complex has C^p = M^(r choose p), one copy of M for each
p-subset S of {1..r}, and

    (d phi)(S') = sum_k (-1)^(p - k) (T_{s_k} - 1) phi(S' minus s_k)

for S' = {s_0 < ... < s_p}.  With this sign, for r = 2 the degree 1 -> 2 map
is (m1, m2) -> (T2 - 1) m1 - (T1 - 1) m2 and the degree 0 -> 1 map is
m -> ((T1 - 1) m, (T2 - 1) m).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .linalg import (
    CochainComplex,
    FgAbGroup,
    GroupHom,
    IntMatrix,
    Presentation,
    smith_normal_form,
)


class NoncommutingActions(ValueError):
    pass


class InvalidAction(ValueError):
    """An action matrix does not induce an automorphism of the module."""


@dataclass(frozen=True)
class ZrModule:
    underlying: Presentation
    actions: tuple[IntMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        g = self.underlying.generators
        for i, T in enumerate(self.actions):
            if T.shape != (g, g):
                raise InvalidAction(f"action {i + 1} has shape {T.shape}, expected {g}x{g}")
            try:
                GroupHom(self.underlying, self.underlying, T)
            except ValueError as exc:
                raise InvalidAction(f"action {i + 1} does not preserve the relations") from exc
            if not _surjective_mod(T, self.underlying):
                raise InvalidAction(f"action {i + 1} is not invertible on the module")
        for i, j in combinations(range(len(self.actions)), 2):
            comm = self.actions[i] @ self.actions[j] - self.actions[j] @ self.actions[i]
            if not all(self.underlying.contains_relation(c) for c in comm.columns()):
                raise NoncommutingActions(f"actions {i + 1} and {j + 1} do not commute")

    @property
    def r(self) -> int:
        return len(self.actions)

    @classmethod
    def trivial(cls, group: FgAbGroup | Presentation, r: int) -> "ZrModule":
        pres = group.presentation() if isinstance(group, FgAbGroup) else group
        eye = IntMatrix.identity(pres.generators)
        return cls(pres, (eye,) * r)

    def permuted(self, order: Sequence[int]) -> "ZrModule":
        """Same module with the generators of Z^r listed in ``order``."""
        return ZrModule(self.underlying, tuple(self.actions[i] for i in order))


def _surjective_mod(T: IntMatrix, pres: Presentation) -> bool:
    # image(T) + relations = Z^g; a surjective endomorphism of a f.g. module
    # is an isomorphism, so this is the whole invertibility test
    g = pres.generators
    if g == 0:
        return True
    span = T.hstack(pres.relations.T) if pres.relations.rows else T
    diag = smith_normal_form(span).diagonal
    return len(diag) >= g and all(d == 1 for d in diag[:g])


def koszul_cochain_complex(M: ZrModule) -> CochainComplex:
    r = M.r
    g = M.underlying.generators
    subsets = [list(combinations(range(r), p)) for p in range(r + 1)]
    terms = tuple(M.underlying.power(len(subsets[p])) for p in range(r + 1))
    eye = IntMatrix.identity(g)
    t_minus_1 = [T - eye for T in M.actions]
    diffs = []
    for p in range(r):
        src, dst = subsets[p], subsets[p + 1]
        index = {S: k for k, S in enumerate(src)}
        rows = [[0] * (g * len(src)) for _ in range(g * len(dst))]
        for row_block, S in enumerate(dst):
            for k, s in enumerate(S):
                sign = -1 if (p - k) % 2 else 1
                col_block = index[S[:k] + S[k + 1:]]
                A = t_minus_1[s]
                for a in range(g):
                    for b in range(g):
                        rows[row_block * g + a][col_block * g + b] += sign * A[a, b]
        mat = IntMatrix.from_rows(rows, g * len(src))
        diffs.append(GroupHom(terms[p], terms[p + 1], mat))
    return CochainComplex(terms, tuple(diffs))


def group_cohomology(M: ZrModule) -> list[FgAbGroup]:
    """[H^0, ..., H^r] of Z^r with coefficients in M."""
    C = koszul_cochain_complex(M)
    return [C.cohomology(p) for p in range(M.r + 1)]


def module_from_json(obj: dict) -> ZrModule:
    """Read ``{"generators": g, "relations": [[..]], "actions": [[[..]], ..]}``."""
    g = int(obj["generators"])
    rels = obj.get("relations") or []
    relations = IntMatrix.from_json(rels, g) if rels else IntMatrix.zeros(0, g)
    actions = tuple(IntMatrix.from_json(a, g) for a in obj.get("actions", []))
    if "r" in obj and int(obj["r"]) != len(actions):
        if actions:
            raise ValueError("'r' disagrees with the number of action matrices")
        actions = (IntMatrix.identity(g),) * int(obj["r"])
    return ZrModule(Presentation(g, relations), actions)

