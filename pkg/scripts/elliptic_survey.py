"""Group structures over small prime fields and rational torsion for a box of integer curves."""
import argparse
from collections import Counter
from dataclasses import dataclass

from brstack.elliptic import (
    BR_EQUALS,
    EllipticCurve,
    SingularCurve,
    group_structure_certified,
    rational_torsion,
)


@dataclass
class SurveyConfig:
    primes: tuple = (5, 7, 11, 13)
    box: int = 10


def main(cfg: SurveyConfig):
    for p in cfg.primes:
        shapes = Counter()
        for a in range(p):
            for b in range(p):
                try:
                    E = EllipticCurve(p, a, b)
                except SingularCurve:
                    continue
                shapes[str(group_structure_certified(E).group)] += 1
        print(f"F_{p}: {sum(shapes.values())} curves, all with nontrivial Pic^0 torsion; "
              + ", ".join(f"{g}: {c}" for g, c in sorted(shapes.items())))
    over_q = Counter()
    free = []
    for a in range(-cfg.box, cfg.box + 1):
        for b in range(-cfg.box, cfg.box + 1):
            try:
                E = EllipticCurve.over_rationals(a, b)
            except SingularCurve:
                continue
            T = rational_torsion(E)
            over_q[str(T)] += 1
            if T.is_trivial and len(free) < 5:
                free.append(str(E))
    print(f"Q, |a|,|b| <= {cfg.box}: " + ", ".join(f"{g}: {c}" for g, c in sorted(over_q.items())))
    print(f"torsion-free examples ({BR_EQUALS}): " + "; ".join(free))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", type=int, nargs="+", default=[5, 7, 11, 13])
    ap.add_argument("--box", type=int, default=10)
    a = ap.parse_args()
    main(SurveyConfig(tuple(a.primes), a.box))
