"""Tabulate E_2^{p,0} for BT and BGL_n and the sign-convention comparison."""
import argparse
from dataclasses import dataclass

from brstack.linalg import FgAbGroup
from brstack.torus import UnitsComplexSpec, bottom_row_cohomology, gln_bottom_row


@dataclass
class AuditConfig:
    max_rank: int = 3
    max_degree: int = 9
    gln_sizes: tuple = (1, 2, 3)


def main(cfg: AuditConfig):
    print(f"{'complex':<10} {'p':>2}  E2^(p,0)        closed form  subtracted-middle-sum")
    for k in range(0, cfg.max_rank + 1):
        rep = bottom_row_cohomology(UnitsComplexSpec(FgAbGroup.free(1), FgAbGroup.free(k), cfg.max_degree))
        for p in range(cfg.max_degree):
            cf = rep.closed_form.get(p, "-")
            disp = rep.displayed_formula_agrees.get(p, "-")
            print(f"{'T^' + str(k):<10} {p:>2}  {str(rep.e2[p]):<15} {str(cf):<12} {disp}")
    for n in cfg.gln_sizes:
        rep = gln_bottom_row(n, cfg.max_degree)
        print(f"GL{n:<8}     E2 = {[str(g) for g in rep.e2]}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-rank", type=int, default=3)
    ap.add_argument("--max-degree", type=int, default=9)
    a = ap.parse_args()
    main(AuditConfig(a.max_rank, a.max_degree))
