"""Which n-th power relation makes the Azumaya gluing identity hold, for a range of n and chart counts."""
import argparse
import time
from dataclasses import dataclass

from brstack.azumaya import (
    ORIENTATIONS,
    build_gluing,
    check_orientation,
    coboundary_class,
    determinant_torsion_bound,
)


@dataclass
class SurveyConfig:
    n_max: int = 8
    charts: tuple = (2, 3)


def main(cfg: SurveyConfig):
    for c in cfg.charts:
        for n in range(2, cfg.n_max + 1):
            t0 = time.perf_counter()
            data = build_gluing(n, c)
            status = {o: check_orientation(data, o).holds for o in ORIENTATIONS}
            good = [o for o, ok in status.items() if ok]
            line = f"charts={c} n={n}: " + ", ".join(f"[{o}] {'holds' if ok else 'fails'}" for o, ok in status.items())
            if len(good) == 1:
                cls = coboundary_class(data, good[0])
                cert = determinant_torsion_bound(data, good[0])
                line += f" | class=xi {cls.equals_xi} n-torsion {cls.n_torsion} det certificate {cert.holds}"
            print(line + f" ({time.perf_counter() - t0:.3f}s)")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--charts", type=int, nargs="+", default=[2, 3])
    a = ap.parse_args()
    main(SurveyConfig(a.n_max, tuple(a.charts)))
