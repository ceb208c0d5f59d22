"""Units of A[X, 1/det] that are or are not of the form a * det^m, across base rings."""
import argparse
from dataclasses import dataclass

from brstack.gln import DetRingElement, NotImage, det_nonzerodivisor_probe, recognize_phi_image
from brstack.rings import BaseRing

CASES = [
    ("GF(11)", "7*det^3", "8*det^-3"),
    ("ZZ", "-det^-2", "-det^2"),
    ("ZZ[a]/(a^2)", "det + a", "(det - a)*det^-2"),
    ("ZZ/4", "det + 2", "(det - 2)*det^-2"),
    ("ZZ/6", "3*det + 4", "3*det^-1 + 4"),
    ("ZZ/9", "det + 3*X12", "(det - 3*X12)*det^-2"),
]


@dataclass
class ProbeConfig:
    n: int = 2
    samples: int = 30


def main(cfg: ProbeConfig):
    for base_text, w_text, w_inv_text in CASES:
        base = BaseRing.parse(base_text)
        w = DetRingElement.parse(w_text, base, cfg.n)
        w_inv = DetRingElement.parse(w_inv_text, base, cfg.n)
        res = recognize_phi_image(w, w_inv)
        label = f"NotImage ({res.stage})" if isinstance(res, NotImage) else str(res)
        probe = det_nonzerodivisor_probe(base, cfg.n, cfg.samples)
        print(f"{base_text:<12} reduced={str(base.is_reduced):<5} w={w_text:<14} -> {label:<32} "
              f"det nonzerodivisor counterexamples: {len(probe['counterexamples'])}/{probe['checked']}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--samples", type=int, default=30)
    a = ap.parse_args()
    main(ProbeConfig(a.n, a.samples))
