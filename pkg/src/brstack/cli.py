"""Command-line driver.  Every subcommand prints one JSON report.

Exit codes: 0 ok, 1 a checked identity is violated, 2 bad input, 3 verdict Unknown.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import azumaya, elliptic, gln, torus, verdict
from .cohomology import ZrModule, group_cohomology, koszul_cochain_complex, module_from_json
from .linalg import FgAbGroup, IntMatrix, group_invariants, smith_normal_form
from .rings import BaseRing

SCHEMA_ID = verdict.SCHEMA_ID

EXIT_OK, EXIT_VIOLATED, EXIT_BAD_INPUT, EXIT_UNKNOWN = 0, 1, 2, 3

ANCHORS = {
    "snf": ["U M V = S with U, V unimodular and S diagonal with d1 | d2 | ..."],
    "group-cohomology": [
        "H^p(Z^r, M) is the cohomology of the Koszul complex Hom(K_p, M), "
        "K the Koszul resolution of Z over Z[Z^r]",
    ],
    "torus-complex": [
        "bottom row of the descent spectral sequence of BT: E_1^{p,0} = units of T^p = U + M^p",
        "differential = alternating sum of the p + 2 coface maps",
    ],
    "gln-bottom-row": [
        "units of GL_n^p over an integral base are A^x + Z^p, the i-th generator det of the i-th factor",
        "det(gh) = det(g) det(h) identifies the complex with the one for BG_m",
    ],
    "azumaya": [
        "End(O + L + .. + L^(n-1)) glued by D_ab M_a D_ab^-1 = xi_ab M_b",
        "taking determinants: det M_a = u^n det M_b, so the class is n-torsion",
    ],
    "gln-units": [
        "A^x x Z -> units of A[X, 1/det], (a, m) -> a det^m, is an isomorphism iff A is reduced",
        "det is a nonzerodivisor in A[X] for every base ring A",
    ],
    "elliptic": [elliptic.PIC0_IS_POINTS, elliptic.BA_CRITERION, elliptic.BA_DECOMPOSITION],
    "verdict": [],
}


class BadInput(ValueError):
    pass


@dataclass
class RunRequest:
    subcommand: str
    params: dict = field(default_factory=dict)
    output: str | None = None


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _load_json(text: str | None, path: str | None):
    if path is not None:
        try:
            if path == "-":
                text = sys.stdin.read()
            else:
                with open(path, encoding="utf-8") as fh:
                    text = fh.read()
        except OSError as exc:
            raise BadInput(f"cannot read {path}: {exc}") from exc
    if text is None:
        raise BadInput("no JSON input given")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadInput(f"malformed JSON: {exc}") from exc


def _stringify(x):
    """Integers become decimal strings; bools stay bools."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _stringify(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_stringify(v) for v in x]
    return x


def render(report: dict) -> str:
    return json.dumps(_stringify(report), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _envelope(command: str, body: dict) -> dict:
    anchors = list(ANCHORS[command])
    if command == "verdict":
        # the statements of the rules the trace actually used
        for step in body.get("trace", []):
            for text in [step["anchor"]] + [v["anchor"] for v in step["via"]]:
                if text not in anchors:
                    anchors.append(text)
    return {"schema": SCHEMA_ID, "command": command, "anchors": anchors, "report": body}


# ---------------------------------------------------------------------------
# subcommands: each returns (exit code, report body)
# ---------------------------------------------------------------------------

def cmd_snf(p: dict):
    obj = _load_json(p.get("matrix"), p.get("input"))
    if isinstance(obj, dict):
        obj = obj.get("matrix")
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise BadInput("matrix must be a nonempty list of rows")
    M = IntMatrix.from_json(obj)
    snf = smith_normal_form(M)
    ok = (snf.U @ M @ snf.V) == snf.S and abs(snf.U.det()) == 1 and abs(snf.V.det()) == 1
    cok = group_invariants(M.rows, M.T) if M.rows else FgAbGroup()
    body = {
        "shape": list(M.shape),
        "input": M.to_json(),
        "diagonal": [str(d) for d in snf.diagonal],
        "invariant_factors": [str(d) for d in snf.diagonal if d],
        "rank": snf.rank,
        "U": snf.U.to_json(),
        "V": snf.V.to_json(),
        "S": snf.S.to_json(),
        "cokernel": cok.to_json(),
        "verified": ok,
    }
    return (EXIT_OK if ok else EXIT_VIOLATED), body


def cmd_group_cohomology(p: dict):
    if p.get("module") is not None or p.get("input") is not None:
        obj = _load_json(p.get("module"), p.get("input"))
        try:
            M = module_from_json(obj)
        except (KeyError, TypeError) as exc:
            raise BadInput(f"bad module description: {exc}") from exc
    else:
        group = FgAbGroup.from_json(_load_json(p.get("group") or "[0]", None))
        M = ZrModule.trivial(group, p.get("rank") or 2)
    C = koszul_cochain_complex(M)
    H = group_cohomology(M)
    body = {
        "r": M.r,
        "module": {"generators": M.underlying.generators,
                   "relations": M.underlying.relations.to_json(),
                   "underlying_group": M.underlying.invariants().to_json(),
                   "actions": [T.to_json() for T in M.actions]},
        "differentials": [d.matrix.to_json() for d in C.differentials],
        "cohomology": [{"degree": i, "group": g.to_json()} for i, g in enumerate(H)],
    }
    return EXIT_OK, body


def _bottom_row_body(report: torus.BottomRowReport, audit: bool) -> tuple[int, dict]:
    body = report.to_json(audit)
    ok = all(report.closed_form.values()) and body["blocks_separate"]
    body["degree_one_note"] = (
        "E_2^{1,0} is the character lattice M, not 0: d^0 vanishes and d^1 is zero on the M-part"
        if report.spec.max_degree > 1 else ""
    )
    return (EXIT_OK if ok else EXIT_VIOLATED), body


def cmd_torus_complex(p: dict):
    units = FgAbGroup.from_json(_load_json(p.get("units") or "[0]", None))
    spec = torus.UnitsComplexSpec(units, FgAbGroup.free(p["rank"]), p["max_degree"])
    return _bottom_row_body(torus.bottom_row_cohomology(spec), p.get("audit", False))


def cmd_gln_bottom_row(p: dict):
    units = FgAbGroup.from_json(_load_json(p.get("units") or "[0]", None))
    g = torus.gln_bottom_row(p["n"], p["max_degree"], units)
    ref = torus.bottom_row_cohomology(torus.UnitsComplexSpec(units, FgAbGroup.free(1), p["max_degree"]))
    code, body = _bottom_row_body(g, p.get("audit", False))
    same = all(a.matrix == b.matrix for a, b in zip(g.differentials, ref.differentials)) and g.e2 == ref.e2
    body["matches_rank_one_torus"] = same
    if p["n"] <= 3:
        body["det_multiplicative_checked"] = gln.det_is_multiplicative(p["n"])
        same = same and body["det_multiplicative_checked"]
    return (code if same else EXIT_VIOLATED), body


def cmd_azumaya(p: dict):
    body = azumaya.gluing_report(p["n"], p["charts"])
    ok = body["identity"]["holds"] and body["triple_overlap_consistent"] and body["conjugation_fixes_scalars"]
    if ok:
        ok = body["coboundary_class"]["equals_xi"] and body["determinant_certificate"]["holds"]
    return (EXIT_OK if ok else EXIT_VIOLATED), body


def cmd_gln_units(p: dict):
    try:
        base = BaseRing.parse(p["base"])
    except ValueError as exc:
        raise BadInput(str(exc)) from exc
    try:
        body = gln.units_report(base, p["n"], p["w"], p["w_inv"])
    except gln.NotAUnit as exc:
        return EXIT_VIOLATED, {"base": str(base), "n": p["n"], "error": f"not a unit: {exc}"}
    body["nonzerodivisor_probe"] = gln.det_nonzerodivisor_probe(base, p["n"], p.get("samples", 20))
    return EXIT_OK, body


def cmd_elliptic(p: dict):
    fld = str(p["field"])
    if fld.upper() == "Q":
        E = elliptic.EllipticCurve.over_rationals(p["a"], p["b"])
    else:
        try:
            q = int(fld)
        except ValueError as exc:
            raise BadInput(f"--field must be a prime or Q, got {fld!r}") from exc
        E = elliptic.EllipticCurve(q, p["a"], p["b"])
    return EXIT_OK, elliptic.curve_report(E)


def cmd_verdict(p: dict):
    doc = _load_json(p.get("json"), p.get("input"))
    d, s = verdict.document_from_json(doc)
    body = verdict.verdict_report(d, s)
    if not body["replay_matches"]:
        return EXIT_VIOLATED, body
    return (EXIT_UNKNOWN if body["conclusion"] == verdict.UNKNOWN else EXIT_OK), body


COMMANDS = {
    "snf": cmd_snf,
    "group-cohomology": cmd_group_cohomology,
    "torus-complex": cmd_torus_complex,
    "gln-bottom-row": cmd_gln_bottom_row,
    "azumaya": cmd_azumaya,
    "gln-units": cmd_gln_units,
    "elliptic": cmd_elliptic,
    "verdict": cmd_verdict,
}


def run(request: RunRequest) -> tuple[int, str]:
    """Dispatch; returns (exit code, text written)."""
    if request.subcommand not in COMMANDS:
        return EXIT_BAD_INPUT, render({"schema": SCHEMA_ID, "error": f"unknown subcommand {request.subcommand}"})
    try:
        code, body = COMMANDS[request.subcommand](request.params)
    except (BadInput, verdict.MalformedInput, elliptic.SingularCurve, gln.SizeBoundExceeded) as exc:
        return EXIT_BAD_INPUT, render({"schema": SCHEMA_ID, "command": request.subcommand, "error": str(exc)})
    except (ValueError, KeyError, TypeError) as exc:
        return EXIT_BAD_INPUT, render({"schema": SCHEMA_ID, "command": request.subcommand,
                                       "error": f"{type(exc).__name__}: {exc}"})
    return code, render(_envelope(request.subcommand, body))


# ---------------------------------------------------------------------------
# argparse
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="brstack", description=__doc__.splitlines()[0])
    ap.add_argument("-o", "--output", help="write the report here instead of stdout")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("snf", help="Smith normal form of an integer matrix")
    s.add_argument("--matrix", help="JSON list of rows, e.g. '[[2,4],[6,8]]'")
    s.add_argument("--input", help="JSON file with a matrix ('-' for stdin)")

    s = sub.add_parser("group-cohomology", help="H^*(Z^r, M) via the Koszul complex")
    s.add_argument("--module", help="JSON module: generators, relations, actions")
    s.add_argument("--input", help="JSON module file ('-' for stdin)")
    s.add_argument("--group", help="trivial-action module given as cyclic orders, e.g. '[12]' or '[0,0]'")
    s.add_argument("--rank", type=int, help="r for a trivial action (default 2)")

    s = sub.add_parser("torus-complex", help="bottom row E_2^{p,0} for BT")
    s.add_argument("--rank", type=int, required=True, help="rank of the character lattice")
    s.add_argument("--max-degree", type=int, default=6)
    s.add_argument("--units", help="global units as cyclic orders (default '[0]' = Z)")
    s.add_argument("--audit", action="store_true", help="include full differential matrices")

    s = sub.add_parser("gln-bottom-row", help="bottom row E_2^{p,0} for BGL_n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--max-degree", type=int, default=6)
    s.add_argument("--units", help="global units as cyclic orders (default '[0]' = Z)")
    s.add_argument("--audit", action="store_true")

    s = sub.add_parser("azumaya", help="check the Azumaya gluing identity")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--charts", type=int, default=2)

    s = sub.add_parser("gln-units", help="recognize a unit of A[X, 1/det] as a det^m")
    s.add_argument("--base", default="ZZ", help="ZZ, ZZ/m, GF(p) or e.g. 'ZZ[a]/(a^2)'")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--w", required=True, help="unit, e.g. '7*det^3' or 'det + a'")
    s.add_argument("--w-inv", required=True, help="its inverse, e.g. '(det - a)*det^-2'")
    s.add_argument("--samples", type=int, default=20, help="nonzerodivisor probe size")

    s = sub.add_parser("elliptic", help="Br = Br' verdict for BE, E an elliptic curve")
    s.add_argument("--field", required=True, help="a prime p >= 5, or Q")
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--b", type=int, required=True)

    s = sub.add_parser("verdict", help="run the rule engine on a JSON document")
    s.add_argument("--input", help="document file ('-' for stdin)")
    s.add_argument("--json", help="document given inline")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k not in ("subcommand", "output")}
    code, text = run(RunRequest(args.subcommand, params, args.output))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stream = sys.stdout if code in (EXIT_OK, EXIT_UNKNOWN, EXIT_VIOLATED) else sys.stderr
        stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
