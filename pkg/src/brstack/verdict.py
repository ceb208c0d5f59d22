"""Rule engine deciding Br = Br' questions for classifying stacks.

The rules are axioms: each has a statement, machine-checked hypotheses and
an effect.  Evaluation walks the registry in order; the first rule that
reaches a conclusion decides, later rules that also fire are recorded as
corroborating.  If no rule decides, the verdict is Unknown and names the
first hypothesis that was not met.

Conclusions:
    BrEqualsBrPrime / BrNotEqual   the Brauer map of the stack is / is not onto
    SBMIHolds / SBMIFails          Br = Br' for the stack is / is not equivalent
                                   to Br = Br' for the base
    Unknown
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

from .elliptic import BR_EQUALS, BR_NOT_EQUAL, EllipticCurve, verdict_BA
from .linalg import FgAbGroup

SBMI_HOLDS = "SBMIHolds"
SBMI_FAILS = "SBMIFails"
UNKNOWN = "Unknown"
CONCLUSIONS = (BR_EQUALS, BR_NOT_EQUAL, SBMI_HOLDS, SBMI_FAILS, UNKNOWN)
TRISTATE = ("yes", "no", "unknown")

SCHEMA_ID = "brstack/v1"


class UnsupportedStack(ValueError):
    pass


class MalformedInput(ValueError):
    pass


# ---------------------------------------------------------------------------
# Inputs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchemeFlags:
    noetherian_normal: bool = False
    integral: bool = False
    regular_codim1: bool = False
    henselian_local_gms: bool = False
    br_equals_br_prime: str = "unknown"

    def __post_init__(self):
        if self.br_equals_br_prime not in TRISTATE:
            raise MalformedInput(f"br_equals_br_prime must be one of {TRISTATE}")

    @property
    def normal(self) -> bool:
        return self.noetherian_normal or (self.integral and self.regular_codim1)


@dataclass(frozen=True)
class SchemeInvariants:
    pic: FgAbGroup = field(default_factory=FgAbGroup)
    br_prime: FgAbGroup = field(default_factory=FgAbGroup)
    units_torsion: FgAbGroup = field(default_factory=FgAbGroup)
    flags: SchemeFlags = field(default_factory=SchemeFlags)
    pic_torsion: FgAbGroup | None = None

    def __post_init__(self):
        if self.pic_torsion is None:
            object.__setattr__(self, "pic_torsion", self.pic.torsion())
        elif self.pic_torsion != self.pic.torsion():
            raise MalformedInput("pic_torsion is not the torsion part of pic")
        if not self.units_torsion.is_finite:
            raise MalformedInput("units_torsion must be finite")

    def to_json(self) -> dict:
        f = self.flags
        return {
            "pic": self.pic.to_json(),
            "pic_torsion": self.pic_torsion.to_json(),
            "br_prime": self.br_prime.to_json(),
            "units_torsion": self.units_torsion.to_json(),
            "flags": {
                "noetherian_normal": f.noetherian_normal,
                "integral": f.integral,
                "regular_codim1": f.regular_codim1,
                "henselian_local_gms": f.henselian_local_gms,
                "br_equals_br_prime": f.br_equals_br_prime,
            },
        }


@dataclass(frozen=True)
class BDiscrete:
    """B of the constant group Z^rank + finite_part."""

    rank: int
    finite_part: FgAbGroup = field(default_factory=FgAbGroup)

    def __post_init__(self):
        if self.rank < 0:
            raise MalformedInput("rank must be nonnegative")
        if not self.finite_part.is_finite:
            raise MalformedInput("finite_part must be a finite group")


@dataclass(frozen=True)
class BDiagonalizable:
    """B of the diagonalizable group with the given character group."""

    characters: FgAbGroup


@dataclass(frozen=True)
class BGLn:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise MalformedInput("n must be at least 1")


@dataclass(frozen=True)
class BAbelianVariety:
    curve: EllipticCurve


@dataclass(frozen=True)
class QuotientGoodModuli:
    """[Spec A / G] with G linearly reductive and good moduli space Spec A^G."""

    description: str = ""


StackDescriptor = BDiscrete | BDiagonalizable | BGLn | BAbelianVariety | QuotientGoodModuli


def describe(d) -> dict:
    if isinstance(d, BDiscrete):
        return {"kind": "BDiscrete", "rank": d.rank, "finite_part": d.finite_part.to_json()}
    if isinstance(d, BDiagonalizable):
        return {"kind": "BDiagonalizable", "characters": d.characters.to_json()}
    if isinstance(d, BGLn):
        return {"kind": "BGLn", "n": d.n}
    if isinstance(d, BAbelianVariety):
        E = d.curve
        return {"kind": "BAbelianVariety", "field": str(E.field) if E.field else "Q",
                "a": str(E.a), "b": str(E.b)}
    if isinstance(d, QuotientGoodModuli):
        return {"kind": "QuotientGoodModuli", "description": d.description}
    raise MalformedInput(f"unknown stack descriptor {d!r}")


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Outcome:
    conclusion: str | None = None
    model: FgAbGroup | None = None
    unmet: str | None = None
    inputs: dict = field(default_factory=dict)
    via: tuple[str, ...] = ()
    note: str = ""


@dataclass(frozen=True)
class Rule:
    name: str
    statement: str
    applies: Callable
    apply: Callable


def _refine_by_base(flag: str, inputs: dict) -> str:
    # SBMI + knowledge of the base decides the stack
    inputs["base_br_equals_br_prime"] = flag
    return {"yes": BR_EQUALS, "no": BR_NOT_EQUAL}.get(flag, SBMI_HOLDS)


def _r4(d: BDiscrete, s: SchemeInvariants) -> Outcome:
    inputs = {"rank": d.rank, "finite_part": str(d.finite_part)}
    if d.rank <= 1:
        via = ("R2", "R3") if d.rank or not d.finite_part.is_trivial else ("R2",)
        return Outcome(_refine_by_base(s.flags.br_equals_br_prime, inputs), inputs=inputs, via=via)
    return Outcome(SBMI_FAILS, inputs=inputs)


def _r5(d: BDiagonalizable, s: SchemeInvariants) -> Outcome:
    inputs = {"characters": str(d.characters), "base_normal": s.flags.normal}
    note = ""
    if d.characters.rank and not s.flags.normal:
        note = "unchecked axiom: H^1 of the base with coefficients in the character sheaf is torsion-free"
    via = ("R1",) if d.characters.invariant_factors else ()
    return Outcome(_refine_by_base(s.flags.br_equals_br_prime, inputs), inputs=inputs, via=via, note=note)


def _r6(d: BGLn, s: SchemeInvariants) -> Outcome:
    f = s.flags
    inputs = {"n": d.n, "noetherian_normal": f.noetherian_normal,
              "integral": f.integral, "regular_codim1": f.regular_codim1}
    if not f.normal:
        return Outcome(unmet="missing normality: base must be noetherian normal "
                             "(or integral and regular in codimension 1)", inputs=inputs)
    return Outcome(_refine_by_base(f.br_equals_br_prime, inputs), inputs=inputs, via=("R2",))


def _r7(d: BDiscrete, s: SchemeInvariants) -> Outcome:
    inputs = {"rank": d.rank, "pic": str(s.pic), "br_prime": str(s.br_prime),
              "units_torsion": str(s.units_torsion), "finite_part": str(d.finite_part)}
    if d.rank != 2 or not d.finite_part.is_trivial:
        return Outcome(unmet="formula needs the group Z^2", inputs=inputs)
    if not s.pic.is_trivial:
        return Outcome(unmet="formula needs Pic of the base to vanish", inputs=inputs)
    return Outcome(model=s.br_prime + s.units_torsion, inputs=inputs)


def _r8(d: QuotientGoodModuli, s: SchemeInvariants) -> Outcome:
    inputs = {"henselian_local_gms": s.flags.henselian_local_gms}
    if not s.flags.henselian_local_gms:
        return Outcome(unmet="missing hypothesis: ring of invariants henselian local", inputs=inputs)
    return Outcome(BR_EQUALS, inputs=inputs)


def _r9(d: BAbelianVariety, s: SchemeInvariants) -> Outcome:
    v = verdict_BA(d.curve)
    inputs = {"curve": str(d.curve), "pic0_torsion": str(v.torsion)}
    return Outcome(v.conclusion, model=s.br_prime + v.torsion, inputs=inputs)


def _never(d, s):
    raise AssertionError("cited rule is not applied on its own")


REGISTRY: tuple[Rule, ...] = (
    Rule("R1", "Br = Br' descends along finite, flat, finitely presented, surjective morphisms",
         lambda d: False, _never),
    Rule("R2", "if G -> S admits a section, Br(S) and Br'(S) are compatible direct summands of Br(BG) and Br'(BG)",
         lambda d: False, _never),
    Rule("R3", "for a finite flat group G_3 -> S, BG_3 -> S satisfies SBMI",
         lambda d: False, _never),
    Rule("R4", "for G = Z^r + finite constant group, BG satisfies SBMI iff r <= 1",
         lambda d: isinstance(d, BDiscrete), _r4),
    Rule("R5", "the classifying stack of a diagonalizable group of finite type satisfies SBMI",
         lambda d: isinstance(d, BDiagonalizable), _r5),
    Rule("R6", "over a noetherian normal base, Br = Br' for BGL_n iff Br = Br' for the base",
         lambda d: isinstance(d, BGLn), _r6),
    Rule("R7", "for BZ^2 over S with Pic(S) = 0, Br'(BZ^2) = Br'(S) + (units of S)_tors",
         lambda d: isinstance(d, BDiscrete) and d.rank >= 2, _r7),
    Rule("R8", "a quotient stack whose good moduli space has henselian local coordinate ring has Br = Br'",
         lambda d: isinstance(d, QuotientGoodModuli), _r8),
    Rule("R9", "for an abelian variety A over a field k, Br = Br' for BA iff Pic^0_{A/k}(k) is torsion-free",
         lambda d: isinstance(d, BAbelianVariety), _r9),
)
RULES = {r.name: r for r in REGISTRY}


@dataclass(frozen=True)
class TraceStep:
    rule: str
    anchor: str
    inputs: dict
    via: tuple[str, ...]
    effect: str
    role: str  # decisive | corroborating | model | unmet

    def to_json(self) -> dict:
        return {"rule": self.rule, "anchor": self.anchor, "inputs": _jsonable(self.inputs),
                "via": [{"rule": v, "anchor": RULES[v].statement} for v in self.via],
                "effect": self.effect, "role": self.role}


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    return str(x)


@dataclass(frozen=True)
class Verdict:
    conclusion: str
    br_prime_model: FgAbGroup | None = None
    trace: tuple[TraceStep, ...] = ()
    missing: str | None = None

    def to_json(self) -> dict:
        return {
            "conclusion": self.conclusion,
            "br_prime_model": self.br_prime_model.to_json() if self.br_prime_model is not None else None,
            "missing_hypothesis": self.missing,
            "trace": [t.to_json() for t in self.trace],
        }


def _effect(o: Outcome) -> str:
    if o.unmet:
        return f"unmet: {o.unmet}"
    parts = []
    if o.conclusion:
        parts.append(o.conclusion)
    if o.model is not None:
        parts.append(f"Br' model {o.model}")
    if o.note:
        parts.append(o.note)
    return "; ".join(parts)


def _fold(steps: list[tuple[Rule, Outcome]]) -> Verdict:
    trace, decided, model, missing = [], None, None, None
    for rule, o in steps:
        if o.unmet:
            role = "unmet"
            missing = missing or o.unmet
        elif o.conclusion and decided is None:
            role, decided = "decisive", o.conclusion
        elif o.conclusion:
            role = "corroborating"
        else:
            role = "model"
        if o.model is not None:
            model = o.model
        trace.append(TraceStep(rule.name, rule.statement, dict(o.inputs), o.via, _effect(o), role))
    if decided is None:
        return Verdict(UNKNOWN, model, tuple(trace), missing or "no rule applies")
    return Verdict(decided, model, tuple(trace), None)


def evaluate(d, s: SchemeInvariants) -> Verdict:
    describe(d)  # well-formedness
    steps = [(rule, rule.apply(d, s)) for rule in REGISTRY if rule.applies(d)]
    v = _fold(steps)
    if v.br_prime_model is None and v.conclusion != UNKNOWN:
        try:
            model, _ = br_prime_of_classifying(d, s)
            v = replace(v, br_prime_model=model)
        except UnsupportedStack:
            pass
    return v


def replay(v: Verdict, d, s: SchemeInvariants) -> Verdict:
    """Re-apply the rules named in the trace and rebuild the verdict."""
    steps = []
    for step in v.trace:
        if step.rule not in RULES:
            raise ValueError(f"trace names an unregistered rule {step.rule}")
        rule = RULES[step.rule]
        o = rule.apply(d, s)
        if _effect(o) != step.effect:
            raise ValueError(f"replaying {step.rule} gave {_effect(o)!r}, trace says {step.effect!r}")
        steps.append((rule, o))
    out = _fold(steps)
    if out.br_prime_model is None and v.br_prime_model is not None:
        out = replace(out, br_prime_model=br_prime_of_classifying(d, s)[0])
    return out


def br_prime_of_classifying(d, s: SchemeInvariants) -> tuple[FgAbGroup, list[str]]:
    """A model of Br' of the classifying stack, with the facts used."""
    if isinstance(d, BDiscrete) and d.finite_part.is_trivial:
        if d.rank == 0:
            return s.br_prime, ["BG = S"]
        if d.rank == 1:
            return s.pic_torsion + s.br_prime, [
                "0 -> Pic(S)_tors -> Br'(BZ_S) -> Br'(S) -> 0, split by the section of BZ_S -> S"]
        if d.rank == 2 and s.pic.is_trivial:
            return s.br_prime + s.units_torsion, [RULES["R7"].statement]
    if isinstance(d, BDiagonalizable) and not d.characters.invariant_factors:
        if s.flags.normal:
            return s.br_prime, ["bottom row E_2^{p,0} vanishes for p >= 2 and the higher rows contribute nothing in degree 2 over a normal base"]
        raise UnsupportedStack("torus over a non-normal base")
    if isinstance(d, BGLn):
        if s.flags.normal and (s.flags.integral or s.flags.noetherian_normal):
            return s.br_prime, ["pullback Br'(S) -> Br'(BGL_n) is an isomorphism over a normal integral base"]
        raise UnsupportedStack("BGL_n needs a normal integral base")
    if isinstance(d, BAbelianVariety):
        T = verdict_BA(d.curve).torsion
        return s.br_prime + T, ["Br'(BA) = Br(k) + torsion of Pic^0_{A/k}(k)"]
    raise UnsupportedStack(f"no Br' model for {describe(d)['kind']} with these invariants")


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def _group(obj, what: str) -> FgAbGroup:
    if obj is None:
        return FgAbGroup()
    try:
        return FgAbGroup.from_json(obj)
    except (ValueError, TypeError) as exc:
        raise MalformedInput(f"bad group for {what}: {exc}") from exc


def _int(obj, what: str) -> int:
    try:
        return int(str(obj))
    except ValueError as exc:
        raise MalformedInput(f"{what} must be an integer") from exc


def descriptor_from_json(obj: dict):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise MalformedInput("stack must be an object with a 'kind'")
    kind = obj["kind"]
    if kind == "BDiscrete":
        return BDiscrete(_int(obj.get("rank", 0), "rank"), _group(obj.get("finite_part"), "finite_part"))
    if kind == "BDiagonalizable":
        return BDiagonalizable(_group(obj.get("characters"), "characters"))
    if kind == "BGLn":
        return BGLn(_int(obj.get("n"), "n"))
    if kind == "BAbelianVariety":
        fld = str(obj.get("field", "Q"))
        p = 0 if fld in ("Q", "0") else _int(fld, "field")
        return BAbelianVariety(EllipticCurve(p, _int(obj.get("a"), "a"), _int(obj.get("b"), "b")))
    if kind == "QuotientGoodModuli":
        return QuotientGoodModuli(str(obj.get("description", "")))
    raise MalformedInput(f"unknown stack kind {kind!r}")


def invariants_from_json(obj: dict) -> SchemeInvariants:
    if not isinstance(obj, dict):
        raise MalformedInput("base must be an object")
    fl = obj.get("flags", {}) or {}
    known = {"noetherian_normal", "integral", "regular_codim1", "henselian_local_gms", "br_equals_br_prime"}
    extra = set(fl) - known
    if extra:
        raise MalformedInput(f"unknown flags {sorted(extra)}")
    for k in known - {"br_equals_br_prime"}:
        if k in fl and not isinstance(fl[k], bool):
            raise MalformedInput(f"flag {k} must be true or false")
    flags = SchemeFlags(**fl)
    pt = obj.get("pic_torsion")
    return SchemeInvariants(
        pic=_group(obj.get("pic"), "pic"),
        br_prime=_group(obj.get("br_prime"), "br_prime"),
        units_torsion=_group(obj.get("units_torsion"), "units_torsion"),
        flags=flags,
        pic_torsion=None if pt is None else _group(pt, "pic_torsion"),
    )


def document_from_json(doc: dict):
    if not isinstance(doc, dict):
        raise MalformedInput("document must be a JSON object")
    schema = doc.get("schema", SCHEMA_ID)
    if schema != SCHEMA_ID:
        raise MalformedInput(f"unsupported schema {schema!r}, expected {SCHEMA_ID!r}")
    if "stack" not in doc:
        raise MalformedInput("document needs a 'stack' entry")
    return descriptor_from_json(doc["stack"]), invariants_from_json(doc.get("base", {}))


def verdict_report(d, s: SchemeInvariants) -> dict:
    v = evaluate(d, s)
    replayed = replay(v, d, s)
    out = {"stack": describe(d), "base": s.to_json()}
    out.update(v.to_json())
    out["replay_matches"] = replayed == v
    return out
