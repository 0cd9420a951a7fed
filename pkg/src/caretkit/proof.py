"""Hilbert-style proof scripts and their checker.

Five systems are supported: 'ax' (infinite traces, the classical axioms),
'ax-gen' (finite and infinite traces, with the strong-next weakenings),
'ax-inf' and 'ax-fin' (ax-gen pinned to one class by an extra axiom), and
'ax-cr' (the call/return logic).  A script names its system, then numbered
steps each carrying a formula and a single-rule justification: an explicit
axiom instance, a propositional tautology, modus ponens, next
generalisation, or until induction (plus the abstract-operator variants of
the last two, admissible under 'ax-cr' only).

Tautology checking abstracts every maximal subformula whose head is not
negation, conjunction or the constant true into a fresh letter and decides
by exhaustive valuation, so temporal structure never leaks into the
propositional layer.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    AbsUntil, AbsWeakNext, And, FALSE, Formula, Not, ParseError, Prop, TRUE,
    TrueConst, Until, WeakNext, abs_strong_next, always, eventually, iff,
    implies, is_ltl, lor, parse_formula, strong_next,
)

__all__ = [
    "SYSTEM_IDS", "ProofError", "ProofFormatError", "Schema",
    "AxiomInstance", "Taut", "MP", "GenNext", "IndUntil", "GenAbsNext",
    "IndAbsUntil", "ProofStep", "ProofScript", "Verdict",
    "expand_cr", "check_tautology", "build_schema_instance",
    "check_axiom_instance", "check_proof", "list_axioms", "parse_proof",
    "axiom_schemas", "SCHEMAS",
]

_CALL = Prop("call")
_RET = Prop("ret")
_INT = Prop("int")

MAX_TAUT_LETTERS = 20


class ProofError(Exception):
    """A malformed proof obligation: bad schema, parameter or binding."""


class ProofFormatError(Exception):
    """A proof file that does not parse."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


# ---------------------------------------------------------------------------
# The call/return counting family.

def expand_cr(c: int, m: int, n: int, f: Formula) -> Formula:
    """The counting formula: between here and the first f-state there are
    exactly m calls and n returns, never dipping more than c returns below
    par.  Defined for c, m, n >= 0 with c + m >= n."""
    if c < 0 or m < 0 or n < 0 or c + m < n:
        raise ValueError(
            f"parameter violation: need c,m,n >= 0 and c+m >= n, got {(c, m, n)}")
    if m == 0 and n == 0:
        return Until(_INT, f)
    call_branch = None
    if m > 0:
        call_branch = Until(
            _INT, And(_CALL, WeakNext(expand_cr(c + 1, m - 1, n, f))))
    if n == 0 or (m > 0 and c == 0):
        return call_branch
    ret_branch = Until(
        _INT, And(_RET, WeakNext(expand_cr(c - 1, m, n - 1, f))))
    if m == 0:
        return ret_branch
    return lor(call_branch, ret_branch)


# ---------------------------------------------------------------------------
# Propositional tautology checking under maximal-subformula abstraction.

def check_tautology(f: Formula, max_letters: int = MAX_TAUT_LETTERS) -> bool:
    """True iff f is a tautology once every maximal subformula not headed by
    negation, conjunction or true is treated as an opaque letter."""
    letters: list[Formula] = []
    seen: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        t = type(g)
        if t is Not:
            stack.append(g.operand)
        elif t is And:
            stack.append(g.left)
            stack.append(g.right)
        elif t is not TrueConst and g not in seen:
            seen.add(g)
            letters.append(g)
    if len(letters) > max_letters:
        raise ProofError(
            f"tautology check abstracts to {len(letters)} letters, "
            f"the cap is {max_letters}")

    # truth table columns as bit masks over all valuations
    n = 1 << len(letters)
    full = (1 << n) - 1
    masks: dict[Formula, int] = {}
    for j, g in enumerate(letters):
        block = 1 << j
        rep = ((1 << block) - 1) << block
        width = block * 2
        while width < n:
            rep |= rep << width
            width *= 2
        masks[g] = rep

    memo: dict[Formula, int] = {}

    def column(g: Formula) -> int:
        got = memo.get(g)
        if got is not None:
            return got
        t = type(g)
        if t is TrueConst:
            v = full
        elif t is Not:
            v = full ^ column(g.operand)
        elif t is And:
            v = column(g.left) & column(g.right)
        else:
            v = masks[g]
        memo[g] = v
        return v

    return column(f) == full


# ---------------------------------------------------------------------------
# Axiom schemas.

@dataclass(frozen=True)
class Schema:
    name: str
    metavars: tuple[str, ...]
    params: tuple[str, ...]
    text: str

    def build(self, params: dict[str, int], bindings: dict[str, Formula]) -> Formula:
        for v in self.metavars:
            if v not in bindings:
                raise ProofError(f"missing binding {v} for schema {self.name}")
        for v in bindings:
            if v not in self.metavars:
                raise ProofError(f"unexpected binding {v} for schema {self.name}")
        for v in self.params:
            if v not in params:
                raise ProofError(f"missing parameter {v} for schema {self.name}")
        for v in params:
            if v not in self.params:
                raise ProofError(f"unexpected parameter {v} for schema {self.name}")
        return _BUILDERS[self.name](params, bindings)


def _next_t1(nx):
    return lambda p, b: implies(
        And(nx(b["phi"]), nx(implies(b["phi"], b["psi"]))), nx(b["psi"]))


def _unfold(until, nxt):
    def make(p, b):
        u = until(b["phi"], b["psi"])
        return iff(u, lor(b["psi"], And(b["phi"], nxt(u))))
    return make


def _next_choice(nx, snx):
    return lambda p, b: iff(nx(b["phi"]), lor(nx(FALSE), snx(b["phi"])))


def _c5(p, b):
    n = p["n"]
    if n < 0:
        raise ProofError("parameter violation: C5 needs n >= 0")
    body = expand_cr(0, n, n, And(_RET, b["phi"]))
    return implies(And(_CALL, WeakNext(body)), abs_strong_next(b["phi"]))


def _c6(p, b):
    m, n = p["m"], p["n"]
    if not m > n >= 0:
        raise ProofError("parameter violation: C6 needs m > n >= 0")
    body = expand_cr(0, m, n, always(Not(_RET)))
    return implies(And(_CALL, WeakNext(body)), AbsWeakNext(FALSE))


_C1_FORM = lor(
    lor(And(And(_CALL, Not(_RET)), Not(_INT)),
        And(And(Not(_CALL), _RET), Not(_INT))),
    And(And(Not(_CALL), Not(_RET)), _INT))

_BUILDERS = {
    "T1": _next_t1(WeakNext),
    "T2": _unfold(Until, WeakNext),
    "T3": lambda p, b: implies(WeakNext(Not(b["phi"])), Not(WeakNext(b["phi"]))),
    "T2'": _unfold(Until, strong_next),
    "T3'": _next_choice(WeakNext, strong_next),
    "Inf": lambda p, b: Not(WeakNext(FALSE)),
    "Fin": lambda p, b: eventually(WeakNext(FALSE)),
    "G1": _next_t1(WeakNext),
    "G2": _unfold(Until, strong_next),
    "G3": _next_choice(WeakNext, strong_next),
    "G4": lambda p, b: Not(WeakNext(FALSE)),
    "A1": _next_t1(AbsWeakNext),
    "A2": _unfold(AbsUntil, abs_strong_next),
    "A3": _next_choice(AbsWeakNext, abs_strong_next),
    "C1": lambda p, b: _C1_FORM,
    "C2": lambda p, b: implies(And(Not(_CALL), WeakNext(Not(_RET))),
                               iff(WeakNext(b["phi"]), abs_strong_next(b["phi"]))),
    "C3": lambda p, b: implies(And(Not(_CALL), WeakNext(_RET)),
                               AbsWeakNext(FALSE)),
    "C4": lambda p, b: implies(abs_strong_next(b["phi"]), eventually(b["phi"])),
    "C5": _c5,
    "C6": _c6,
}

SCHEMAS: dict[str, Schema] = {}
for _name, _mv, _pv, _text in [
    ("T1", ("phi", "psi"), (), "X phi & X (phi -> psi) -> X psi"),
    ("T2", ("phi", "psi"), (), "(phi U psi) <-> (psi | (phi & X (phi U psi)))"),
    ("T3", ("phi",), (), "X !phi -> !(X phi)"),
    ("T2'", ("phi", "psi"), (), "(phi U psi) <-> (psi | (phi & N (phi U psi)))"),
    ("T3'", ("phi",), (), "X phi <-> (X false | N phi)"),
    ("Inf", (), (), "!(X false)"),
    ("Fin", (), (), "F (X false)"),
    ("G1", ("phi", "psi"), (), "X phi & X (phi -> psi) -> X psi"),
    ("G2", ("phi", "psi"), (), "(phi U psi) <-> (psi | (phi & N (phi U psi)))"),
    ("G3", ("phi",), (), "X phi <-> (X false | N phi)"),
    ("G4", (), (), "!(X false)"),
    ("A1", ("phi", "psi"), (), "Xa phi & Xa (phi -> psi) -> Xa psi"),
    ("A2", ("phi", "psi"), (), "(phi Ua psi) <-> (psi | (phi & Na (phi Ua psi)))"),
    ("A3", ("phi",), (), "Xa phi <-> (Xa false | Na phi)"),
    ("C1", (), (), "(call & !ret & !int) | (!call & ret & !int) | (!call & !ret & int)"),
    ("C2", ("phi",), (), "!call & X !ret -> (X phi <-> Na phi)"),
    ("C3", (), (), "!call & X ret -> Xa false"),
    ("C4", ("phi",), (), "Na phi -> F phi"),
    ("C5", ("phi",), ("n",), "call & X CR[0,n,n](ret & phi) -> Na phi  (family, n >= 0)"),
    ("C6", (), ("m", "n"), "call & X CR[0,m,n](G !ret) -> Xa false  (family, m > n >= 0)"),
]:
    SCHEMAS[_name] = Schema(_name, _mv, _pv, _text)

_SYSTEM_SCHEMAS: dict[str, tuple[str, ...]] = {
    "ax": ("T1", "T2", "T3"),
    "ax-gen": ("T1", "T2'", "T3'"),
    "ax-inf": ("T1", "T2'", "T3'", "Inf"),
    "ax-fin": ("T1", "T2'", "T3'", "Fin"),
    "ax-cr": ("G1", "G2", "G3", "G4", "A1", "A2", "A3",
              "C1", "C2", "C3", "C4", "C5", "C6"),
}

SYSTEM_IDS = tuple(_SYSTEM_SCHEMAS)


def axiom_schemas(system: str) -> tuple[str, ...]:
    """The axiom schema names admissible in a system (rules excluded)."""
    if system not in _SYSTEM_SCHEMAS:
        raise ValueError(f"unknown system {system!r}")
    return _SYSTEM_SCHEMAS[system]


def build_schema_instance(schema: str, params: dict[str, int],
                          bindings: dict[str, Formula]) -> Formula:
    """Instantiate a schema template, desugared to the core syntax."""
    if schema not in SCHEMAS:
        raise ProofError(f"unknown schema {schema!r}")
    return SCHEMAS[schema].build(dict(params), dict(bindings))


def check_axiom_instance(system: str, schema: str, params: dict[str, int],
                         bindings: dict[str, Formula], f: Formula) -> bool:
    """True iff f is structurally the schema instance under the bindings,
    with the schema admissible in the system."""
    if system not in _SYSTEM_SCHEMAS:
        raise ValueError(f"unknown system {system!r}")
    if schema not in _SYSTEM_SCHEMAS[system]:
        raise ProofError(f"schema {schema} is not admissible in {system}")
    return build_schema_instance(schema, params, bindings) == f


def list_axioms(system: str) -> tuple[tuple[str, str], ...]:
    """The admissible schemas and rules of a system, with template texts."""
    if system not in _SYSTEM_SCHEMAS:
        raise ValueError(f"unknown system {system!r}")
    out = [("Prop", "all instances of propositional tautologies"),
           ("MP", "from phi and phi -> psi infer psi")]
    if system == "ax-cr":
        for s in ("G1", "G2", "G3", "G4"):
            out.append((s, SCHEMAS[s].text))
        out.append(("RG1", "from phi infer X phi"))
        out.append(("RG2", "from phi' -> (!psi & X phi') infer phi' -> !(phi U psi)"))
        for s in ("A1", "A2", "A3"):
            out.append((s, SCHEMAS[s].text))
        out.append(("RA1", "from phi infer Xa phi"))
        out.append(("RA2", "from phi' -> (!psi & Xa phi') infer phi' -> !(phi Ua psi)"))
        for s in ("C1", "C2", "C3", "C4", "C5", "C6"):
            out.append((s, SCHEMAS[s].text))
    else:
        for s in _SYSTEM_SCHEMAS[system]:
            if s not in ("Inf", "Fin"):
                out.append((s, SCHEMAS[s].text))
        out.append(("RT1", "from phi infer X phi"))
        out.append(("RT2", "from phi' -> (!psi & X phi') infer phi' -> !(phi U psi)"))
        for s in ("Inf", "Fin"):
            if s in _SYSTEM_SCHEMAS[system]:
                out.append((s, SCHEMAS[s].text))
    return tuple(out)


# ---------------------------------------------------------------------------
# Scripts and the checker.

@dataclass(frozen=True)
class AxiomInstance:
    schema: str
    params: tuple[tuple[str, int], ...] = ()
    bindings: tuple[tuple[str, Formula], ...] = ()

    def __post_init__(self):
        if isinstance(self.params, dict):
            object.__setattr__(self, "params", tuple(sorted(self.params.items())))
        if isinstance(self.bindings, dict):
            object.__setattr__(self, "bindings", tuple(sorted(self.bindings.items())))


@dataclass(frozen=True)
class Taut:
    pass


@dataclass(frozen=True)
class MP:
    antecedent: int
    implication: int


@dataclass(frozen=True)
class GenNext:
    premise: int


@dataclass(frozen=True)
class IndUntil:
    premise: int


@dataclass(frozen=True)
class GenAbsNext:
    premise: int


@dataclass(frozen=True)
class IndAbsUntil:
    premise: int


@dataclass(frozen=True)
class ProofStep:
    number: int
    formula: Formula
    justification: object


@dataclass(frozen=True)
class ProofScript:
    system: str
    steps: tuple[ProofStep, ...]


@dataclass(frozen=True)
class Verdict:
    ok: bool
    step: int | None = None
    reason: str | None = None


def _split_implies(f: Formula) -> tuple[Formula, Formula] | None:
    # implies(a, b) desugars to !(!(!a) & !b); recover (a, b) if f has that shape
    if type(f) is not Not or type(f.operand) is not And:
        return None
    left, right = f.operand.left, f.operand.right
    if type(left) is not Not or type(left.operand) is not Not:
        return None
    if type(right) is not Not:
        return None
    return left.operand.operand, right.operand


def _check_induction(premise: Formula, step: Formula, until_type, next_ctor):
    split = _split_implies(step)
    if (split is None or type(split[1]) is not Not
            or type(split[1].operand) is not until_type):
        return "step does not have the shape phi' -> !(phi U psi)"
    loop_inv, body = split
    psi = body.operand.right
    expected = implies(loop_inv, And(Not(psi), next_ctor(loop_inv)))
    if premise != expected:
        return "premise does not have the shape phi' -> (!psi & X phi')"
    return None


def check_proof(script: ProofScript) -> Verdict:
    """Check every step; ok iff all steps are correct under the system."""
    system = script.system
    if system not in _SYSTEM_SCHEMAS:
        raise ValueError(f"unknown system {system!r}")
    caret = system == "ax-cr"
    proved: dict[int, Formula] = {}
    last = 0
    for st in script.steps:
        if st.number <= last:
            return Verdict(False, st.number, "step numbers must strictly increase")
        last = st.number
        if not caret and not is_ltl(st.formula):
            return Verdict(False, st.number,
                           f"abstract operators are not part of {system}")
        reason = _check_step(system, caret, proved, st)
        if reason is not None:
            return Verdict(False, st.number, reason)
        proved[st.number] = st.formula
    return Verdict(True)


def _check_step(system: str, caret: bool, proved: dict[int, Formula],
                st: ProofStep) -> str | None:
    j = st.justification
    t = type(j)
    if t is AxiomInstance:
        try:
            ok = check_axiom_instance(system, j.schema, dict(j.params),
                                      dict(j.bindings), st.formula)
        except ProofError as e:
            return str(e)
        return None if ok else f"formula is not an instance of {j.schema}"
    if t is Taut:
        try:
            ok = check_tautology(st.formula)
        except ProofError as e:
            return str(e)
        return None if ok else "not a propositional tautology"

    def premise(i: int) -> Formula | None:
        return proved.get(i)

    if t is MP:
        a, b = premise(j.antecedent), premise(j.implication)
        if a is None or b is None:
            return "premise index does not refer to an earlier step"
        if b != implies(a, st.formula):
            return ("second premise is not (first premise) -> (step formula)")
        return None
    if t in (GenNext, GenAbsNext):
        if t is GenAbsNext and not caret:
            return "rule gen-xa needs system ax-cr"
        p = premise(j.premise)
        if p is None:
            return "premise index does not refer to an earlier step"
        ctor = AbsWeakNext if t is GenAbsNext else WeakNext
        if st.formula != ctor(p):
            return "step is not the next operator applied to the premise"
        return None
    if t in (IndUntil, IndAbsUntil):
        if t is IndAbsUntil and not caret:
            return "rule ind-ua needs system ax-cr"
        p = premise(j.premise)
        if p is None:
            return "premise index does not refer to an earlier step"
        if t is IndAbsUntil:
            return _check_induction(p, st.formula, AbsUntil, AbsWeakNext)
        return _check_induction(p, st.formula, Until, WeakNext)
    return f"unknown justification {j!r}"


# ---------------------------------------------------------------------------
# The proof file format.

_STEP_RE = re.compile(r"(\d+)\.\s*(.*)")
_PARAM_RE = re.compile(r"([a-z]+)\s*=\s*(-?\d+)\Z")
_BIND_RE = re.compile(r"\b(phi|psi)\s*=")


def _parse_justification(text: str, mode: str, line: int):
    parts = text.split(None, 1)
    if not parts:
        raise ProofFormatError("missing justification", line)
    head, rest = parts[0], parts[1] if len(parts) > 1 else ""
    if head == "taut":
        if rest:
            raise ProofFormatError("taut takes no arguments", line)
        return Taut()
    if head == "mp":
        nums = rest.split()
        if len(nums) != 2 or not all(x.isdigit() for x in nums):
            raise ProofFormatError("mp needs two step numbers", line)
        return MP(int(nums[0]), int(nums[1]))
    if head in ("gen-x", "ind-u", "gen-xa", "ind-ua"):
        nums = rest.split()
        if len(nums) != 1 or not nums[0].isdigit():
            raise ProofFormatError(f"{head} needs one step number", line)
        ctor = {"gen-x": GenNext, "ind-u": IndUntil,
                "gen-xa": GenAbsNext, "ind-ua": IndAbsUntil}[head]
        return ctor(int(nums[0]))
    if head != "axiom":
        raise ProofFormatError(f"unknown justification {head!r}", line)

    sparts = rest.split(None, 1)
    if not sparts:
        raise ProofFormatError("axiom needs a schema name", line)
    schema, tail = sparts[0], sparts[1] if len(sparts) > 1 else ""
    bm = re.search(r"\bbind\b", tail)
    params_text = tail[:bm.start()] if bm else tail
    binds_text = tail[bm.end():] if bm else ""
    params = {}
    for tok in params_text.split():
        m = _PARAM_RE.fullmatch(tok)
        if not m:
            raise ProofFormatError(f"bad parameter {tok!r}", line)
        params[m.group(1)] = int(m.group(2))
    bindings = {}
    marks = list(_BIND_RE.finditer(binds_text))
    if bm and not marks:
        raise ProofFormatError("bind clause without bindings", line)
    for k, m in enumerate(marks):
        name = m.group(1)
        end = marks[k + 1].start() if k + 1 < len(marks) else len(binds_text)
        ftext = binds_text[m.end():end].strip()
        if name in bindings:
            raise ProofFormatError(f"duplicate binding {name}", line)
        try:
            bindings[name] = parse_formula(ftext, mode)
        except ParseError as e:
            raise ProofFormatError(f"bad binding formula: {e}", line) from e
    return AxiomInstance(schema, tuple(sorted(params.items())),
                         tuple(sorted(bindings.items())))


def parse_proof(text: str) -> ProofScript:
    """Parse the text proof format.

    First non-comment line: ``system: <id>``.  Steps:
    ``<n>. <formula> ; <justification>`` with strictly increasing n.
    Justifications: ``axiom <schema> [k=v ...] [bind phi=<f> psi=<f>]``,
    ``taut``, ``mp <i> <j>``, ``gen-x <i>``, ``ind-u <i>``, ``gen-xa <i>``,
    ``ind-ua <i>``.  ``#`` starts a comment.
    """
    system = None
    steps: list[ProofStep] = []
    last = 0
    for ln, raw in enumerate(text.splitlines(), 1):
        cut = raw.find("#")
        if cut >= 0:
            raw = raw[:cut]
        line = raw.strip()
        if not line:
            continue
        if system is None:
            m = re.fullmatch(r"system:\s*(\S+)", line)
            if not m:
                raise ProofFormatError("expected 'system: <id>' first", ln)
            system = m.group(1)
            if system not in _SYSTEM_SCHEMAS:
                raise ProofFormatError(f"unknown system {system!r}", ln)
            continue
        m = _STEP_RE.fullmatch(line)
        if not m:
            raise ProofFormatError(
                "expected '<n>. <formula> ; <justification>'", ln)
        number = int(m.group(1))
        if number <= last:
            raise ProofFormatError("step numbers must strictly increase", ln)
        last = number
        rest = m.group(2)
        if ";" not in rest:
            raise ProofFormatError("missing ';' before the justification", ln)
        ftext, jtext = rest.split(";", 1)
        mode = "caret" if system == "ax-cr" else "ltl"
        try:
            formula = parse_formula(ftext.strip(), mode)
        except ParseError as e:
            raise ProofFormatError(f"bad formula: {e}", ln) from e
        steps.append(ProofStep(number, formula,
                               _parse_justification(jtext.strip(), mode, ln)))
    if system is None:
        raise ProofFormatError("empty proof script", max(1, len(text.splitlines())))
    return ProofScript(system, tuple(steps))
