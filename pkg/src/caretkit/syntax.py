"""Core formula syntax: AST, concrete grammar, printer, closure sets.

The core language has eight constructors: the constant true, propositions,
negation, conjunction, weak next, until, and the abstract (call/return)
variants of next and until.  Everything else the concrete grammar accepts
(false, or, implication, equivalence, eventually, always, strong next and
their abstract twins) is parse-time sugar that desugars into the core, so
every downstream consumer works with exactly these eight node kinds.
"""

from __future__ import annotations

__all__ = [
    "Formula", "TrueConst", "Prop", "Not", "And", "WeakNext", "Until",
    "AbsWeakNext", "AbsUntil", "TRUE", "FALSE",
    "lor", "implies", "iff", "eventually", "always", "strong_next",
    "abs_eventually", "abs_always", "abs_strong_next",
    "negate", "formula_size", "formula_sort_key", "is_ltl", "props_of",
    "parse_formula", "print_formula", "closure", "ClosureSet", "ParseError",
]


class ParseError(Exception):
    """Raised on lexical or grammatical errors; carries the source offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class Formula:
    """Base class for core formula nodes.

    Nodes are immutable by convention and compared structurally; every node
    caches its structural hash at construction so dictionary lookups stay
    cheap on large instantiated schemas.
    """

    __slots__ = ("_hash",)

    def __hash__(self) -> int:
        return self._hash


class TrueConst(Formula):
    __slots__ = ()
    __hash__ = Formula.__hash__

    def __init__(self):
        self._hash = hash("caretkit.true")

    def __eq__(self, other):
        return self is other or type(other) is TrueConst

    def __repr__(self):
        return "TrueConst()"


class Prop(Formula):
    __slots__ = ("name",)
    __hash__ = Formula.__hash__

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("caretkit.prop", name))

    def __eq__(self, other):
        return self is other or (type(other) is Prop and other.name == self.name)

    def __repr__(self):
        return f"Prop({self.name!r})"


class _Unary(Formula):
    __slots__ = ("operand",)
    __hash__ = Formula.__hash__
    _tag = ""

    def __init__(self, operand: Formula):
        self.operand = operand
        self._hash = hash((self._tag, operand._hash))

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is type(self) and other._hash == self._hash
                and other.operand == self.operand)

    def __repr__(self):
        return f"{type(self).__name__}({self.operand!r})"


class _Binary(Formula):
    __slots__ = ("left", "right")
    __hash__ = Formula.__hash__
    _tag = ""

    def __init__(self, left: Formula, right: Formula):
        self.left = left
        self.right = right
        self._hash = hash((self._tag, left._hash, right._hash))

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is type(self) and other._hash == self._hash
                and other.left == self.left and other.right == self.right)

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class Not(_Unary):
    __slots__ = ()
    _tag = "caretkit.not"


class WeakNext(_Unary):
    """Weak next: vacuously true at the last state of a finite trace."""
    __slots__ = ()
    _tag = "caretkit.next"


class AbsWeakNext(_Unary):
    """Weak next along the abstract (call/return) successor."""
    __slots__ = ()
    _tag = "caretkit.anext"


class And(_Binary):
    __slots__ = ()
    _tag = "caretkit.and"


class Until(_Binary):
    __slots__ = ()
    _tag = "caretkit.until"


class AbsUntil(_Binary):
    """Until along the chain of abstract successors."""
    __slots__ = ()
    _tag = "caretkit.auntil"


TRUE = TrueConst()
FALSE = Not(TRUE)


# ---------------------------------------------------------------------------
# Sugar.  These are the only desugarings in the package; the parser, the
# axiom schema table and the tests all go through them.

def lor(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def implies(a: Formula, b: Formula) -> Formula:
    return lor(Not(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return And(implies(a, b), implies(b, a))


def eventually(a: Formula) -> Formula:
    return Until(TRUE, a)


def always(a: Formula) -> Formula:
    return Not(eventually(Not(a)))


def strong_next(a: Formula) -> Formula:
    return Not(WeakNext(Not(a)))


def abs_eventually(a: Formula) -> Formula:
    return AbsUntil(TRUE, a)


def abs_always(a: Formula) -> Formula:
    return Not(abs_eventually(Not(a)))


def abs_strong_next(a: Formula) -> Formula:
    return Not(AbsWeakNext(Not(a)))


def negate(f: Formula) -> Formula:
    """Negation with single-negation collapse: the negation of Not(g) is g."""
    return f.operand if type(f) is Not else Not(f)


def formula_size(f: Formula) -> int:
    """Number of core AST nodes."""
    n = 0
    stack = [f]
    while stack:
        g = stack.pop()
        n += 1
        if isinstance(g, _Unary):
            stack.append(g.operand)
        elif isinstance(g, _Binary):
            stack.append(g.left)
            stack.append(g.right)
    return n


def is_ltl(f: Formula) -> bool:
    """True when the formula uses no abstract operator."""
    stack = [f]
    while stack:
        g = stack.pop()
        if type(g) in (AbsWeakNext, AbsUntil):
            return False
        if isinstance(g, _Unary):
            stack.append(g.operand)
        elif isinstance(g, _Binary):
            stack.append(g.left)
            stack.append(g.right)
    return True


def props_of(f: Formula) -> frozenset[str]:
    names = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if type(g) is Prop:
            names.add(g.name)
        elif isinstance(g, _Unary):
            stack.append(g.operand)
        elif isinstance(g, _Binary):
            stack.append(g.left)
            stack.append(g.right)
    return frozenset(names)


def formula_sort_key(f: Formula) -> tuple[int, str]:
    """Deterministic ordering key: (size, printed text).

    The printed text pins the order independently of hash randomisation, so
    anything sorted with this key is stable across runs.
    """
    return (formula_size(f), print_formula(f))


# ---------------------------------------------------------------------------
# Printer.  print_formula(f) reparses to a structurally equal tree; sugar is
# not reconstructed, the output is plain core syntax.

def print_formula(f: Formula) -> str:
    t = type(f)
    if t is TrueConst:
        return "true"
    if t is Prop:
        return f.name
    if t is Not:
        return "!(" + print_formula(f.operand) + ")"
    if t is WeakNext:
        return "X " + print_formula(f.operand)
    if t is AbsWeakNext:
        return "Xa " + print_formula(f.operand)
    if t is And:
        return "(" + print_formula(f.left) + " & " + print_formula(f.right) + ")"
    if t is Until:
        return "(" + print_formula(f.left) + " U " + print_formula(f.right) + ")"
    if t is AbsUntil:
        return "(" + print_formula(f.left) + " Ua " + print_formula(f.right) + ")"
    raise TypeError(f"not a formula node: {f!r}")


# ---------------------------------------------------------------------------
# Parser.  Grammar (ASCII, whitespace-insensitive between tokens):
#
#   formula := iff
#   iff     := imp ('<->' imp)*            left associative
#   imp     := or ('->' imp)?              right associative
#   or      := and ('|' and)*
#   and     := until ('&' until)*
#   until   := unary (('U' | 'Ua') until)? right associative
#   unary   := ('!'|'X'|'N'|'F'|'G'|'Xa'|'Na'|'Fa'|'Ga') unary | atom
#   atom    := 'true' | 'false' | ident | '(' formula ')'
#   ident   := [a-z_][a-z0-9_]*   (excluding the reserved words)
#
# call, ret and int are ordinary identifiers.

_WORD_OPS = frozenset({"U", "Ua", "X", "N", "F", "G", "Xa", "Na", "Fa", "Ga"})
_ABSTRACT_OPS = frozenset({"Ua", "Xa", "Na", "Fa", "Ga"})
_RESERVED = frozenset({"true", "false"})


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "(":
            toks.append(("(", c, i)); i += 1
        elif c == ")":
            toks.append((")", c, i)); i += 1
        elif c == "!":
            toks.append(("!", c, i)); i += 1
        elif c == "&":
            toks.append(("&", c, i)); i += 1
        elif c == "|":
            toks.append(("|", c, i)); i += 1
        elif text.startswith("<->", i):
            toks.append(("<->", "<->", i)); i += 3
        elif text.startswith("->", i):
            toks.append(("->", "->", i)); i += 2
        elif c.isalpha() or c == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word in _RESERVED:
                toks.append(("const", word, i))
            elif word in _WORD_OPS:
                toks.append(("op", word, i))
            elif word[0].islower() or word[0] == "_":
                if not all(ch.islower() or ch.isdigit() or ch == "_" for ch in word):
                    raise ParseError(f"bad identifier {word!r}", i)
                toks.append(("ident", word, i))
            else:
                raise ParseError(f"unknown word {word!r}", i)
            i = j
        else:
            raise ParseError(f"unexpected character {c!r}", i)
    toks.append(("eof", "", n))
    return toks


_UNARY_BUILDERS = {
    "!": Not,
    "X": WeakNext,
    "N": strong_next,
    "F": eventually,
    "G": always,
    "Xa": AbsWeakNext,
    "Na": abs_strong_next,
    "Fa": abs_eventually,
    "Ga": abs_always,
}


class _Parser:
    def __init__(self, toks, mode):
        self.toks = toks
        self.pos = 0
        self.mode = mode

    def peek(self):
        return self.toks[self.pos]

    def advance(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.advance()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return tok

    def formula(self) -> Formula:
        f = self.imp()
        while self.peek()[0] == "<->":
            self.advance()
            f = iff(f, self.imp())
        return f

    def imp(self) -> Formula:
        f = self.disj()
        if self.peek()[0] == "->":
            self.advance()
            f = implies(f, self.imp())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek()[0] == "|":
            self.advance()
            f = lor(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.until()
        while self.peek()[0] == "&":
            self.advance()
            f = And(f, self.until())
        return f

    def until(self) -> Formula:
        f = self.unary()
        kind, word, at = self.peek()
        if kind == "op" and word in ("U", "Ua"):
            self.advance()
            self._check_mode(word, at)
            rhs = self.until()
            f = Until(f, rhs) if word == "U" else AbsUntil(f, rhs)
        return f

    def unary(self) -> Formula:
        kind, word, at = self.peek()
        if kind == "!":
            self.advance()
            return Not(self.unary())
        if kind == "op":
            if word in ("U", "Ua"):
                raise ParseError(f"{word!r} needs a left operand", at)
            self.advance()
            self._check_mode(word, at)
            return _UNARY_BUILDERS[word](self.unary())
        return self.atom()

    def atom(self) -> Formula:
        kind, word, at = self.advance()
        if kind == "const":
            return TRUE if word == "true" else FALSE
        if kind == "ident":
            return Prop(word)
        if kind == "(":
            f = self.formula()
            self.expect(")")
            return f
        raise ParseError(f"unexpected token {word!r}", at)

    def _check_mode(self, word, at):
        if self.mode == "ltl" and word in _ABSTRACT_OPS:
            raise ParseError(f"abstract operator {word!r} requires caret mode", at)


def parse_formula(text: str, mode: str = "ltl") -> Formula:
    """Parse concrete syntax into a desugared core formula.

    mode 'ltl' rejects the abstract operators; mode 'caret' admits them.
    """
    if mode not in ("ltl", "caret"):
        raise ValueError(f"unknown mode {mode!r}")
    p = _Parser(_tokenize(text), mode)
    f = p.formula()
    kind, word, at = p.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {word!r}", at)
    return f


# ---------------------------------------------------------------------------
# Closure sets.

class ClosureSet:
    """The signed closure of a formula.

    ``core`` is the closure proper; ``members`` is core plus the negation of
    every core member, with single-negation collapse when pairing.  Both are
    tuples in deterministic (size, text) order.  ``size_bound`` records the
    linear bound on len(members) guaranteed at construction.
    """

    __slots__ = ("origin", "mode", "core", "members", "member_set", "size_bound")

    def __init__(self, origin, mode, core, members, size_bound):
        self.origin = origin
        self.mode = mode
        self.core = core
        self.members = members
        self.member_set = frozenset(members)
        self.size_bound = size_bound

    def __contains__(self, f: Formula) -> bool:
        return f in self.member_set

    def __repr__(self):
        return (f"ClosureSet(origin={print_formula(self.origin)!r}, "
                f"mode={self.mode!r}, members={len(self.members)})")


def closure(f: Formula, mode: str = "ltl") -> ClosureSet:
    """Smallest set containing f that is closed under the closure rules.

    Rules: the seed until-to-a-terminal formula is always included; negations
    expose their operand; conjunctions their conjuncts; a weak next exposes
    its operand, and a weak next of a negation also yields the weak next of
    the unnegated operand; an until yields both operands plus its own
    strong-next unfolding (stored desugared).  In caret mode the last two
    rules are mirrored for the abstract operators.
    """
    if mode not in ("ltl", "caret"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "ltl" and not is_ltl(f):
        raise ValueError("formula uses abstract operators; closure needs caret mode")

    core: set[Formula] = set()
    stack: list[Formula] = [f, Until(TRUE, WeakNext(FALSE))]
    while stack:
        g = stack.pop()
        if g in core:
            continue
        core.add(g)
        t = type(g)
        if t is Not:
            stack.append(g.operand)
        elif t is And:
            stack.append(g.left)
            stack.append(g.right)
        elif t is WeakNext:
            stack.append(g.operand)
            if type(g.operand) is Not:
                stack.append(WeakNext(g.operand.operand))
        elif t is Until:
            stack.append(g.left)
            stack.append(g.right)
            stack.append(Not(WeakNext(Not(g))))
        elif t is AbsWeakNext:
            stack.append(g.operand)
            if type(g.operand) is Not:
                stack.append(AbsWeakNext(g.operand.operand))
        elif t is AbsUntil:
            stack.append(g.left)
            stack.append(g.right)
            stack.append(Not(AbsWeakNext(Not(g))))

    members = set(core)
    members.update(negate(g) for g in core)
    core_sorted = tuple(sorted(core, key=formula_sort_key))
    members_sorted = tuple(sorted(members, key=formula_sort_key))
    bound = 8 * formula_size(f) + 20
    return ClosureSet(f, mode, core_sorted, members_sorted, bound)
