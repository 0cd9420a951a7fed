"""Evaluation of formulas on traces.

Truth values are computed bottom-up per subformula as integer bitmasks over
the canonical positions of the trace (bit i = truth at canonical position i).
Weak next on a finite trace is vacuously true at the last state; until is the
least fixpoint of its strong-next unfolding, which converges within one pass
per canonical position because any satisfied until has a witness at most one
canonical round away.

Abstract operators read the abstract successor map of a structured lasso.
The map is computed once per context at canonical positions; this is sound
because a suffix of the trace starting inside the loop recurs verbatim one
loop later, so both truth and the abstract successor are periodic there.
"""

from __future__ import annotations

from .syntax import (
    AbsUntil, AbsWeakNext, And, Formula, Not, Prop, TrueConst, Until, WeakNext,
)
from .trace import (
    FiniteTrace, LassoTrace, StructuredLassoTrace, abstract_successor,
)

__all__ = ["EvalContext", "EvalError", "eval_ltl", "eval_caret", "eval_everywhere"]


class EvalError(Exception):
    pass


class EvalContext:
    """Truth-mask evaluator for one trace, memoised per subformula."""

    def __init__(self, trace):
        self.trace = trace
        if isinstance(trace, FiniteTrace):
            self.n = trace.length
            self.finite = True
            self.structured = False
        elif isinstance(trace, LassoTrace):
            self.n = trace.prefix_len + trace.loop_len
            self.finite = False
            self.structured = False
        elif isinstance(trace, StructuredLassoTrace):
            self.n = trace.prefix_len + trace.loop_len
            self.finite = False
            self.structured = True
        else:
            raise TypeError(f"not a trace: {trace!r}")
        self.full = (1 << self.n) - 1
        self._memo: dict[Formula, int] = {}
        self._props: dict[str, int] = {}
        self._asucc: list[int | None] | None = None

    # -- successor plumbing --------------------------------------------------

    def _weak_next(self, v: int) -> int:
        if self.finite:
            return (v >> 1) | (1 << (self.n - 1))
        p = self.trace.prefix_len
        return (v >> 1) | (((v >> p) & 1) << (self.n - 1))

    def _strong_next(self, v: int) -> int:
        if self.finite:
            return v >> 1
        p = self.trace.prefix_len
        return (v >> 1) | (((v >> p) & 1) << (self.n - 1))

    def _abs_map(self) -> list[int | None]:
        if self._asucc is None:
            t = self.trace
            self._asucc = [
                None if (j := abstract_successor(t, i)) is None else t.canonical(j)
                for i in range(self.n)
            ]
        return self._asucc

    def _weak_abs_next(self, v: int) -> int:
        out = 0
        for i, j in enumerate(self._abs_map()):
            if j is None or (v >> j) & 1:
                out |= 1 << i
        return out

    def _strong_abs_next(self, v: int) -> int:
        out = 0
        for i, j in enumerate(self._abs_map()):
            if j is not None and (v >> j) & 1:
                out |= 1 << i
        return out

    def _prop_mask(self, name: str) -> int:
        m = self._props.get(name)
        if m is None:
            t = self.trace
            m = 0
            if self.structured:
                for i in range(self.n):
                    props, tag = t.state_at(i)
                    if name in props or name == tag.value:
                        m |= 1 << i
            else:
                for i in range(self.n):
                    if name in t.props_at(i):
                        m |= 1 << i
            self._props[name] = m
        return m

    # -- evaluation ----------------------------------------------------------

    def truth_mask(self, f: Formula) -> int:
        m = self._memo.get(f)
        if m is not None:
            return m
        t = type(f)
        if t is Prop:
            m = self._prop_mask(f.name)
        elif t is TrueConst:
            m = self.full
        elif t is Not:
            m = self.full ^ self.truth_mask(f.operand)
        elif t is And:
            m = self.truth_mask(f.left) & self.truth_mask(f.right)
        elif t is WeakNext:
            m = self._weak_next(self.truth_mask(f.operand))
        elif t is Until:
            m = self._lfp(self.truth_mask(f.left), self.truth_mask(f.right),
                          self._strong_next)
        elif t is AbsWeakNext:
            self._need_structured()
            m = self._weak_abs_next(self.truth_mask(f.operand))
        elif t is AbsUntil:
            self._need_structured()
            m = self._lfp(self.truth_mask(f.left), self.truth_mask(f.right),
                          self._strong_abs_next)
        else:
            raise TypeError(f"not a formula node: {f!r}")
        self._memo[f] = m
        return m

    @staticmethod
    def _lfp(a: int, b: int, step) -> int:
        u = b
        while True:
            nu = b | (a & step(u))
            if nu == u:
                return u
            u = nu

    def _need_structured(self):
        if not self.structured:
            raise EvalError("abstract operators need a structured trace")

    def holds(self, f: Formula, i: int) -> bool:
        if self.finite:
            if not 0 <= i < self.n:
                raise EvalError(f"position {i} outside finite trace of length {self.n}")
            c = i
        else:
            if i < 0:
                raise EvalError(f"negative position {i}")
            c = self.trace.canonical(i)
        return bool((self.truth_mask(f) >> c) & 1)

    def holds_everywhere(self, f: Formula) -> bool:
        return self.truth_mask(f) == self.full


def eval_ltl(t: FiniteTrace | LassoTrace, i: int, f: Formula) -> bool:
    """Truth of an abstract-operator-free formula at position i of t."""
    if isinstance(t, StructuredLassoTrace):
        raise EvalError("structured traces are evaluated with eval_caret")
    if not isinstance(t, (FiniteTrace, LassoTrace)):
        raise TypeError(f"not a trace: {t!r}")
    return EvalContext(t).holds(f, i)


def eval_caret(t: StructuredLassoTrace, i: int, f: Formula) -> bool:
    """Truth at position i of a structured lasso.

    call, ret and int are true at a state when they equal its tag, in
    addition to any explicit labelling.
    """
    if not isinstance(t, StructuredLassoTrace):
        raise EvalError("eval_caret needs a structured trace")
    return EvalContext(t).holds(f, i)


def eval_everywhere(t, f: Formula) -> bool:
    """Truth of f at every position of the trace."""
    if not isinstance(t, (FiniteTrace, LassoTrace, StructuredLassoTrace)):
        raise TypeError(f"not a trace: {t!r}")
    return EvalContext(t).holds_everywhere(f)
