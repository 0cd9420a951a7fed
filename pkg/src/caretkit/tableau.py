"""Satisfiability and validity via atom graphs.

An atom is a maximal locally consistent subset of the signed closure of the
input formula.  Local consistency is purely syntactic: the constant true is
in, conjunctions agree with their conjuncts, an until agrees with its
strong-next unfolding, and an atom containing the next-of-false marker is
saturated with every weak-next member.  Because those rules determine every
member from the propositions and the weak-next members, atoms are enumerated
as bit-vector valuations of that free part, vectorised with numpy.

Edges follow the biconditional law: V -> W iff V lacks the next-of-false
marker and, for every weak-next formula in the closure, the formula is in V
exactly when its operand is in W.  Since the requirement on W depends only
on V's weak-next bits, successors are whole buckets of atoms sharing an
operand signature, which keeps the graph linear in the number of atoms.

Locally consistent atoms that cannot head any model (no successor despite
lacking the terminal marker) are eliminated to a fixpoint before searching;
the searches are plain reachability to a terminal atom for the finite class,
and reachability to a self-fulfilling strongly connected component for the
infinite class.  The mixed class accepts either kind of witness.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .semantics import EvalContext
from .syntax import (
    And, ClosureSet, FALSE, Formula, Not, Prop, TRUE, Until, WeakNext,
    closure, formula_sort_key, is_ltl, negate, props_of,
)
from .trace import FiniteTrace, LassoTrace

__all__ = [
    "CLASSES", "ClosureCapError", "Atom", "ChainWitness", "AtomGraph",
    "SatResult", "enumerate_atoms", "build_atom_graph", "decide_sat",
    "decide_valid", "extract_model", "brute_force_sat",
    "DEFAULT_CLOSURE_CAP",
]

CLASSES = ("gen", "fin", "inf")
DEFAULT_CLOSURE_CAP = 24

_TERMINAL_MARK = WeakNext(FALSE)          # next of false: true exactly at last states
_FIN_MARK = Until(TRUE, _TERMINAL_MARK)   # eventually a last state


class ClosureCapError(Exception):
    """The closure exceeded the configured size cap."""


@dataclass(frozen=True)
class Atom:
    """A maximal locally consistent subset of a signed closure."""

    members: frozenset[Formula]
    terminal: bool      # contains the next-of-false marker
    fin_viable: bool    # contains the eventually-terminal marker
    props: frozenset[str]

    @property
    def inf_viable(self) -> bool:
        return not self.terminal


@dataclass(frozen=True)
class ChainWitness:
    """A satisfying chain of atoms.

    kind 'finite': ``atoms`` is the path ending in a terminal atom and
    ``loop`` is empty.  kind 'lasso': ``atoms`` is the (possibly empty)
    prefix and ``loop`` the repeated cycle.
    """

    kind: str
    atoms: tuple[Atom, ...]
    loop: tuple[Atom, ...] = ()


@dataclass(frozen=True)
class AtomGraph:
    """Pruned atom graph for one trace class, successors as index tuples."""

    class_label: str
    nodes: tuple[Atom, ...]
    successors: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class SatResult:
    satisfiable: bool
    witness: ChainWitness | None = None
    model: FiniteTrace | LassoTrace | None = None


def _strip(f: Formula) -> tuple[Formula, int]:
    parity = 0
    while type(f) is Not:
        f = f.operand
        parity ^= 1
    return f, parity


def _pack_rows(matrix: np.ndarray) -> list[int]:
    """Rows of a bool matrix as big integers (deterministic, arbitrary width)."""
    if matrix.shape[1] == 0:
        return [0] * matrix.shape[0]
    packed = np.packbits(matrix, axis=1)
    return [int.from_bytes(row.tobytes(), "big") for row in packed]


class _Tableau:
    """Shared atom table for one closure: columns, keys and per-atom data."""

    def __init__(self, clo: ClosureSet, cap: int | None):
        if clo.mode != "ltl":
            raise ValueError("the tableau works on the ltl fragment only")
        if cap is not None and len(clo.members) > cap:
            raise ClosureCapError(
                f"closure of size {len(clo.members)} exceeds the cap {cap}; "
                "raise closure_cap to proceed")
        self.clo = clo
        core = clo.core

        bases = sorted({_strip(m)[0] for m in clo.members}, key=formula_sort_key)
        props = [b for b in bases if type(b) is Prop]
        nexts = [b for b in bases if type(b) is WeakNext]
        derived = sorted((b for b in bases if type(b) in (And, Until)),
                         key=formula_sort_key)
        free = props + nexts
        if len(free) > 18:
            raise ClosureCapError(
                f"atom enumeration needs {len(free)} free bits; "
                "the formula is beyond the supported closure size")

        n = 1 << len(free)
        rows = np.arange(n, dtype=np.uint32)
        col: dict[Formula, np.ndarray] = {TRUE: np.ones(n, dtype=bool)}
        for k, b in enumerate(free):
            col[b] = ((rows >> np.uint32(k)) & 1).astype(bool)

        def val(f: Formula) -> np.ndarray:
            b, parity = _strip(f)
            return ~col[b] if parity else col[b]

        for b in derived:
            if type(b) is And:
                col[b] = val(b.left) & val(b.right)
            else:
                unfold = WeakNext(Not(b))
                if unfold not in col:
                    raise AssertionError("closure lost an until unfolding")
                col[b] = val(b.right) | (val(b.left) & ~col[unfold])

        terminal_col = col[_TERMINAL_MARK]
        valid = np.ones(n, dtype=bool)
        for b in nexts:
            valid &= col[b] | ~terminal_col
        keep = np.flatnonzero(valid)

        member_matrix = np.empty((len(keep), len(core)), dtype=bool)
        for k, m in enumerate(core):
            member_matrix[:, k] = val(m)[keep]
        order = sorted(range(len(keep)),
                       key=_pack_rows(member_matrix).__getitem__)
        keep = keep[order]
        member_matrix = member_matrix[order]

        def packed(columns: list[np.ndarray]) -> list[int]:
            if not columns:
                return [0] * len(keep)
            return _pack_rows(np.stack([c[keep] for c in columns], axis=1))

        untils = [b for b in derived if type(b) is Until]
        self.core = core
        self.props = props
        self.nexts = nexts
        self.untils = untils
        self.member_matrix = member_matrix
        self.count = len(keep)
        self.terminal = terminal_col[keep]
        self.fin_viable = col[_FIN_MARK][keep]
        self.origin_bit = val(clo.origin)[keep]
        self.demand = packed([col[b] for b in nexts])
        self.signature = packed([val(b.operand) for b in nexts])
        self.until_present = packed([col[u] for u in untils])
        self.until_fulfill = packed([val(u.right) for u in untils])
        self.prop_matrix = np.stack([col[b][keep] for b in props], axis=1) \
            if props else np.zeros((len(keep), 0), dtype=bool)

    def class_indices(self, cls: str) -> list[int]:
        if cls == "gen":
            sel = np.ones(self.count, dtype=bool)
        elif cls == "fin":
            sel = self.fin_viable
        elif cls == "inf":
            sel = ~self.terminal
        else:
            raise ValueError(f"unknown trace class {cls!r}")
        return [int(i) for i in np.flatnonzero(sel)]

    def atom(self, a: int) -> Atom:
        vals = self.member_matrix[a]
        members = frozenset(
            m if vals[k] else negate(m) for k, m in enumerate(self.core))
        props = frozenset(
            b.name for j, b in enumerate(self.props) if self.prop_matrix[a, j])
        return Atom(members=members, terminal=bool(self.terminal[a]),
                    fin_viable=bool(self.fin_viable[a]), props=props)


class _ClassGraph:
    """Atoms of one class, bucketed by operand signature and pruned."""

    def __init__(self, tab: _Tableau, cls: str):
        self.tab = tab
        self.cls = cls
        self.ids = tab.class_indices(cls)
        self.terminal = {a: bool(tab.terminal[a]) for a in self.ids}
        self.buckets: dict[int, list[int]] = {}
        self.demanders: dict[int, list[int]] = {}
        for a in self.ids:
            self.buckets.setdefault(tab.signature[a], []).append(a)
            if not self.terminal[a]:
                self.demanders.setdefault(tab.demand[a], []).append(a)
        self.alive = {a: True for a in self.ids}
        self._prune()

    def _prune(self):
        tab = self.tab
        bucket_alive = {s: len(members) for s, members in self.buckets.items()}
        dead: list[int] = []
        for a in self.ids:
            if not self.terminal[a] and bucket_alive.get(tab.demand[a], 0) == 0:
                self.alive[a] = False
                dead.append(a)
        while dead:
            a = dead.pop()
            s = tab.signature[a]
            bucket_alive[s] -= 1
            if bucket_alive[s] == 0:
                for b in self.demanders.get(s, ()):
                    if self.alive[b]:
                        self.alive[b] = False
                        dead.append(b)

    def successors(self, a: int) -> list[int]:
        if self.terminal[a]:
            return []
        return [b for b in self.buckets.get(self.tab.demand[a], ()) if self.alive[b]]

    def roots(self) -> list[int]:
        tab = self.tab
        return [a for a in self.ids if self.alive[a] and tab.origin_bit[a]]

    # -- finite-class style search: shortest path to a terminal atom ---------

    def terminal_path(self) -> list[int] | None:
        tab = self.tab
        parent: dict[int, int] = {}
        seen: set[int] = set()
        seen_buckets: set[int] = set()
        queue: deque[int] = deque()
        for r in self.roots():
            if self.terminal[r]:
                return [r]
            seen.add(r)
            queue.append(r)
        while queue:
            a = queue.popleft()
            s = tab.demand[a]
            if s in seen_buckets:
                continue
            seen_buckets.add(s)
            for b in self.buckets.get(s, ()):
                if not self.alive[b] or b in seen:
                    continue
                seen.add(b)
                parent[b] = a
                if self.terminal[b]:
                    path = [b]
                    while path[-1] in parent:
                        path.append(parent[path[-1]])
                    path.reverse()
                    return path
                queue.append(b)
        return None

    # -- infinite-class style search: reachable self-fulfilling component ----

    def _bipartite(self):
        """Nodes: atom ids, then ('bucket', sig) for each bucket."""
        bucket_keys = sorted(self.buckets)
        bucket_node = {s: ("bucket", s) for s in bucket_keys}

        def succ(node):
            if isinstance(node, tuple):
                return [b for b in self.buckets[node[1]] if self.alive[b]]
            if self.terminal[node]:
                return []
            s = self.tab.demand[node]
            return [bucket_node[s]] if s in bucket_node else []

        order = [a for a in self.ids if self.alive[a]]
        order += [bucket_node[s] for s in bucket_keys]
        return succ, order

    def lasso_chain(self) -> tuple[list[int], list[int]] | None:
        succ, order = self._bipartite()
        scc_of: dict = {}
        good: list[bool] = []
        comps = _tarjan(succ, order)
        tab = self.tab
        for ci, comp in enumerate(comps):
            for node in comp:
                scc_of[node] = ci
            atoms = [n for n in comp if not isinstance(n, tuple)]
            if len(comp) < 2 or not atoms:
                good.append(False)
                continue
            present = fulfilled = 0
            for a in atoms:
                present |= tab.until_present[a]
                fulfilled |= tab.until_fulfill[a]
            good.append(present & ~fulfilled == 0)

        # breadth-first reachability from the origin atoms
        parent: dict = {}
        seen: set = set()
        queue: deque = deque()
        for r in self.roots():
            seen.add(r)
            queue.append(r)
        entry = None
        for r in sorted(seen):
            if good[scc_of[r]]:
                entry = r
                break
        while queue and entry is None:
            node = queue.popleft()
            for nxt in succ(node):
                if nxt in seen:
                    continue
                seen.add(nxt)
                parent[nxt] = node
                if not isinstance(nxt, tuple) and good[scc_of[nxt]]:
                    entry = nxt
                    break
                queue.append(nxt)
        if entry is None:
            return None

        prefix = []
        node = entry
        while node in parent:
            node = parent[node]
            if not isinstance(node, tuple):
                prefix.append(node)
        prefix.reverse()

        comp = set(comps[scc_of[entry]])

        def scc_path(src: int, targets: set[int], allow_empty: bool) -> list[int]:
            """Shortest atom path src -> target inside the component."""
            if allow_empty and src in targets:
                return []
            par: dict = {}
            seen2 = {src}
            q: deque = deque([src])
            while q:
                nd = q.popleft()
                for nxt in succ(nd):
                    if nxt not in comp:
                        continue
                    if not isinstance(nxt, tuple) and nxt in targets:
                        path = [nxt]
                        node = nd
                        while node != src:
                            if not isinstance(node, tuple):
                                path.append(node)
                            node = par[node]
                        path.reverse()
                        return path
                    if nxt in seen2:
                        continue
                    seen2.add(nxt)
                    par[nxt] = nd
                    q.append(nxt)
            raise AssertionError("self-fulfilling component lost a target")

        needed = 0
        comp_atoms = [n for n in comp if not isinstance(n, tuple)]
        for a in comp_atoms:
            needed |= tab.until_present[a]
        loop = [entry]
        current = entry
        for j in range(needed.bit_length()):
            if not (needed >> j) & 1:
                continue
            if any((tab.until_fulfill[a] >> j) & 1 for a in loop):
                continue
            targets = {a for a in comp_atoms if (tab.until_fulfill[a] >> j) & 1}
            seg = scc_path(current, targets, allow_empty=False)
            loop.extend(seg)
            current = seg[-1]
        closing = scc_path(current, {entry}, allow_empty=False)
        loop.extend(closing[:-1])
        return prefix, loop


def _tarjan(succ, order):
    """Iterative Tarjan over an explicit node order; returns the components."""
    index: dict = {}
    low: dict = {}
    onstack: set = set()
    stack: list = []
    comps: list[list] = []
    for root in order:
        if root in index:
            continue
        index[root] = low[root] = len(index)
        stack.append(root)
        onstack.add(root)
        work = [(root, iter(succ(root)))]
        while work:
            node, it = work[-1]
            advanced = False
            for child in it:
                if child not in index:
                    index[child] = low[child] = len(index)
                    stack.append(child)
                    onstack.add(child)
                    work.append((child, iter(succ(child))))
                    advanced = True
                    break
                if child in onstack and index[child] < low[node]:
                    low[node] = index[child]
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[node] < low[parent]:
                    low[parent] = low[node]
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    onstack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                comps.append(comp)
    return comps


# ---------------------------------------------------------------------------
# Public operations.

def enumerate_atoms(clo: ClosureSet, cls: str,
                    closure_cap: int | None = DEFAULT_CLOSURE_CAP) -> tuple[Atom, ...]:
    """All locally consistent atoms admissible for the class, in the fixed
    lexicographic order on member bit-vectors.  Desk scale: materialises
    every atom."""
    tab = _Tableau(clo, closure_cap)
    return tuple(tab.atom(a) for a in tab.class_indices(cls))


def build_atom_graph(clo: ClosureSet, cls: str,
                     closure_cap: int | None = DEFAULT_CLOSURE_CAP) -> AtomGraph:
    """The pruned atom graph: nodes that can head a chain of their class,
    successor lists per the biconditional edge law."""
    tab = _Tableau(clo, closure_cap)
    g = _ClassGraph(tab, cls)
    kept = [a for a in g.ids if g.alive[a]]
    local = {a: k for k, a in enumerate(kept)}
    nodes = tuple(tab.atom(a) for a in kept)
    succs = tuple(tuple(local[b] for b in g.successors(a)) for a in kept)
    return AtomGraph(class_label=cls, nodes=nodes, successors=succs)


def decide_sat(f: Formula, cls: str,
               closure_cap: int | None = DEFAULT_CLOSURE_CAP) -> SatResult:
    """Satisfiability of an ltl formula over the given trace class.

    Positive answers carry a chain witness and the trace extracted from it;
    the mixed class prefers a finite witness and falls back to a lasso.
    """
    if cls not in CLASSES:
        raise ValueError(f"unknown trace class {cls!r}")
    if not is_ltl(f):
        raise ValueError("decide_sat handles the ltl fragment only")
    tab = _Tableau(closure(f, "ltl"), closure_cap)

    if cls in ("fin", "gen"):
        g = _ClassGraph(tab, "fin" if cls == "fin" else "gen")
        path = g.terminal_path()
        if path is not None:
            atoms = tuple(tab.atom(a) for a in path)
            w = ChainWitness(kind="finite", atoms=atoms)
            return SatResult(True, w, extract_model(w))
    if cls in ("inf", "gen"):
        g = _ClassGraph(tab, "inf" if cls == "inf" else "gen")
        chain = g.lasso_chain()
        if chain is not None:
            prefix, loop = chain
            w = ChainWitness(kind="lasso",
                             atoms=tuple(tab.atom(a) for a in prefix),
                             loop=tuple(tab.atom(a) for a in loop))
            return SatResult(True, w, extract_model(w))
    return SatResult(False)


def decide_valid(f: Formula, cls: str,
                 closure_cap: int | None = DEFAULT_CLOSURE_CAP) -> bool:
    """Validity over the class: the negation has no model of that class."""
    return not decide_sat(Not(f), cls, closure_cap).satisfiable


def extract_model(w: ChainWitness) -> FiniteTrace | LassoTrace:
    """The trace a chain witness denotes: states labelled by the positive
    propositions of each atom."""
    if w.kind == "finite":
        return FiniteTrace(tuple(a.props for a in w.atoms))
    if w.kind == "lasso":
        return LassoTrace(tuple(a.props for a in w.atoms),
                          tuple(a.props for a in w.loop))
    raise ValueError(f"unknown witness kind {w.kind!r}")


def brute_force_sat(f: Formula, cls: str, max_total: int) -> str:
    """Literal bounded model search, the oracle decide_sat is checked against.

    Enumerates every finite trace up to max_total states (classes fin, gen)
    and every lasso with prefix+loop up to max_total states (classes inf,
    gen) over the proposition alphabet of f, evaluating f at position 0.
    Returns 'satisfiable' on the first hit, else 'unsatisfiable-up-to-bound'.
    """
    if cls not in CLASSES:
        raise ValueError(f"unknown trace class {cls!r}")
    if not 1 <= max_total <= 10:
        raise ValueError("max_total must be between 1 and 10")
    names = sorted(props_of(f))
    if len(names) > 3:
        raise ValueError("brute_force_sat is desk scale: at most 3 propositions")
    labels = [frozenset(n for j, n in enumerate(names) if (bits >> j) & 1)
              for bits in range(1 << len(names))]

    if cls in ("fin", "gen"):
        from itertools import product
        for length in range(1, max_total + 1):
            for states in product(labels, repeat=length):
                if EvalContext(FiniteTrace(states)).holds(f, 0):
                    return "satisfiable"
    if cls in ("inf", "gen"):
        from itertools import product
        for total in range(1, max_total + 1):
            for loop_len in range(1, total + 1):
                for prefix in product(labels, repeat=total - loop_len):
                    for loop in product(labels, repeat=loop_len):
                        if EvalContext(LassoTrace(prefix, loop)).holds(f, 0):
                            return "satisfiable"
    return "unsatisfiable-up-to-bound"
