"""Finite-domain feasibility/optimization engine.

Depth-first backtracking search with bounds-consistency propagation over
linear constraints, immediate propagation of reified and conditional
constraints, and clause-style propagation of no-goods.  Built for the win/goal
assignment models: a few thousand integer or Boolean variables, linear
relations, reified comparisons, and incremental no-good addition between
solves.  The search is deterministic for a fixed model.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


class EngineError(ValueError):
    pass


class SolveStatus(enum.Enum):
    SATISFIABLE = "satisfiable"
    INFEASIBLE = "infeasible"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class VarRef:
    model_id: int
    index: int
    name: str = ""

    def __repr__(self):
        return self.name or f"v{self.index}"


@dataclass
class SearchStats:
    nodes: int = 0
    propagations: int = 0
    solves: int = 0


@dataclass
class SolveOutcome:
    status: SolveStatus
    assignment: Optional[dict[VarRef, int]]
    stats: SearchStats
    objective: Optional[int] = None


# Normalized linear relations.
LE, EQ, NE = "<=", "==", "!="

_REL_ALIASES = {
    "<=": (LE, 0, False),
    "<": (LE, -1, False),
    ">=": (LE, -0, True),
    ">": (LE, 1, True),
    "==": (EQ, 0, False),
    "=": (EQ, 0, False),
    "!=": (NE, 0, False),
}


def _normalize(terms: Sequence[tuple[int, int]], rel: str, rhs: int):
    """Reduce any relation to <= / == / != over integer terms."""
    if rel not in _REL_ALIASES:
        raise EngineError(f"unknown relation {rel!r}")
    out_rel, shift, negate = _REL_ALIASES[rel]
    rhs = rhs + shift
    if negate:  # a >= b  <->  -a <= -b
        terms = [(-c, v) for c, v in terms]
        rhs = -rhs
    return list(terms), out_rel, rhs


class _Lin:
    """A normalized linear constraint Σ c_i·x_i REL rhs."""

    __slots__ = ("terms", "rel", "rhs")

    def __init__(self, terms, rel, rhs):
        merged: dict[int, int] = {}
        for c, v in terms:
            if c:
                merged[v] = merged.get(v, 0) + c
        self.terms = tuple((c, v) for v, c in sorted((v, c) for v, c in merged.items()) if c)
        self.rel = rel
        self.rhs = rhs

    def vars(self):
        return [v for _, v in self.terms]

    def negated(self) -> "_Lin":
        if self.rel == LE:  # not(sum <= rhs) -> sum >= rhs+1 -> -sum <= -rhs-1
            return _Lin([(-c, v) for c, v in self.terms], LE, -self.rhs - 1)
        if self.rel == EQ:
            return _Lin(self.terms, NE, self.rhs)
        return _Lin(self.terms, EQ, self.rhs)

    def bounds(self, s: "_Search") -> tuple[int, int]:
        lo = hi = 0
        for c, v in self.terms:
            if c > 0:
                lo += c * s.lo[v]
                hi += c * s.hi[v]
            else:
                lo += c * s.hi[v]
                hi += c * s.lo[v]
        return lo, hi

    def entailed(self, s: "_Search") -> Optional[bool]:
        lo, hi = self.bounds(s)
        if self.rel == LE:
            if hi <= self.rhs:
                return True
            if lo > self.rhs:
                return False
            return None
        if self.rel == EQ:
            if lo == hi == self.rhs:
                return True
            if self.rhs < lo or self.rhs > hi:
                return False
            return None
        # NE
        if self.rhs < lo or self.rhs > hi:
            return True
        if lo == hi == self.rhs:
            return False
        return None

    def propagate(self, s: "_Search"):
        if self.rel == LE:
            self._prop_le(s, self.terms, self.rhs)
        elif self.rel == EQ:
            self._prop_le(s, self.terms, self.rhs)
            self._prop_le(s, [(-c, v) for c, v in self.terms], -self.rhs)
        else:
            self._prop_ne(s)

    @staticmethod
    def _prop_le(s: "_Search", terms, rhs):
        minsum = 0
        for c, v in terms:
            minsum += c * (s.lo[v] if c > 0 else s.hi[v])
        if minsum > rhs:
            raise _Conflict
        for c, v in terms:
            mincontrib = c * (s.lo[v] if c > 0 else s.hi[v])
            margin = rhs - (minsum - mincontrib)
            if c > 0:
                s.set_max(v, margin // c)
            else:
                # c*x <= margin with c<0  ->  x >= ceil(margin/c)
                s.set_min(v, -((-margin) // c))

    def _prop_ne(self, s: "_Search"):
        unfixed = None
        total = 0
        for c, v in self.terms:
            if s.lo[v] == s.hi[v]:
                total += c * s.lo[v]
            elif unfixed is None:
                unfixed = (c, v)
            else:
                return
        if unfixed is None:
            if total == self.rhs:
                raise _Conflict
            return
        c, v = unfixed
        rem = self.rhs - total
        if rem % c == 0:
            s.remove_value(v, rem // c)

    def render(self, names) -> str:
        parts = " + ".join(
            (f"{c}*{names[v]}" if c != 1 else names[v]) for c, v in self.terms
        ) or "0"
        return f"{parts} {self.rel} {self.rhs}"


class _Conflict(Exception):
    pass


class _Deadline(Exception):
    pass


class _Constraint:
    """Posted constraint wrapper dispatching to the propagators above."""

    __slots__ = ("kind", "lin", "neg", "bvar", "op", "lits", "trigger")

    def __init__(self, kind, *, lin=None, bvar=None, op=None, lits=None, trigger=None):
        self.kind = kind
        self.lin = lin
        self.neg = lin.negated() if lin is not None and kind in ("reif", "impl") else None
        self.bvar = bvar
        self.op = op
        self.lits = lits
        self.trigger = trigger

    def watched_vars(self):
        out = []
        if self.lin is not None:
            out.extend(self.lin.vars())
        if self.bvar is not None:
            out.append(self.bvar)
        if self.lits is not None:
            out.extend(v for v, _ in self.lits)
        if self.trigger is not None:
            out.append(self.trigger[0])
        return out

    def propagate(self, s: "_Search"):
        kind = self.kind
        if kind == "lin":
            self.lin.propagate(s)
        elif kind == "reif":
            self._prop_reif(s)
        elif kind == "impl":
            self._prop_impl(s)
        elif kind == "bool":
            self._prop_bool(s)
        elif kind == "nogood":
            self._prop_nogood(s)
        else:  # pragma: no cover
            raise AssertionError(kind)

    def _prop_reif(self, s):
        b = self.bvar
        if s.lo[b] == s.hi[b]:
            (self.lin if s.lo[b] == 1 else self.neg).propagate(s)
            return
        ent = self.lin.entailed(s)
        if ent is True:
            s.set_min(b, 1)
        elif ent is False:
            s.set_max(b, 0)

    def _prop_impl(self, s):
        var, value = self.trigger
        if value < s.lo[var] or value > s.hi[var] or value in s.removed.get(var, ()):
            return
        if s.lo[var] == s.hi[var] == value:
            self.lin.propagate(s)
            return
        if self.lin.entailed(s) is False:
            s.remove_value(var, value)

    def _prop_bool(self, s):
        b, want_all = self.bvar, self.op == "and"
        lits = self.lits
        n_true = n_false = 0
        undecided = []
        for v, want in lits:
            if s.lo[v] == s.hi[v]:
                if s.lo[v] == want:
                    n_true += 1
                else:
                    n_false += 1
            else:
                undecided.append((v, want))
        if want_all:
            if n_false:
                s.set_max(b, 0)  # conflicts if b is already forced true
                return
            if not undecided:
                s.set_min(b, 1)
                return
            if s.lo[b] == s.hi[b]:
                if s.lo[b] == 1:
                    for v, want in undecided:
                        s.set_min(v, 1) if want == 1 else s.set_max(v, 0)
                elif len(undecided) == 1:
                    v, want = undecided[0]
                    s.set_max(v, 0) if want == 1 else s.set_min(v, 1)
        else:
            if n_true:
                s.set_min(b, 1)
                return
            if not undecided:
                s.set_max(b, 0)
                return
            if s.lo[b] == s.hi[b]:
                if s.lo[b] == 0:
                    for v, want in undecided:
                        s.set_max(v, 0) if want == 1 else s.set_min(v, 1)
                elif len(undecided) == 1:
                    v, want = undecided[0]
                    s.set_min(v, 1) if want == 1 else s.set_max(v, 0)

    def _prop_nogood(self, s):
        pending = None
        for v, value in self.lits:
            lo, hi = s.lo[v], s.hi[v]
            if value < lo or value > hi or value in s.removed.get(v, ()):
                return  # some literal already differs
            if lo == hi == value:
                continue
            if pending is not None:
                return  # two+ undecided literals: nothing to do yet
            pending = (v, value)
        if pending is None:
            raise _Conflict  # full match of the forbidden assignment
        s.remove_value(*pending)


class Model:
    """A constraint model: variable table, constraint store, no-good store."""

    _next_id = 0

    def __init__(self):
        Model._next_id += 1
        self.model_id = Model._next_id
        self.lo: list[int] = []
        self.hi: list[int] = []
        self.is_bool: list[bool] = []
        self.prefer_high: list[bool] = []
        self.branch_class: list[int] = []
        self.names: list[str] = []
        self.constraints: list[_Constraint] = []
        self.root_infeasible = False

    # -- variables ---------------------------------------------------------

    def add_int_var(self, lo: int, hi: int, name: str = "", prefer_high: bool = False,
                    branch_class: int = 0) -> VarRef:
        """New integer variable.  `branch_class` orders the search: class-0
        variables are branched before class-1 and so on; variables whose value
        follows from others by propagation belong in a high class."""
        if lo > hi:
            raise EngineError(f"inverted bounds [{lo}, {hi}]")
        idx = len(self.lo)
        self.lo.append(lo)
        self.hi.append(hi)
        self.is_bool.append(False)
        self.prefer_high.append(prefer_high)
        self.branch_class.append(branch_class)
        self.names.append(name or f"x{idx}")
        return VarRef(self.model_id, idx, self.names[idx])

    def add_bool_var(self, name: str = "", prefer_high: bool = False,
                     branch_class: int = 0) -> VarRef:
        ref = self.add_int_var(0, 1, name or f"b{len(self.lo)}", prefer_high, branch_class)
        self.is_bool[ref.index] = True
        return ref

    def _own(self, ref: VarRef) -> int:
        if not isinstance(ref, VarRef) or ref.model_id != self.model_id:
            raise EngineError(f"variable {ref!r} does not belong to this model")
        return ref.index

    def _lin(self, terms, rel, rhs) -> _Lin:
        resolved = [(int(c), self._own(v)) for c, v in terms]
        return _Lin(*_normalize(resolved, rel, int(rhs)))

    # -- constraints -------------------------------------------------------

    def post_linear(self, terms: Iterable[tuple[int, VarRef]], rel: str, rhs: int) -> None:
        lin = self._lin(list(terms), rel, rhs)
        if not lin.terms:
            ok = {LE: 0 <= lin.rhs, EQ: 0 == lin.rhs, NE: 0 != lin.rhs}[lin.rel]
            if not ok:
                self.root_infeasible = True
            return
        self.constraints.append(_Constraint("lin", lin=lin))

    def post_reified(self, b: VarRef, relation) -> None:
        """b <-> relation.

        `relation` is ("lin", terms, rel, rhs) or ("and"/"or", [(var, want)]).
        """
        bi = self._own(b)
        if not self.is_bool[bi]:
            raise EngineError("reification target must be Boolean")
        tag = relation[0]
        if tag == "lin":
            _, terms, rel, rhs = relation
            self.constraints.append(_Constraint("reif", lin=self._lin(terms, rel, rhs), bvar=bi))
        elif tag in ("and", "or"):
            lits = [(self._own(v), int(w)) for v, w in relation[1]]
            for v, w in lits:
                if not self.is_bool[v] or w not in (0, 1):
                    raise EngineError("boolean reification literals must be (bool var, 0|1)")
            self.constraints.append(_Constraint("bool", bvar=bi, op=tag, lits=lits))
        else:
            raise EngineError(f"unknown relation spec {tag!r}")

    def post_implication(self, literal: tuple[VarRef, int], relation) -> None:
        """(var == value) -> relation (a linear constraint spec)."""
        var, value = literal
        vi = self._own(var)
        tag = relation[0]
        if tag != "lin":
            raise EngineError("implication target must be a linear relation")
        _, terms, rel, rhs = relation
        self.constraints.append(
            _Constraint("impl", lin=self._lin(terms, rel, rhs), trigger=(vi, int(value)))
        )

    def post_exactly(self, bool_vars: Iterable[VarRef], k: int) -> None:
        vars_ = list(bool_vars)
        for v in vars_:
            if not self.is_bool[self._own(v)]:
                raise EngineError("post_exactly requires Boolean variables")
        self.post_linear([(1, v) for v in vars_], "==", k)

    def post_no_good(self, literals: Iterable[tuple[VarRef, int]]) -> None:
        lits = [(self._own(v), int(val)) for v, val in literals]
        if not lits:
            raise EngineError("no-good needs at least one literal")
        self.constraints.append(_Constraint("nogood", lits=lits))

    # -- inspection --------------------------------------------------------

    def var_refs(self) -> list[VarRef]:
        return [VarRef(self.model_id, i, self.names[i]) for i in range(len(self.lo))]

    def dump(self) -> str:
        """Plain-text constraint listing, one per line, for test diffing."""
        lines = []
        for i in range(len(self.lo)):
            lines.append(f"var {self.names[i]} in [{self.lo[i]}, {self.hi[i]}]")
        for c in self.constraints:
            if c.kind == "lin":
                lines.append(c.lin.render(self.names))
            elif c.kind == "reif":
                lines.append(f"{self.names[c.bvar]} <-> ({c.lin.render(self.names)})")
            elif c.kind == "bool":
                lits = f" {c.op} ".join(
                    (self.names[v] if w else f"!{self.names[v]}") for v, w in c.lits
                )
                lines.append(f"{self.names[c.bvar]} <-> ({lits})")
            elif c.kind == "impl":
                v, val = c.trigger
                lines.append(f"[{self.names[v]} == {val}] -> ({c.lin.render(self.names)})")
            elif c.kind == "nogood":
                lits = " & ".join(f"{self.names[v]}={val}" for v, val in c.lits)
                lines.append(f"forbid ({lits})")
        return "\n".join(lines)


def new_model() -> Model:
    return Model()


class _Search:
    """One search run over a model's constraints (plus optional bound)."""

    def __init__(self, model: Model, extra: Optional[_Lin], stats: SearchStats, deadline):
        self.model = model
        self.n = len(model.lo)
        self.lo = list(model.lo)
        self.hi = list(model.hi)
        self.removed: dict[int, set[int]] = {}
        self.trail: list[tuple] = []
        self.stats = stats
        self.deadline = deadline
        self.constraints = list(model.constraints)
        if extra is not None:
            self.constraints.append(_Constraint("lin", lin=extra))
        self.watchers: list[list[int]] = [[] for _ in range(self.n)]
        for ci, c in enumerate(self.constraints):
            for v in set(c.watched_vars()):
                self.watchers[v].append(ci)
        self.queue: list[int] = []
        self.queued: set[int] = set()

    # -- domain operations (trailed) ---------------------------------------

    def _wake(self, v: int):
        for ci in self.watchers[v]:
            if ci not in self.queued:
                self.queued.add(ci)
                self.queue.append(ci)

    def _skip_removed_up(self, v: int, value: int) -> int:
        rem = self.removed.get(v)
        if rem:
            while value in rem:
                value += 1
        return value

    def _skip_removed_down(self, v: int, value: int) -> int:
        rem = self.removed.get(v)
        if rem:
            while value in rem:
                value -= 1
        return value

    def set_min(self, v: int, value: int):
        value = self._skip_removed_up(v, value)
        if value <= self.lo[v]:
            return
        if value > self.hi[v]:
            raise _Conflict
        self.trail.append(("lo", v, self.lo[v]))
        self.lo[v] = value
        self._wake(v)

    def set_max(self, v: int, value: int):
        value = self._skip_removed_down(v, value)
        if value >= self.hi[v]:
            return
        if value < self.lo[v]:
            raise _Conflict
        self.trail.append(("hi", v, self.hi[v]))
        self.hi[v] = value
        self._wake(v)

    def remove_value(self, v: int, value: int):
        if value < self.lo[v] or value > self.hi[v]:
            return
        if value in self.removed.get(v, ()):
            return
        if self.lo[v] == self.hi[v]:
            raise _Conflict  # removing the only value
        if value == self.lo[v]:
            self.set_min(v, value + 1)
        elif value == self.hi[v]:
            self.set_max(v, value - 1)
        else:
            self.removed.setdefault(v, set()).add(value)
            self.trail.append(("rm", v, value))
            self._wake(v)

    def mark(self) -> int:
        return len(self.trail)

    def undo(self, mark: int):
        while len(self.trail) > mark:
            op, v, old = self.trail.pop()
            if op == "lo":
                self.lo[v] = old
            elif op == "hi":
                self.hi[v] = old
            else:
                self.removed[v].discard(old)

    # -- propagation -------------------------------------------------------

    def propagate_all(self):
        self.queue = list(range(len(self.constraints)))
        self.queued = set(self.queue)
        self._fixpoint()

    def _fixpoint(self):
        while self.queue:
            ci = self.queue.pop()
            self.queued.discard(ci)
            self.stats.propagations += 1
            self.constraints[ci].propagate(self)

    def propagate_from(self, v: int):
        self._wake(v)
        self._fixpoint()

    # -- search ------------------------------------------------------------

    def domain_size(self, v: int) -> int:
        size = self.hi[v] - self.lo[v] + 1
        rem = self.removed.get(v)
        if rem:
            size -= sum(1 for x in rem if self.lo[v] < x < self.hi[v])
        return size

    def values(self, v: int):
        rem = self.removed.get(v, ())
        rng = range(self.lo[v], self.hi[v] + 1)
        if self.model.prefer_high[v]:
            rng = reversed(rng)
        return [x for x in rng if x not in rem]

    def pick_var(self) -> Optional[int]:
        best = None
        best_key = None
        classes = self.model.branch_class
        for v in range(self.n):
            if self.lo[v] == self.hi[v]:
                continue
            key = (classes[v], self.domain_size(v))
            if best_key is None or key < best_key:
                best, best_key = v, key
                if key == (0, 2):
                    break
        return best

    def run(self) -> Optional[dict[int, int]]:
        try:
            self.propagate_all()
        except _Conflict:
            return None
        return self._dfs()

    def _dfs(self) -> Optional[dict[int, int]]:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise _Deadline
        self.stats.nodes += 1
        v = self.pick_var()
        if v is None:
            return {i: self.lo[i] for i in range(self.n)}
        for value in self.values(v):
            m = self.mark()
            try:
                self.trail.append(("lo", v, self.lo[v]))
                self.trail.append(("hi", v, self.hi[v]))
                self.lo[v] = self.hi[v] = value
                self.propagate_from(v)
                result = self._dfs()
                if result is not None:
                    return result
            except _Conflict:
                pass
            self.undo(m)
        return None


def solve(
    model: Model,
    deadline: Optional[float] = None,
    minimize: Optional[Sequence[tuple[int, VarRef]]] = None,
    time_limit: Optional[float] = None,
) -> SolveOutcome:
    """Solve for feasibility, optionally minimizing a linear objective.

    `deadline` is an absolute time.monotonic() instant; `time_limit` (seconds)
    is a convenience alternative.  Complete: INFEASIBLE is only returned when
    no assignment exists.  Optimization runs iterative feasibility with a
    decreasing objective bound.
    """
    stats = SearchStats()
    if deadline is None and time_limit is not None:
        deadline = time.monotonic() + time_limit
    if model.root_infeasible:
        return SolveOutcome(SolveStatus.INFEASIBLE, None, stats)
    obj_lin = None
    if minimize is not None:
        obj_lin = [(int(c), model._own(v)) for c, v in minimize]

    def as_refs(values: dict[int, int]) -> dict[VarRef, int]:
        return {VarRef(model.model_id, i, model.names[i]): x for i, x in values.items()}

    def obj_value(values: dict[int, int]) -> int:
        return sum(c * values[v] for c, v in obj_lin)

    try:
        stats.solves += 1
        best = _Search(model, None, stats, deadline).run()
    except _Deadline:
        return SolveOutcome(SolveStatus.TIMEOUT, None, stats)
    if best is None:
        return SolveOutcome(SolveStatus.INFEASIBLE, None, stats)
    if obj_lin is None:
        return SolveOutcome(SolveStatus.SATISFIABLE, as_refs(best), stats)

    current = obj_value(best)
    while True:
        bound = _Lin(obj_lin, LE, current - 1)
        try:
            stats.solves += 1
            better = _Search(model, bound, stats, deadline).run()
        except _Deadline:
            return SolveOutcome(SolveStatus.TIMEOUT, None, stats)
        if better is None:
            return SolveOutcome(SolveStatus.SATISFIABLE, as_refs(best), stats, objective=current)
        best = better
        current = obj_value(best)


def check_assignment(model: Model, assignment: dict[VarRef, int]) -> bool:
    """Independent semantic evaluation of every constraint (used by tests)."""
    if model.root_infeasible:
        return False
    val = {model._own(ref): v for ref, v in assignment.items()}
    for i in range(len(model.lo)):
        x = val.get(i)
        if x is None or not (model.lo[i] <= x <= model.hi[i]):
            return False

    def lin_holds(lin: _Lin) -> bool:
        total = sum(c * val[v] for c, v in lin.terms)
        if lin.rel == LE:
            return total <= lin.rhs
        if lin.rel == EQ:
            return total == lin.rhs
        return total != lin.rhs

    for c in model.constraints:
        if c.kind == "lin":
            if not lin_holds(c.lin):
                return False
        elif c.kind == "reif":
            if (val[c.bvar] == 1) != lin_holds(c.lin):
                return False
        elif c.kind == "bool":
            truths = [val[v] == w for v, w in c.lits]
            want = all(truths) if c.op == "and" else any(truths)
            if (val[c.bvar] == 1) != want:
                return False
        elif c.kind == "impl":
            v, value = c.trigger
            if val[v] == value and not lin_holds(c.lin):
                return False
        elif c.kind == "nogood":
            if all(val[v] == value for v, value in c.lits):
                return False
    return True
