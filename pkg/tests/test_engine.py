import itertools
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clinch.engine import (
    EngineError,
    Model,
    SolveStatus,
    check_assignment,
    new_model,
    solve,
)


def test_empty_model_satisfiable():
    m = new_model()
    out = solve(m)
    assert out.status is SolveStatus.SATISFIABLE
    assert out.assignment == {}


def test_inverted_bounds_rejected():
    m = new_model()
    with pytest.raises(EngineError):
        m.add_int_var(1, 0)


def test_basic_infeasible():
    m = new_model()
    x = m.add_int_var(0, 1)
    y = m.add_int_var(0, 1)
    m.post_linear([(1, x), (1, y)], "==", 3)
    assert solve(m).status is SolveStatus.INFEASIBLE


def test_minimize():
    m = new_model()
    x = m.add_int_var(2, 9)
    out = solve(m, minimize=[(1, x)])
    assert out.status is SolveStatus.SATISFIABLE
    assert out.objective == 2
    assert out.assignment[x] == 2


def test_fixed_var_and_goal_bound():
    m = new_model()
    x = m.add_int_var(5, 5)
    s = m.add_int_var(0, 99)
    m.post_linear([(1, s), (-1, x)], ">", 0)
    out = solve(m)
    assert out.status is SolveStatus.SATISFIABLE
    assert out.assignment[x] == 5
    assert out.assignment[s] >= 6


def test_exactly():
    m = new_model()
    ts = [m.add_bool_var() for _ in range(8)]
    m.post_exactly(ts, 3)
    out = solve(m)
    assert out.status is SolveStatus.SATISFIABLE
    assert sum(out.assignment[t] for t in ts) == 3


def test_reified_comparison_forced():
    m = new_model()
    x = m.add_int_var(3, 3)
    y = m.add_int_var(1, 1)
    b = m.add_bool_var()
    m.post_reified(b, ("lin", [(1, x), (-1, y)], ">", 0))
    out = solve(m)
    assert out.assignment[b] == 1


def test_reified_bool_or_and():
    m = new_model()
    a, b, c = (m.add_bool_var() for _ in range(3))
    r_or = m.add_bool_var()
    r_and = m.add_bool_var()
    m.post_reified(r_or, ("or", [(a, 1), (b, 1)]))
    m.post_reified(r_and, ("and", [(a, 1), (c, 0)]))
    m.post_linear([(1, a)], "==", 1)
    m.post_linear([(1, c)], "==", 0)
    out = solve(m)
    assert out.assignment[r_or] == 1
    assert out.assignment[r_and] == 1


def test_implication_inactive_when_trigger_false():
    m = new_model()
    y = m.add_bool_var()
    s1 = m.add_int_var(0, 5)
    s2 = m.add_int_var(0, 5)
    m.post_implication((y, 1), ("lin", [(1, s1), (-1, s2)], ">", 0))
    m.post_linear([(1, y)], "==", 0)
    m.post_linear([(1, s1)], "==", 0)
    m.post_linear([(1, s2)], "==", 5)
    assert solve(m).status is SolveStatus.SATISFIABLE


def test_implication_prunes_trigger():
    m = new_model()
    y = m.add_bool_var()
    s = m.add_int_var(0, 2)
    # y=1 would force s > 5, impossible
    m.post_implication((y, 1), ("lin", [(1, s)], ">", 5))
    out = solve(m)
    assert out.assignment[y] == 0


def test_unit_no_good():
    m = new_model()
    b = m.add_bool_var()
    m.post_no_good([(b, 1)])
    out = solve(m)
    assert out.assignment[b] == 0


def test_no_good_excludes_prior_solution():
    m = new_model()
    xs = [m.add_bool_var() for _ in range(3)]
    first = solve(m).assignment
    m.post_no_good([(x, first[x]) for x in xs])
    second = solve(m)
    assert second.status is SolveStatus.SATISFIABLE
    assert any(second.assignment[x] != first[x] for x in xs)


def test_exhausting_all_no_goods_infeasible():
    m = new_model()
    xs = [m.add_bool_var() for _ in range(3)]
    for bits in itertools.product((0, 1), repeat=3):
        m.post_no_good(list(zip(xs, bits)))
    assert solve(m).status is SolveStatus.INFEASIBLE


def test_no_good_monotone():
    m = new_model()
    x = m.add_int_var(0, 1)
    y = m.add_int_var(0, 1)
    m.post_linear([(1, x), (1, y)], "==", 5)
    assert solve(m).status is SolveStatus.INFEASIBLE
    m.post_no_good([(x, 0)])
    assert solve(m).status is SolveStatus.INFEASIBLE


def test_empty_no_good_rejected():
    m = new_model()
    with pytest.raises(EngineError):
        m.post_no_good([])


def test_foreign_handle_rejected():
    m1, m2 = new_model(), new_model()
    x = m1.add_int_var(0, 3)
    with pytest.raises(EngineError):
        m2.post_linear([(1, x)], "<=", 2)


def test_timeout_distinct_from_infeasible():
    m = new_model()
    xs = [m.add_int_var(0, 6) for _ in range(24)]
    # A hard, infeasible pigeonhole-flavored model to burn time on.
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            m.post_linear([(1, xs[i]), (-1, xs[j])], "!=", 0)
    out = solve(m, deadline=time.monotonic() + 0.05)
    assert out.status is SolveStatus.TIMEOUT


def test_determinism():
    def build():
        m = new_model()
        xs = [m.add_int_var(0, 3) for _ in range(6)]
        m.post_linear([(1, x) for x in xs], "==", 9)
        m.post_linear([(1, xs[0]), (-1, xs[1])], "<=", 1)
        return m, xs

    m1, xs1 = build()
    m2, xs2 = build()
    a1 = solve(m1).assignment
    a2 = solve(m2).assignment
    assert [a1[x] for x in xs1] == [a2[x] for x in xs2]


def test_dump_lists_constraints():
    m = new_model()
    x = m.add_int_var(0, 2, name="x")
    b = m.add_bool_var(name="b")
    m.post_linear([(1, x)], "<=", 1)
    m.post_reified(b, ("lin", [(1, x)], "==", 0))
    m.post_no_good([(b, 1)])
    text = m.dump()
    assert "var x in [0, 2]" in text
    assert "x <= 1" in text
    assert "forbid (b=1)" in text


# ---------------------------------------------------------------------------
# Exhaustive-enumeration oracle for small random models.

def _enumerate(model, domains):
    """All assignments satisfying the model, by brute force."""
    idxs = list(domains)
    sols = []
    for combo in itertools.product(*(domains[i] for i in idxs)):
        assignment = dict(zip(idxs, combo))
        if check_assignment(model, assignment):
            sols.append(assignment)
    return sols


@st.composite
def random_models(draw):
    m = new_model()
    n_int = draw(st.integers(1, 3))
    n_bool = draw(st.integers(1, 3))
    refs = []
    for _ in range(n_int):
        lo = draw(st.integers(-2, 1))
        hi = lo + draw(st.integers(0, 3))
        refs.append(m.add_int_var(lo, hi))
    for _ in range(n_bool):
        refs.append(m.add_bool_var())
    bools = refs[n_int:]
    rels = ["<=", ">=", "==", "!=", "<", ">"]
    n_cons = draw(st.integers(1, 5))
    for _ in range(n_cons):
        kind = draw(st.sampled_from(["lin", "reif", "bool", "impl", "nogood"]))
        terms = [
            (draw(st.integers(-2, 2)), draw(st.sampled_from(refs)))
            for _ in range(draw(st.integers(1, 3)))
        ]
        rel = draw(st.sampled_from(rels))
        rhs = draw(st.integers(-4, 4))
        if kind == "lin":
            m.post_linear(terms, rel, rhs)
        elif kind == "reif":
            m.post_reified(draw(st.sampled_from(bools)), ("lin", terms, rel, rhs))
        elif kind == "bool":
            lits = [
                (draw(st.sampled_from(bools)), draw(st.integers(0, 1)))
                for _ in range(draw(st.integers(1, 3)))
            ]
            m.post_reified(draw(st.sampled_from(bools)), (draw(st.sampled_from(["and", "or"])), lits))
        elif kind == "impl":
            trig = draw(st.sampled_from(refs))
            m.post_implication((trig, draw(st.integers(-2, 4))), ("lin", terms, rel, rhs))
        else:
            lits = [
                (draw(st.sampled_from(refs)), draw(st.integers(-2, 4)))
                for _ in range(draw(st.integers(1, 2)))
            ]
            m.post_no_good(lits)
    domains = {r: list(range(m.lo[r.index], m.hi[r.index] + 1)) for r in refs}
    return m, refs, domains


@given(random_models())
@settings(max_examples=150, deadline=None)
def test_solver_matches_enumeration(model_refs_domains):
    m, refs, domains = model_refs_domains
    sols = _enumerate(m, domains)
    out = solve(m)
    if sols:
        assert out.status is SolveStatus.SATISFIABLE
        assert check_assignment(m, out.assignment)
    else:
        assert out.status is SolveStatus.INFEASIBLE


@given(random_models())
@settings(max_examples=80, deadline=None)
def test_optimum_matches_enumeration(model_refs_domains):
    m, refs, domains = model_refs_domains
    obj = [(1, r) for r in refs[:2]]
    sols = _enumerate(m, domains)
    out = solve(m, minimize=obj)
    if sols:
        best = min(sum(s[r] for _, r in obj) for s in sols)
        assert out.status is SolveStatus.SATISFIABLE
        assert out.objective == best
        assert check_assignment(m, out.assignment)
    else:
        assert out.status is SolveStatus.INFEASIBLE
