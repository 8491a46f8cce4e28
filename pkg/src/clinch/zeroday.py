"""0-day clinch decisions: can this team still be eliminated (or still qualify)?

The decision runs a loop: solve a win assignment model over remaining-game
outcome counts and ranking indicator variables; if a prospective scenario has
teams tied through total wins, validate the solver's ranking guesses against
the head-to-head tally and, where ties run deeper, a goal assignment model.
Refuted guesses are excluded with no-good constraints and the model re-solved,
until a valid scenario is found (not clinched) or none exists (clinched).
"""

from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import engine
from .engine import Model, SolveStatus, VarRef
from .league import (
    Game,
    GameResult,
    LeagueError,
    OutcomeKind,
    StandingsSnapshot,
    WinType,
    compute_record,
    placeholder_result,
    rank_conference,
)


class Mode(enum.Enum):
    PLAYOFF = "playoff"  # clinched a playoff berth?
    ELIMINATION = "elimination"  # clinched elimination?


class Verdict(enum.Enum):
    CLINCHED = "clinched"
    NOT_CLINCHED = "not_clinched"
    TIMEOUT = "timeout"


@dataclass
class Diagnostics:
    iterations: int = 0
    no_goods_added: int = 0
    goal_model_runs: int = 0
    solver_nodes: int = 0
    eq17_only_infeasible: bool = False  # goal model failed only via the total-tie ban


@dataclass
class ClinchDetermination:
    team: str
    mode: Mode
    verdict: Verdict
    counterexample: Optional[dict[str, GameResult]] = None
    diagnostics: Diagnostics = field(default_factory=Diagnostics)


@dataclass(frozen=True)
class RemainingGame:
    game_id: str
    date: object
    home: str
    away: str

    def pair(self) -> tuple[str, str]:
        return (self.home, self.away) if self.home < self.away else (self.away, self.home)


class LeagueState:
    """Aggregate view of one conference: current stats plus remaining games.

    This is the working representation behind zero_day; the presolve checks of
    the lookahead search build hypothetical states directly (including
    deliberately impossible ones such as every team losing simultaneously).
    """

    def __init__(self, structure, conference: str):
        self.structure = structure
        self.conference = conference
        self.conf_teams: list[str] = structure.teams_in_conference(conference)
        self.points0: dict[str, int] = {}
        self.regw0: dict[str, int] = {}
        self.otw0: dict[str, int] = {}
        self.sow0: dict[str, int] = {}
        self.gp0: dict[str, int] = {}
        self.delta0: dict[str, int] = {}
        self.goals0: dict[str, int] = {}
        # (a, b) with a < b -> [(date, game_id, home, pts_a, pts_b)]
        self.mutual_played: dict[tuple[str, str], list[tuple]] = {}
        self.remaining: list[RemainingGame] = []
        self.total_games: dict[str, int] = {}

    @classmethod
    def from_snapshot(cls, snapshot: StandingsSnapshot, conference: str) -> "LeagueState":
        st = cls(snapshot.structure, conference)
        conf = set(st.conf_teams)
        for t in st.conf_teams:
            rec = compute_record(snapshot, t)
            st.points0[t] = rec.points
            st.regw0[t] = rec.regulation_wins
            st.otw0[t] = rec.overtime_wins
            st.sow0[t] = rec.shootout_wins
            st.gp0[t] = rec.games_played
            st.delta0[t] = rec.goal_differential
            st.goals0[t] = rec.goals_for
        for g in snapshot.games:
            in_conf = (g.home in conf) + (g.away in conf)
            if in_conf == 0:
                continue
            if g.played:
                if in_conf == 2:
                    a, b = (g.home, g.away) if g.home < g.away else (g.away, g.home)
                    st.mutual_played.setdefault((a, b), []).append(
                        (g.date, g.game_id, g.home, g.outcome_for(a).points, g.outcome_for(b).points)
                    )
            else:
                st.remaining.append(RemainingGame(g.game_id, g.date, g.home, g.away))
        st.remaining.sort(key=lambda r: (r.date, r.game_id))
        for t in st.conf_teams:
            st.total_games[t] = st.gp0[t] + sum(
                1 for r in st.remaining if t in (r.home, r.away)
            )
        return st

    def copy(self) -> "LeagueState":
        dup = LeagueState(self.structure, self.conference)
        dup.conf_teams = list(self.conf_teams)
        for name in ("points0", "regw0", "otw0", "sow0", "gp0", "delta0", "goals0", "total_games"):
            setattr(dup, name, dict(getattr(self, name)))
        dup.mutual_played = {k: list(v) for k, v in self.mutual_played.items()}
        dup.remaining = list(self.remaining)
        return dup

    def _in_conf(self, team: str) -> bool:
        return team in self.points0

    def _drop_remaining(self, game_id: str) -> RemainingGame:
        for i, r in enumerate(self.remaining):
            if r.game_id == game_id:
                return self.remaining.pop(i)
        raise LeagueError(f"game {game_id!r} is not a remaining game of this state")

    def _mutual_entry(self, rg: RemainingGame, pts_home: int, pts_away: int):
        a, b = rg.pair()
        pts_a, pts_b = (pts_home, pts_away) if rg.home == a else (pts_away, pts_home)
        self.mutual_played.setdefault((a, b), []).append(
            (rg.date, rg.game_id, rg.home, pts_a, pts_b)
        )

    def apply_result(self, game_id: str, winner: str, win_type: WinType,
                     winner_goals: int, loser_goals: int) -> None:
        rg = self._drop_remaining(game_id)
        loser = rg.away if winner == rg.home else rg.home
        if winner not in (rg.home, rg.away):
            raise LeagueError(f"{winner!r} did not play in {game_id}")
        w_pts = 2
        l_pts = 0 if win_type is WinType.REGULATION else 1
        if self._in_conf(winner):
            self.gp0[winner] += 1
            self.points0[winner] += w_pts
            if win_type is WinType.REGULATION:
                self.regw0[winner] += 1
            elif win_type is WinType.OVERTIME:
                self.otw0[winner] += 1
            else:
                self.sow0[winner] += 1
            self.delta0[winner] += winner_goals - loser_goals
            self.goals0[winner] += winner_goals
        if self._in_conf(loser):
            self.gp0[loser] += 1
            self.points0[loser] += l_pts
            self.delta0[loser] += loser_goals - winner_goals
            self.goals0[loser] += loser_goals
        if self._in_conf(winner) and self._in_conf(loser):
            hp, ap = (w_pts, l_pts) if winner == rg.home else (l_pts, w_pts)
            self._mutual_entry(rg, hp, ap)

    def apply_double_loss(self, game_id: str) -> None:
        """Both teams take a regulation loss: the impossible best-case filler."""
        rg = self._drop_remaining(game_id)
        for t in (rg.home, rg.away):
            if self._in_conf(t):
                self.gp0[t] += 1
                self.delta0[t] -= 1
        if self._in_conf(rg.home) and self._in_conf(rg.away):
            self._mutual_entry(rg, 0, 0)

    def apply_double_win(self, game_id: str) -> None:
        """Both teams take a regulation win: the impossible worst-case filler."""
        rg = self._drop_remaining(game_id)
        for t in (rg.home, rg.away):
            if self._in_conf(t):
                self.gp0[t] += 1
                self.points0[t] += 2
                self.regw0[t] += 1
                self.delta0[t] += 1
                self.goals0[t] += 1
        if self._in_conf(rg.home) and self._in_conf(rg.away):
            self._mutual_entry(rg, 2, 2)

    def fingerprint(self) -> tuple:
        """Stable key for memoizing verdicts on equal states."""
        return (
            self.conference,
            tuple(sorted(self.points0.items())),
            tuple(sorted(self.regw0.items())),
            tuple(sorted(self.otw0.items())),
            tuple(sorted(self.sow0.items())),
            tuple(sorted(self.gp0.items())),
            tuple(sorted(self.delta0.items())),
            tuple(sorted(self.goals0.items())),
            tuple((r.game_id, r.home, r.away) for r in self.remaining),
            tuple(sorted((k, tuple(sorted(v))) for k, v in self.mutual_played.items())),
        )


# ---------------------------------------------------------------------------
# Win assignment model


@dataclass
class WinAssignmentVars:
    """Solver variables of the win assignment model, keyed by team pair."""

    counts: dict[tuple[str, str], tuple[VarRef, VarRef, VarRef]]  # (winner, loser) -> reg/ot/so
    pair_games: dict[tuple[str, str], list[RemainingGame]]  # unordered (a<b)
    ahead: dict[tuple[str, str], VarRef]  # a < b: a outranks b
    guess: dict[tuple[str, str], VarRef]  # a < b: deep-tie ranking guess
    div_top: dict[str, VarRef]
    top_behind: dict[str, VarRef]


def _team_exprs(state: LeagueState, vars_: WinAssignmentVars):
    """Linear expressions (terms, const) for final points/wins per conference team."""
    pts: dict[str, tuple[list, int]] = {}
    reg: dict[str, tuple[list, int]] = {}
    otw: dict[str, tuple[list, int]] = {}
    sow: dict[str, tuple[list, int]] = {}
    for t in state.conf_teams:
        pts[t] = ([], state.points0[t])
        reg[t] = ([], state.regw0[t])
        otw[t] = ([], state.otw0[t])
        sow[t] = ([], state.sow0[t])
    for (winner, loser), (xr, xo, xs) in vars_.counts.items():
        if winner in pts:
            pts[winner][0].extend([(2, xr), (2, xo), (2, xs)])
            reg[winner][0].append((1, xr))
            otw[winner][0].append((1, xo))
            sow[winner][0].append((1, xs))
        if loser in pts:
            pts[loser][0].extend([(1, xo), (1, xs)])
    return pts, reg, otw, sow


def build_win_assignment(
    state: LeagueState, k: str, mode: Mode
) -> tuple[Model, WinAssignmentVars]:
    """Construct the constraint model seeking an elimination (or qualification)
    scenario for team k over the remaining games of k's conference."""
    if k not in state.points0:
        raise LeagueError(f"team {k!r} is not in conference {state.conference!r}")
    structure = state.structure
    m = engine.new_model()

    pair_games: dict[tuple[str, str], list[RemainingGame]] = {}
    for rg in state.remaining:
        pair_games.setdefault(rg.pair(), []).append(rg)
    for games in pair_games.values():
        games.sort(key=lambda r: (r.date, r.game_id))

    counts: dict[tuple[str, str], tuple[VarRef, VarRef, VarRef]] = {}
    for (a, b), games in sorted(pair_games.items()):
        g = len(games)
        for winner, loser in ((a, b), (b, a)):
            if mode is Mode.PLAYOFF:
                fixed = (0, 0, 0) if winner == k else ((g, 0, 0) if loser == k else None)
            else:
                fixed = ((g, 0, 0) if winner == k else (0, 0, 0)) if k in (winner, loser) else None
            name = f"x[{winner}>{loser}]"
            if fixed is not None:
                counts[(winner, loser)] = (
                    m.add_int_var(fixed[0], fixed[0], name + "R"),
                    m.add_int_var(fixed[1], fixed[1], name + "O"),
                    m.add_int_var(fixed[2], fixed[2], name + "S"),
                )
            else:
                counts[(winner, loser)] = (
                    m.add_int_var(0, g, name + "R", prefer_high=True),
                    m.add_int_var(0, g, name + "O"),
                    m.add_int_var(0, g, name + "S"),
                )
        six = list(counts[(a, b)]) + list(counts[(b, a)])
        m.post_linear([(1, v) for v in six], "==", g)

    vars_ = WinAssignmentVars(counts, pair_games, {}, {}, {}, {})
    conf = state.conf_teams
    pts, reg, otw, sow = _team_exprs(state, vars_)

    def diff(expr_map, a, b):
        terms_a, const_a = expr_map[a]
        terms_b, const_b = expr_map[b]
        return list(terms_a) + [(-c, v) for c, v in terms_b], const_a - const_b

    def atom(name, terms, const, rel):
        """Reified comparison (value REL 0); folded to a constant when the
        variable bounds already decide it."""
        lo = const
        hi = const
        for c, v in terms:
            if c > 0:
                lo += c * m.lo[v.index]
                hi += c * m.hi[v.index]
            else:
                lo += c * m.hi[v.index]
                hi += c * m.lo[v.index]
        if rel == ">":
            if lo > 0:
                return True
            if hi <= 0:
                return False
        else:  # "=="
            if lo == hi == 0:
                return True
            if hi < 0 or lo > 0:
                return False
        b = m.add_bool_var(name, branch_class=2)
        m.post_reified(b, ("lin", terms, rel, -const))
        return b

    def conj(x, y):
        """x AND y where either side may be a constant."""
        if x is False or y is False:
            return False
        if x is True:
            return y
        if y is True:
            return x
        d = m.add_bool_var(branch_class=2)
        m.post_reified(d, ("and", [(x, 1), (y, 1)]))
        return d

    for a, b in itertools.combinations(conf, 2):
        u = m.add_bool_var(f"guess[{a}>{b}]", branch_class=1)
        vars_.guess[(a, b)] = u

        levels = []
        pt_t, pt_c = diff(pts, a, b)
        levels.append((
            atom(f"gtP[{a},{b}]", pt_t, pt_c, ">"),
            atom(f"eqP[{a},{b}]", pt_t, pt_c, "=="),
        ))
        ga, gb = state.total_games[a], state.total_games[b]
        if ga != gb:
            # Point percentage at season end: points_a/ga vs points_b/gb,
            # cross-multiplied to stay integral.
            ta, ca = pts[a]
            tb, cb = pts[b]
            pct_terms = [(gb * c, v) for c, v in ta] + [(-ga * c, v) for c, v in tb]
            pct_const = gb * ca - ga * cb
            levels.append((
                atom(f"gtPct[{a},{b}]", pct_terms, pct_const, ">"),
                atom(f"eqPct[{a},{b}]", pct_terms, pct_const, "=="),
            ))
        for tag, expr in (("R", reg), ("O", otw), ("S", sow)):
            t_, c_ = diff(expr, a, b)
            levels.append((
                atom(f"gt{tag}[{a},{b}]", t_, c_, ">"),
                atom(f"eq{tag}[{a},{b}]", t_, c_, "=="),
            ))

        # ahead <-> gt1 v (eq1 ^ gt2) v ... v (eq1 ^..^ eqN ^ guess)
        disjuncts = [levels[0][0]]
        prefix = levels[0][1]
        for gt, eq in levels[1:]:
            if prefix is False:
                break
            disjuncts.append(conj(prefix, gt))
            prefix = conj(prefix, eq)
        if prefix is not False:
            disjuncts.append(conj(prefix, u))

        if any(d is True for d in disjuncts):
            ahead = m.add_bool_var(f"ahead[{a}>{b}]", branch_class=2)
            m.post_linear([(1, ahead)], "==", 1)
        else:
            live = [d for d in disjuncts if d is not False]
            ahead = m.add_bool_var(f"ahead[{a}>{b}]", branch_class=2)
            if live:
                m.post_reified(ahead, ("or", [(d, 1) for d in live]))
            else:
                m.post_linear([(1, ahead)], "==", 0)
        vars_.ahead[(a, b)] = ahead

    def ahead_lit(x: str, y: str) -> tuple[VarRef, int]:
        """Literal that is true iff x outranks y."""
        return (vars_.ahead[(x, y)], 1) if x < y else (vars_.ahead[(y, x)], 0)

    def ahead_term(x: str, y: str) -> tuple[list, int]:
        """ahead(x, y) as (terms, const)."""
        if x < y:
            return [(1, vars_.ahead[(x, y)])], 0
        return [(-1, vars_.ahead[(y, x)])], 1

    top_n = structure.top_per_division
    for div in structure.divisions_in(state.conference):
        div_teams = structure.teams_in_division(div)
        for t in div_teams:
            tv = m.add_bool_var(f"divtop[{t}]", branch_class=2)
            if mode is Mode.PLAYOFF and t == k:
                # An eliminated team cannot hold a divisional berth.
                m.post_linear([(1, tv)], "==", 0)
            vars_.div_top[t] = tv
            terms, const = [], 0
            for j in div_teams:
                if j == t:
                    continue
                tj, cj = ahead_term(t, j)
                terms.extend(tj)
                const += cj
            need = len(div_teams) - top_n
            m.post_reified(tv, ("lin", terms, ">=", need - const))
        m.post_exactly([vars_.div_top[t] for t in div_teams], min(top_n, len(div_teams)))
        # Teams outside the top never outrank teams inside it.
        for t, j in itertools.permutations(div_teams, 2):
            m.post_implication(
                ahead_lit(j, t),
                ("lin", [(1, vars_.div_top[j]), (-1, vars_.div_top[t])], ">=", 0),
            )

    blockers_terms: list = []
    blockers_const = 0
    for i in conf:
        if i == k:
            continue
        d = m.add_bool_var(f"topbehind[{i}]", branch_class=2)
        vars_.top_behind[i] = d
        m.post_reified(d, ("and", [(vars_.div_top[i], 1), ahead_lit(k, i)]))
        ti, ci = ahead_term(i, k)
        blockers_terms.extend(ti)
        blockers_const += ci
        blockers_terms.append((1, d))
    berths = structure.berths_per_conference
    if mode is Mode.PLAYOFF:
        m.post_linear(blockers_terms, ">=", berths - blockers_const)
    else:
        room = m.add_bool_var("wildcard_room", branch_class=2)
        m.post_reified(room, ("lin", blockers_terms, "<=", berths - 1 - blockers_const))
        m.post_linear([(1, vars_.div_top[k]), (1, room)], ">=", 1)
    return m, vars_


# ---------------------------------------------------------------------------
# Solution analysis: tie groups, head-to-head evaluation, realization


@dataclass
class WinSolution:
    counts: dict[tuple[str, str], tuple[int, int, int]]
    guesses: dict[tuple[str, str], int]
    final_points: dict[str, int]
    final_regw: dict[str, int]
    final_otw: dict[str, int]
    final_sow: dict[str, int]


def extract_solution(state: LeagueState, vars_: WinAssignmentVars, assignment) -> WinSolution:
    counts = {
        key: (assignment[xr], assignment[xo], assignment[xs])
        for key, (xr, xo, xs) in vars_.counts.items()
    }
    guesses = {key: assignment[u] for key, u in vars_.guess.items()}
    pts = dict(state.points0)
    regw = dict(state.regw0)
    otw = dict(state.otw0)
    sow = dict(state.sow0)
    for (winner, loser), (r, o, s) in counts.items():
        if winner in pts:
            pts[winner] += 2 * (r + o + s)
            regw[winner] += r
            otw[winner] += o
            sow[winner] += s
        if loser in pts:
            pts[loser] += o + s
    return WinSolution(counts, guesses, pts, regw, otw, sow)


def tie_groups(state: LeagueState, sol: WinSolution) -> list[list[str]]:
    """Maximal groups tied on points, point percentage, and all win counts."""
    by_key: dict[tuple, list[str]] = {}
    for t in state.conf_teams:
        key = (
            sol.final_points[t],
            Fraction(sol.final_points[t], 2 * state.total_games[t]) if state.total_games[t] else Fraction(0),
            sol.final_regw[t],
            sol.final_regw[t] + sol.final_otw[t],
            sol.final_regw[t] + sol.final_otw[t] + sol.final_sow[t],
        )
        by_key.setdefault(key, []).append(t)
    return [sorted(g) for g in by_key.values() if len(g) >= 2]


# Directional outcome kinds for a pair (a, b), from a's perspective,
# in the canonical realization order.
_DIR_KINDS = (
    ("a", WinType.REGULATION),
    ("a", WinType.OVERTIME),
    ("a", WinType.SHOOTOUT),
    ("b", WinType.SHOOTOUT),
    ("b", WinType.OVERTIME),
    ("b", WinType.REGULATION),
)


def _count_for(sol_counts, a, b, side, win_type):
    winner, loser = (a, b) if side == "a" else (b, a)
    r, o, s = sol_counts.get((winner, loser), (0, 0, 0))
    return {WinType.REGULATION: r, WinType.OVERTIME: o, WinType.SHOOTOUT: s}[win_type]


def _pts_for(side, win_type):
    lp = 0 if win_type is WinType.REGULATION else 1
    return (2, lp) if side == "a" else (lp, 2)


@dataclass
class PairTieInfo:
    """Head-to-head data for one pair inside a tie group."""

    a: str
    b: str
    base_a: int  # points over counted games, excluding the excluded slot if free
    base_b: int
    free_options: Optional[list[tuple[str, WinType]]] = None  # choices for a free excluded slot


def _pair_tie_info(state: LeagueState, sol: WinSolution, a: str, b: str) -> PairTieInfo:
    """TB5 inputs for pair (a, b): fixed tallies plus excluded-slot freedom."""
    assert a < b
    played = list(state.mutual_played.get((a, b), []))
    future = [rg for rg in state.remaining if rg.pair() == (a, b)]
    homes_a = sum(1 for e in played if e[2] == a) + sum(1 for rg in future if rg.home == a)
    homes_b = (len(played) + len(future)) - homes_a

    total_a = sum(e[3] for e in played)
    total_b = sum(e[4] for e in played)
    for side, wt in _DIR_KINDS:
        n = _count_for(sol.counts, a, b, side, wt)
        pa, pb = _pts_for(side, wt)
        total_a += n * pa
        total_b += n * pb

    if homes_a == homes_b:
        return PairTieInfo(a, b, total_a, total_b)
    surplus = a if homes_a > homes_b else b
    candidates = [(e[0], e[1], "played", e) for e in played if e[2] == surplus]
    candidates += [(rg.date, rg.game_id, "future", rg) for rg in future if rg.home == surplus]
    candidates.sort(key=lambda c: (c[0], c[1]))
    first = candidates[0]
    if first[2] == "played":
        e = first[3]
        return PairTieInfo(a, b, total_a - e[3], total_b - e[4])
    # The excluded game is unplayed: its outcome is whichever of the pair's
    # remaining outcomes the realization places there.
    options = []
    for side, wt in _DIR_KINDS:
        if _count_for(sol.counts, a, b, side, wt) >= 1:
            options.append((side, wt))
    return PairTieInfo(a, b, total_a, total_b, free_options=options)


@dataclass
class GroupEvaluation:
    group: list[str]
    consistent: bool
    # Each candidate: (choice per free pair, deferred pairs still tied at TB5)
    candidates: list[tuple[dict[tuple[str, str], tuple[str, WinType]], list[tuple[str, str]]]]


def evaluate_group(state: LeagueState, sol: WinSolution, group: list[str]) -> GroupEvaluation:
    """Check the ranking guesses of one tie group against head-to-head points.

    Enumerates the (rare) choices for unplayed excluded home games; a guess is
    consistent if some choice yields head-to-head tallies that agree with it on
    every strictly-ordered pair.  Pairs tied on the tally are deferred to the
    goal model.
    """
    pairs = [tuple(p) for p in itertools.combinations(group, 2)]
    infos = {p: _pair_tie_info(state, sol, *p) for p in pairs}
    free_pairs = [p for p in pairs if infos[p].free_options]
    option_lists = [infos[p].free_options for p in free_pairs]
    candidates = []
    for combo in itertools.product(*option_lists) if free_pairs else [()]:
        tally = {t: 0 for t in group}
        for p in pairs:
            info = infos[p]
            ta, tb = info.base_a, info.base_b
            if info.free_options:
                side, wt = combo[free_pairs.index(p)]
                pa, pb = _pts_for(side, wt)
                ta -= pa
                tb -= pb
            tally[info.a] += ta
            tally[info.b] += tb
        ok = True
        deferred = []
        for (x, y) in pairs:
            if tally[x] == tally[y]:
                deferred.append((x, y))
                continue
            expected = 1 if tally[x] > tally[y] else 0
            if sol.guesses[(x, y)] != expected:
                ok = False
                break
        if ok:
            candidates.append((dict(zip(free_pairs, combo)), deferred))
    return GroupEvaluation(group=group, consistent=bool(candidates), candidates=candidates)


def realize_counts(
    state: LeagueState,
    sol: WinSolution,
    slot_choices: dict[tuple[str, str], tuple[str, WinType]],
) -> dict[str, GameResult]:
    """Turn outcome counts into concrete results for every remaining game.

    Games of each pair are filled in schedule order with the pair's outcomes in
    a fixed canonical order; a chosen outcome is pinned to an excluded
    head-to-head slot first when the tie evaluation fixed one.  Scores are
    placeholders (1-0 regulation, 2-1 otherwise) until the goal model refines
    the games it covers.
    """
    results: dict[str, GameResult] = {}
    by_pair: dict[tuple[str, str], list[RemainingGame]] = {}
    for rg in state.remaining:
        by_pair.setdefault(rg.pair(), []).append(rg)
    for (a, b), games in by_pair.items():
        games.sort(key=lambda r: (r.date, r.game_id))
        outcomes: list[tuple[str, WinType]] = []
        for side, wt in _DIR_KINDS:
            outcomes.extend([(side, wt)] * _count_for(sol.counts, a, b, side, wt))
        slots = list(games)
        choice = slot_choices.get((a, b))
        if choice is not None:
            # The excluded slot is the earliest home game of the surplus team;
            # recompute it the same way the evaluation did.
            played = state.mutual_played.get((a, b), [])
            homes_a = sum(1 for e in played if e[2] == a) + sum(1 for rg in games if rg.home == a)
            homes_b = (len(played) + len(games)) - homes_a
            surplus = a if homes_a > homes_b else b
            future_home = [rg for rg in games if rg.home == surplus]
            slot = min(future_home, key=lambda r: (r.date, r.game_id))
            outcomes.remove(choice)
            results[slot.game_id] = _result_for(slot, a, choice)
            slots.remove(slot)
        for rg, (side, wt) in zip(slots, outcomes):
            results[rg.game_id] = _result_for(rg, a, (side, wt))
    return results


def _result_for(rg: RemainingGame, a: str, outcome: tuple[str, WinType]) -> GameResult:
    side, wt = outcome
    pair_a, pair_b = rg.pair()
    winner = pair_a if side == "a" else pair_b
    kind_home = OutcomeKind.win(wt) if winner == rg.home else OutcomeKind.win(wt).complement
    game = Game(rg.game_id, rg.date, rg.home, rg.away, None)
    return placeholder_result(game, kind_home)


# ---------------------------------------------------------------------------
# Goal assignment model


@dataclass
class GoalAssignmentVars:
    scores: dict[str, tuple[VarRef, VarRef]]  # game_id -> (home, away)
    teams: list[str]


def build_goal_assignment(
    state: LeagueState,
    realized: dict[str, GameResult],
    deferred_pairs: list[tuple[str, str]],
    guesses: dict[tuple[str, str], int],
) -> tuple[Model, GoalAssignmentVars]:
    """Score-assignment model validating goal-based tie-breakers.

    Covers every remaining game touching a team still tied after head-to-head;
    played games enter through fixed differential/goals-scored offsets.  Win
    margins follow the realized outcome types; a one-goal margin is required
    for overtime and shootout results.  Total ties are forbidden outright.
    """
    tied_teams = sorted({t for p in deferred_pairs for t in p})
    m = engine.new_model()
    scores: dict[str, tuple[VarRef, VarRef]] = {}
    delta_terms: dict[str, list] = {t: [] for t in tied_teams}
    goals_terms: dict[str, list] = {t: [] for t in tied_teams}
    for rg in state.remaining:
        if rg.home not in tied_teams and rg.away not in tied_teams:
            continue
        res = realized[rg.game_id]
        sh = m.add_int_var(0, 99, f"s[{rg.game_id}:h]")
        sa = m.add_int_var(0, 99, f"s[{rg.game_id}:a]")
        scores[rg.game_id] = (sh, sa)
        margin_terms = [(1, sh), (-1, sa)] if res.winner == rg.home else [(1, sa), (-1, sh)]
        if res.win_type is WinType.REGULATION:
            m.post_linear(margin_terms, ">=", 1)
        else:
            m.post_linear(margin_terms, "==", 1)
        if rg.home in tied_teams:
            delta_terms[rg.home].extend([(1, sh), (-1, sa)])
            goals_terms[rg.home].append((1, sh))
        if rg.away in tied_teams:
            delta_terms[rg.away].extend([(1, sa), (-1, sh)])
            goals_terms[rg.away].append((1, sa))

    for (i, j) in deferred_pairs:
        hi, lo = (i, j) if guesses[(i, j)] == 1 else (j, i)
        d_terms = delta_terms[hi] + [(-c, v) for c, v in delta_terms[lo]]
        d_const = state.delta0[hi] - state.delta0[lo]
        f_terms = goals_terms[hi] + [(-c, v) for c, v in goals_terms[lo]]
        f_const = state.goals0[hi] - state.goals0[lo]
        gt_d = m.add_bool_var(f"gtD[{hi},{lo}]", branch_class=2)
        eq_d = m.add_bool_var(f"eqD[{hi},{lo}]", branch_class=2)
        gt_f = m.add_bool_var(f"gtF[{hi},{lo}]", branch_class=2)
        m.post_reified(gt_d, ("lin", d_terms, ">", -d_const))
        m.post_reified(eq_d, ("lin", d_terms, "==", -d_const))
        m.post_reified(gt_f, ("lin", f_terms, ">", -f_const))
        both = m.add_bool_var(branch_class=2)
        m.post_reified(both, ("and", [(eq_d, 1), (gt_f, 1)]))
        m.post_linear([(1, gt_d), (1, both)], ">=", 1)
        # No total ties: equal differential forces unequal goals scored.
        m.post_implication((eq_d, 1), ("lin", f_terms, "!=", -f_const))
    return m, GoalAssignmentVars(scores=scores, teams=tied_teams)


# ---------------------------------------------------------------------------
# The 0-day loop


def zero_day(
    snapshot: StandingsSnapshot,
    team: str,
    mode: Mode = Mode.PLAYOFF,
    deadline_s: float = 300.0,
    verify: bool = True,
) -> ClinchDetermination:
    """Decide whether `team` has clinched the playoffs (or elimination)."""
    conference = snapshot.structure.conference_of(team)
    state = LeagueState.from_snapshot(snapshot, conference)
    det = zero_day_state(state, team, mode, deadline_s)
    if det.verdict is Verdict.NOT_CLINCHED and det.counterexample is not None:
        full = dict(det.counterexample)
        for g in snapshot.remaining_games():
            if g.game_id not in full:
                full[g.game_id] = placeholder_result(g, OutcomeKind.RW)
        det.counterexample = full
        if verify:
            _verify_counterexample(snapshot, team, mode, full)
    return det


def _verify_counterexample(snapshot, team, mode, results):
    completed = snapshot.with_results(results)
    conference = snapshot.structure.conference_of(team)
    ranking = rank_conference(completed, conference)
    qualified = team in ranking.qualified
    expected = mode is Mode.ELIMINATION
    if qualified != expected:
        raise AssertionError(
            f"internal error: counterexample replay puts {team} "
            f"{'in' if qualified else 'out of'} the playoffs under {mode}"
        )


def zero_day_state(
    state: LeagueState,
    team: str,
    mode: Mode,
    deadline_s: float = 300.0,
) -> ClinchDetermination:
    deadline = time.monotonic() + deadline_s
    diag = Diagnostics()
    model, vars_ = build_win_assignment(state, team, mode)
    while True:
        if time.monotonic() > deadline:
            return ClinchDetermination(team, mode, Verdict.TIMEOUT, diagnostics=diag)
        outcome = engine.solve(model, deadline=deadline)
        diag.solver_nodes += outcome.stats.nodes
        if outcome.status is SolveStatus.TIMEOUT:
            return ClinchDetermination(team, mode, Verdict.TIMEOUT, diagnostics=diag)
        if outcome.status is SolveStatus.INFEASIBLE:
            return ClinchDetermination(team, mode, Verdict.CLINCHED, diagnostics=diag)
        diag.iterations += 1
        sol = extract_solution(state, vars_, outcome.assignment)
        groups = tie_groups(state, sol)
        if not groups:
            results = realize_counts(state, sol, {})
            return ClinchDetermination(team, mode, Verdict.NOT_CLINCHED, results, diag)

        evaluations = [evaluate_group(state, sol, g) for g in groups]
        bad = [ev for ev in evaluations if not ev.consistent]
        if bad:
            for ev in bad:
                _post_no_good(model, vars_, outcome.assignment, ev.group)
                diag.no_goods_added += 1
            continue

        success = _resolve_with_goals(state, sol, evaluations, diag, deadline)
        if success is not None:
            return ClinchDetermination(team, mode, Verdict.NOT_CLINCHED, success, diag)
        if time.monotonic() > deadline:
            return ClinchDetermination(team, mode, Verdict.TIMEOUT, diagnostics=diag)
        involved = [ev.group for ev in evaluations if any(d for _, d in ev.candidates)]
        for group in involved or [ev.group for ev in evaluations]:
            _post_no_good(model, vars_, outcome.assignment, group)
            diag.no_goods_added += 1


def _post_no_good(model, vars_, assignment, group):
    """Forbid this exact combination of win counts and the group's guesses."""
    lits = []
    for triple in vars_.counts.values():
        for v in triple:
            lits.append((v, assignment[v]))
    group_set = set(group)
    for (a, b), u in vars_.guess.items():
        if a in group_set and b in group_set:
            lits.append((u, assignment[u]))
    model.post_no_good(lits)


def _resolve_with_goals(state, sol, evaluations, diag, deadline):
    """Try candidate excluded-slot choices; validate deep ties with goals.

    Returns realized results on success, else None (caller posts no-goods).
    """
    per_group_candidates = [ev.candidates for ev in evaluations]
    for combo in itertools.product(*per_group_candidates):
        slot_choices: dict = {}
        deferred: list[tuple[str, str]] = []
        for choice_map, pairs in combo:
            slot_choices.update(choice_map)
            deferred.extend(pairs)
        realized = realize_counts(state, sol, slot_choices)
        if not deferred:
            return realized
        diag.goal_model_runs += 1
        gm, gvars = build_goal_assignment(state, realized, deferred, sol.guesses)
        obj = [(1, v) for pair in gvars.scores.values() for v in pair]
        out = engine.solve(gm, deadline=deadline, minimize=obj)
        diag.solver_nodes += out.stats.nodes
        if out.status is SolveStatus.SATISFIABLE:
            return _apply_goal_scores(state, realized, gvars, out.assignment)
        if out.status is SolveStatus.TIMEOUT:
            return None
    return None


def _apply_goal_scores(state, realized, gvars, assignment):
    by_id = {rg.game_id: rg for rg in state.remaining}
    out = dict(realized)
    for game_id, (sh, sa) in gvars.scores.items():
        rg = by_id[game_id]
        prev = realized[game_id]
        out[game_id] = GameResult(
            winner=prev.winner,
            win_type=prev.win_type,
            home_goals=assignment[sh],
            away_goals=assignment[sa],
        )
    return out


def evaluate_tie_groups(state: LeagueState, sol: WinSolution):
    """Public tie-group report: groups, consistency, and deferred pairs."""
    groups = tie_groups(state, sol)
    return [evaluate_group(state, sol, g) for g in groups]
