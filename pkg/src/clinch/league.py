"""League domain model: teams, schedule, records, tie-breakers, qualification.

Implements the post-2019-20 NHL rules: teams are ranked by points, ties are
broken by point percentage, regulation wins, regulation+overtime wins, total
wins, head-to-head points (with the odd-home-game exclusion), goal
differential, and goals scored.  Division sizes and berth counts are
parameterized so tiny synthetic leagues can be built for testing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import date as Date
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence


class LeagueError(ValueError):
    """Raised for malformed league structures or inconsistent inputs."""


class TotalTieError(LeagueError):
    """Two or more teams remain tied after every tie-breaker."""


class WinType(str, enum.Enum):
    REGULATION = "regulation"
    OVERTIME = "overtime"
    SHOOTOUT = "shootout"


class OutcomeKind(enum.Enum):
    """The six possible results of a game from one team's perspective."""

    RL = ("RL", 0, 0)
    OTL = ("OTL", 1, 1)
    SOL = ("SOL", 2, 1)
    SOW = ("SOW", 3, 2)
    OTW = ("OTW", 4, 2)
    RW = ("RW", 5, 2)

    def __init__(self, code: str, strength: int, points: int):
        self.code = code
        self.strength_rank = strength
        self._points = points

    @property
    def points(self) -> int:
        return self._points

    @property
    def is_win(self) -> bool:
        return self._points == 2

    @property
    def win_type(self) -> WinType:
        """How the game ended (applies to the loss outcomes as well)."""
        return {
            "R": WinType.REGULATION,
            "O": WinType.OVERTIME,
            "S": WinType.SHOOTOUT,
        }[self.code[0]]

    @property
    def complement(self) -> "OutcomeKind":
        return _COMPLEMENT[self]

    @classmethod
    def from_code(cls, code: str) -> "OutcomeKind":
        try:
            return _BY_CODE[code.upper()]
        except KeyError:
            raise LeagueError(f"unknown outcome code {code!r}") from None

    @classmethod
    def win(cls, win_type: WinType) -> "OutcomeKind":
        return {
            WinType.REGULATION: cls.RW,
            WinType.OVERTIME: cls.OTW,
            WinType.SHOOTOUT: cls.SOW,
        }[win_type]


_BY_CODE = {k.code: k for k in OutcomeKind}
_COMPLEMENT = {
    OutcomeKind.RW: OutcomeKind.RL,
    OutcomeKind.RL: OutcomeKind.RW,
    OutcomeKind.OTW: OutcomeKind.OTL,
    OutcomeKind.OTL: OutcomeKind.OTW,
    OutcomeKind.SOW: OutcomeKind.SOL,
    OutcomeKind.SOL: OutcomeKind.SOW,
}

ALL_OUTCOMES = tuple(sorted(OutcomeKind, key=lambda k: k.strength_rank))


def points_for_outcome(kind: OutcomeKind) -> int:
    """Points awarded for a single game outcome (2 any win, 1 OT/SO loss, 0)."""
    return kind.points


@dataclass(frozen=True)
class Team:
    team_id: str
    name: str
    abbrev: str

    def __post_init__(self):
        if not self.abbrev:
            raise LeagueError(f"team {self.team_id!r} has an empty abbreviation")


@dataclass(frozen=True)
class LeagueStructure:
    """Conference/division layout plus qualification parameters."""

    conferences: tuple[str, ...]
    divisions: tuple[tuple[str, str], ...]  # (division, conference)
    membership: Mapping[str, str]  # team_id -> division
    top_per_division: int = 3
    wildcards_per_conference: int = 2

    def __post_init__(self):
        div_conf = dict(self.divisions)
        if len(div_conf) != len(self.divisions):
            raise LeagueError("duplicate division name")
        for div, conf in self.divisions:
            if conf not in self.conferences:
                raise LeagueError(f"division {div!r} assigned to unknown conference {conf!r}")
        for team, div in self.membership.items():
            if div not in div_conf:
                raise LeagueError(f"team {team!r} assigned to unknown division {div!r}")
        per_conf = {c: 0 for c in self.conferences}
        for _, conf in self.divisions:
            per_conf[conf] += 1
        if len(set(per_conf.values())) > 1:
            raise LeagueError("conferences must have equal division counts")

    def division_of(self, team: str) -> str:
        try:
            return self.membership[team]
        except KeyError:
            raise LeagueError(f"unknown team {team!r}") from None

    def conference_of(self, team: str) -> str:
        return dict(self.divisions)[self.division_of(team)]

    def divisions_in(self, conference: str) -> list[str]:
        return [d for d, c in self.divisions if c == conference]

    def teams_in_division(self, division: str) -> list[str]:
        return sorted(t for t, d in self.membership.items() if d == division)

    def teams_in_conference(self, conference: str) -> list[str]:
        divs = set(self.divisions_in(conference))
        return sorted(t for t, d in self.membership.items() if d in divs)

    @property
    def berths_per_conference(self) -> int:
        n_div = len(self.divisions) // len(self.conferences)
        return self.top_per_division * n_div + self.wildcards_per_conference


@dataclass(frozen=True)
class GameResult:
    winner: str
    win_type: WinType
    home_goals: int
    away_goals: int

    def __post_init__(self):
        if self.home_goals < 0 or self.away_goals < 0:
            raise LeagueError("negative goal count")


@dataclass(frozen=True)
class Game:
    game_id: str
    date: Date
    home: str
    away: str
    result: Optional[GameResult] = None

    def __post_init__(self):
        if self.home == self.away:
            raise LeagueError(f"game {self.game_id}: team plays itself")
        r = self.result
        if r is None:
            return
        if r.winner not in (self.home, self.away):
            raise LeagueError(f"game {self.game_id}: winner not a participant")
        wg, lg = (r.home_goals, r.away_goals) if r.winner == self.home else (r.away_goals, r.home_goals)
        if r.win_type is WinType.REGULATION:
            if wg <= lg:
                raise LeagueError(f"game {self.game_id}: regulation winner must out-score loser")
        elif wg != lg + 1:
            raise LeagueError(f"game {self.game_id}: overtime/shootout margin must be one goal")

    @property
    def played(self) -> bool:
        return self.result is not None

    def loser(self) -> str:
        assert self.result is not None
        return self.away if self.result.winner == self.home else self.home

    def outcome_for(self, team: str) -> OutcomeKind:
        """Outcome of a played game from `team`'s perspective."""
        r = self.result
        assert r is not None
        won = r.winner == team
        if r.win_type is WinType.REGULATION:
            return OutcomeKind.RW if won else OutcomeKind.RL
        if r.win_type is WinType.OVERTIME:
            return OutcomeKind.OTW if won else OutcomeKind.OTL
        return OutcomeKind.SOW if won else OutcomeKind.SOL


@dataclass
class TeamRecord:
    """Aggregated results for one team over the played games of a snapshot."""

    team: str
    games_played: int = 0
    points: int = 0
    regulation_wins: int = 0
    overtime_wins: int = 0
    shootout_wins: int = 0
    goals_for: int = 0
    goals_against: int = 0
    points_vs: dict[str, int] = field(default_factory=dict)
    reg_wins_vs: dict[str, int] = field(default_factory=dict)
    ot_wins_vs: dict[str, int] = field(default_factory=dict)
    so_wins_vs: dict[str, int] = field(default_factory=dict)
    home_games_vs: dict[str, int] = field(default_factory=dict)

    @property
    def total_wins(self) -> int:
        return self.regulation_wins + self.overtime_wins + self.shootout_wins

    @property
    def goal_differential(self) -> int:
        return self.goals_for - self.goals_against


@dataclass(frozen=True, eq=False)
class StandingsSnapshot:
    """Full league state: structure, teams, and every game played or pending."""

    structure: LeagueStructure
    teams: Mapping[str, Team]
    games: tuple[Game, ...]
    as_of: Date

    def __post_init__(self):
        ids = set(self.teams)
        if ids != set(self.structure.membership):
            raise LeagueError("team list does not match structure membership")
        seen = set()
        for g in self.games:
            if g.game_id in seen:
                raise LeagueError(f"duplicate game id {g.game_id}")
            seen.add(g.game_id)
            if g.home not in ids or g.away not in ids:
                raise LeagueError(f"game {g.game_id} references unknown team")
        object.__setattr__(self, "_record_cache", {})

    def played_games(self) -> list[Game]:
        return [g for g in self.games if g.played]

    def remaining_games(self) -> list[Game]:
        return [g for g in self.games if not g.played]

    def remaining_for(self, team: str) -> list[Game]:
        return [g for g in self.remaining_games() if team in (g.home, g.away)]

    def game_by_id(self, game_id: str) -> Game:
        for g in self.games:
            if g.game_id == game_id:
                return g
        raise LeagueError(f"unknown game {game_id!r}")

    def with_results(self, results: Mapping[str, GameResult]) -> "StandingsSnapshot":
        """A new snapshot with the given pending games resolved."""
        updated = []
        unused = dict(results)
        for g in self.games:
            r = unused.pop(g.game_id, None)
            if r is None:
                updated.append(g)
            else:
                if g.played:
                    raise LeagueError(f"game {g.game_id} already has a result")
                updated.append(Game(g.game_id, g.date, g.home, g.away, r))
        if unused:
            raise LeagueError(f"results for unknown games: {sorted(unused)}")
        return StandingsSnapshot(self.structure, self.teams, tuple(updated), self.as_of)


def compute_record(snapshot: StandingsSnapshot, team: str) -> TeamRecord:
    """Fold the snapshot's played games into one team's aggregate record."""
    cache = snapshot.__dict__.get("_record_cache")
    if cache is not None and team in cache:
        return cache[team]
    if team not in snapshot.teams:
        raise LeagueError(f"unknown team {team!r}")
    rec = TeamRecord(team=team)
    for g in snapshot.played_games():
        if team not in (g.home, g.away):
            continue
        opp = g.away if g.home == team else g.home
        r = g.result
        assert r is not None
        rec.games_played += 1
        if g.home == team:
            rec.home_games_vs[opp] = rec.home_games_vs.get(opp, 0) + 1
            gf, ga = r.home_goals, r.away_goals
        else:
            gf, ga = r.away_goals, r.home_goals
        rec.goals_for += gf
        rec.goals_against += ga
        kind = g.outcome_for(team)
        rec.points += kind.points
        rec.points_vs[opp] = rec.points_vs.get(opp, 0) + kind.points
        if kind is OutcomeKind.RW:
            rec.regulation_wins += 1
            rec.reg_wins_vs[opp] = rec.reg_wins_vs.get(opp, 0) + 1
        elif kind is OutcomeKind.OTW:
            rec.overtime_wins += 1
            rec.ot_wins_vs[opp] = rec.ot_wins_vs.get(opp, 0) + 1
        elif kind is OutcomeKind.SOW:
            rec.shootout_wins += 1
            rec.so_wins_vs[opp] = rec.so_wins_vs.get(opp, 0) + 1
    if cache is not None:
        cache[team] = rec
    return rec


def point_percentage(record: TeamRecord) -> Fraction:
    """Points earned over points possible, as an exact rational (0 for 0 GP)."""
    if record.games_played == 0:
        return Fraction(0)
    return Fraction(record.points, 2 * record.games_played)


class TieBreakLevel(enum.IntEnum):
    POINTS = 0
    PCT = 1
    REG_WINS = 2
    REG_OT_WINS = 3
    TOTAL_WINS = 4
    HEAD_TO_HEAD = 5
    GOAL_DIFF = 6
    GOALS_FOR = 7
    UNRESOLVED = 8


@dataclass(frozen=True)
class TieBreakVerdict:
    higher: Optional[str]  # None when unresolved
    lower: Optional[str]
    level: TieBreakLevel

    @property
    def resolved(self) -> bool:
        return self.higher is not None


def _scalar_key(rec: TeamRecord) -> tuple:
    return (
        rec.points,
        point_percentage(rec),
        rec.regulation_wins,
        rec.regulation_wins + rec.overtime_wins,
        rec.total_wins,
    )


_SCALAR_LEVELS = (
    TieBreakLevel.POINTS,
    TieBreakLevel.PCT,
    TieBreakLevel.REG_WINS,
    TieBreakLevel.REG_OT_WINS,
    TieBreakLevel.TOTAL_WINS,
)


def head_to_head_points(group: Iterable[str], snapshot: StandingsSnapshot) -> dict[str, int]:
    """Points earned in played games among the group, after the home-game rule.

    For each pair, if one team hosted more of their mutual games, that team's
    earliest-dated surplus home game is dropped from both teams' tallies
    (date ties broken by game id).
    """
    members = sorted(set(group))
    if len(members) < 2:
        raise LeagueError("head-to-head group needs at least two teams")
    for t in members:
        if t not in snapshot.teams:
            raise LeagueError(f"unknown team {t!r}")
    pair_games: dict[tuple[str, str], list[Game]] = {}
    for g in snapshot.played_games():
        if g.home in members and g.away in members:
            key = (g.home, g.away) if g.home < g.away else (g.away, g.home)
            pair_games.setdefault(key, []).append(g)
    tally = {t: 0 for t in members}
    for (a, b), games in pair_games.items():
        entries = [
            (g.date, g.game_id, g.home, g.outcome_for(a).points, g.outcome_for(b).points)
            for g in games
        ]
        for _, _, _, pts_a, pts_b in _pair_tally(a, b, entries):
            tally[a] += pts_a
            tally[b] += pts_b
    return tally


def _pair_tally(a: str, b: str, entries: list[tuple]) -> list[tuple]:
    """Return the entries that count after the home-game exclusion rule.

    `entries` rows are (date, game_id, home, points_for_a, points_for_b).
    """
    homes_a = sum(1 for e in entries if e[2] == a)
    homes_b = len(entries) - homes_a
    excluded = None
    if homes_a != homes_b:
        surplus = a if homes_a > homes_b else b
        home_games = sorted((e for e in entries if e[2] == surplus), key=lambda e: (e[0], e[1]))
        excluded = home_games[0][1]
    return [e for e in entries if e[1] != excluded]


def compare_teams(a: str, b: str, snapshot: StandingsSnapshot) -> TieBreakVerdict:
    """Order two teams by points then the tie-breaker ladder.

    Head-to-head is evaluated for the pair alone here; within a larger tied
    group the ranking functions apply it group-wide instead.
    """
    ra, rb = compute_record(snapshot, a), compute_record(snapshot, b)
    ka, kb = _scalar_key(ra), _scalar_key(rb)
    for level, va, vb in zip(_SCALAR_LEVELS, ka, kb):
        if va != vb:
            hi, lo = (a, b) if va > vb else (b, a)
            return TieBreakVerdict(hi, lo, level)
    h2h = head_to_head_points([a, b], snapshot)
    if h2h[a] != h2h[b]:
        hi, lo = (a, b) if h2h[a] > h2h[b] else (b, a)
        return TieBreakVerdict(hi, lo, TieBreakLevel.HEAD_TO_HEAD)
    if ra.goal_differential != rb.goal_differential:
        hi, lo = (a, b) if ra.goal_differential > rb.goal_differential else (b, a)
        return TieBreakVerdict(hi, lo, TieBreakLevel.GOAL_DIFF)
    if ra.goals_for != rb.goals_for:
        hi, lo = (a, b) if ra.goals_for > rb.goals_for else (b, a)
        return TieBreakVerdict(hi, lo, TieBreakLevel.GOALS_FOR)
    return TieBreakVerdict(None, None, TieBreakLevel.UNRESOLVED)


@dataclass(frozen=True)
class RankedTeam:
    team: str
    rank: int
    qualified: bool
    via: str  # "division", "wildcard", or ""
    separated_by: Optional[TieBreakLevel]  # level separating this team from the next


@dataclass(frozen=True)
class ConferenceRanking:
    conference: str
    entries: tuple[RankedTeam, ...]

    @property
    def order(self) -> list[str]:
        return [e.team for e in self.entries]

    @property
    def qualified(self) -> set[str]:
        return {e.team for e in self.entries if e.qualified}


def order_conference_teams(snapshot: StandingsSnapshot, conference: str) -> tuple[list[str], list[TieBreakLevel]]:
    """Total order for a conference, with the level separating each adjacent pair.

    Raises TotalTieError if some pair stays tied through goals scored.
    """
    structure = snapshot.structure
    teams = structure.teams_in_conference(conference)
    if not teams:
        raise LeagueError(f"unknown or empty conference {conference!r}")
    recs = {t: compute_record(snapshot, t) for t in teams}
    by_key: dict[tuple, list[str]] = {}
    for t in teams:
        by_key.setdefault(_scalar_key(recs[t]), []).append(t)

    order: list[str] = []
    seps: list[TieBreakLevel] = []

    def scalar_sep(key_hi: tuple, key_lo: tuple) -> TieBreakLevel:
        for level, va, vb in zip(_SCALAR_LEVELS, key_hi, key_lo):
            if va != vb:
                return level
        raise AssertionError("keys equal")

    sorted_keys = sorted(by_key, reverse=True)
    for ki, key in enumerate(sorted_keys):
        group = sorted(by_key[key])
        if len(group) == 1:
            order.append(group[0])
        else:
            tallies = head_to_head_points(group, snapshot)
            by_tally: dict[int, list[str]] = {}
            for t in group:
                by_tally.setdefault(tallies[t], []).append(t)
            tally_values = sorted(by_tally, reverse=True)
            for ti, tv in enumerate(tally_values):
                sub = by_tally[tv]
                sub.sort(key=lambda t: (recs[t].goal_differential, recs[t].goals_for), reverse=True)
                for i, t in enumerate(sub):
                    if i + 1 < len(sub):
                        gd_a, gd_b = recs[t].goal_differential, recs[sub[i + 1]].goal_differential
                        gf_a, gf_b = recs[t].goals_for, recs[sub[i + 1]].goals_for
                        if gd_a == gd_b and gf_a == gf_b:
                            raise TotalTieError(
                                f"{t} and {sub[i + 1]} tied through every tie-breaker"
                            )
                        order.append(t)
                        seps.append(
                            TieBreakLevel.GOAL_DIFF if gd_a != gd_b else TieBreakLevel.GOALS_FOR
                        )
                    else:
                        order.append(t)
                        if ti + 1 < len(tally_values):
                            seps.append(TieBreakLevel.HEAD_TO_HEAD)
        if ki + 1 < len(sorted_keys):
            seps.append(scalar_sep(key, sorted_keys[ki + 1]))
    seps.append(None)  # type: ignore[arg-type]  # last team has no successor
    return order, seps


def rank_conference(snapshot: StandingsSnapshot, conference: str) -> ConferenceRanking:
    """Rank a conference and mark playoff qualification.

    Intended for completed seasons; callers may apply it to a mid-season
    snapshot to rank current records, with the same rules.
    """
    structure = snapshot.structure
    order, seps = order_conference_teams(snapshot, conference)
    qualified_via: dict[str, str] = {}
    for div in structure.divisions_in(conference):
        div_teams = [t for t in order if structure.division_of(t) == div]
        for t in div_teams[: structure.top_per_division]:
            qualified_via[t] = "division"
    wildcards = structure.wildcards_per_conference
    for t in order:
        if wildcards == 0:
            break
        if t not in qualified_via:
            qualified_via[t] = "wildcard"
            wildcards -= 1
    entries = tuple(
        RankedTeam(
            team=t,
            rank=i + 1,
            qualified=t in qualified_via,
            via=qualified_via.get(t, ""),
            separated_by=seps[i],
        )
        for i, t in enumerate(order)
    )
    return ConferenceRanking(conference=conference, entries=entries)


def qualified_teams(snapshot: StandingsSnapshot) -> set[str]:
    """Playoff qualifiers across every conference of a completed season."""
    out: set[str] = set()
    for conf in snapshot.structure.conferences:
        out |= rank_conference(snapshot, conf).qualified
    return out


def max_points(snapshot: StandingsSnapshot, team: str) -> int:
    """Points if the team won every remaining game."""
    rec = compute_record(snapshot, team)
    return rec.points + 2 * len(snapshot.remaining_for(team))


def placeholder_result(game: Game, kind_for_home: OutcomeKind) -> GameResult:
    """A concrete result realizing an outcome with minimal placeholder scores.

    Regulation results are 1-0; overtime and shootout results are 2-1 with the
    deciding goal included.
    """
    home_won = kind_for_home.is_win
    winner = game.home if home_won else game.away
    if kind_for_home in (OutcomeKind.RW, OutcomeKind.RL):
        wt = WinType.REGULATION
        wg, lg = 1, 0
    elif kind_for_home in (OutcomeKind.OTW, OutcomeKind.OTL):
        wt = WinType.OVERTIME
        wg, lg = 2, 1
    else:
        wt = WinType.SHOOTOUT
        wg, lg = 2, 1
    hg, ag = (wg, lg) if home_won else (lg, wg)
    return GameResult(winner=winner, win_type=wt, home_goals=hg, away_goals=ag)
