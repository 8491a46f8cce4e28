"""Shared builders for small synthetic leagues used across the test suite."""

from __future__ import annotations

from datetime import date as Date, timedelta

from clinch.league import (
    Game,
    GameResult,
    LeagueStructure,
    OutcomeKind,
    StandingsSnapshot,
    Team,
    WinType,
    placeholder_result,
)

SEASON_START = Date(2024, 10, 10)


def two_division_structure(team_ids, top_per_division=1, wildcards=1, conferences=("EAST",)):
    """Split team_ids evenly over two divisions per conference."""
    n_conf = len(conferences)
    per_conf = len(team_ids) // n_conf
    divisions = []
    membership = {}
    for ci, conf in enumerate(conferences):
        conf_teams = team_ids[ci * per_conf : (ci + 1) * per_conf]
        half = (len(conf_teams) + 1) // 2
        for di, div_teams in enumerate((conf_teams[:half], conf_teams[half:])):
            if not div_teams:
                continue
            div = f"{conf}-D{di + 1}"
            divisions.append((div, conf))
            for t in div_teams:
                membership[t] = div
    return LeagueStructure(
        conferences=tuple(conferences),
        divisions=tuple(divisions),
        membership=membership,
        top_per_division=top_per_division,
        wildcards_per_conference=wildcards,
    )


def make_teams(team_ids):
    return {t: Team(team_id=t, name=f"Team {t}", abbrev=t) for t in team_ids}


def game(gid, day_offset, home, away, home_kind=None, score=None):
    """A game `day_offset` days into the season, optionally already played.

    `home_kind` is the home team's outcome; `score` optionally overrides the
    placeholder (home_goals, away_goals).
    """
    d = SEASON_START + timedelta(days=day_offset)
    g = Game(game_id=gid, date=d, home=home, away=away)
    if home_kind is None:
        return g
    result = placeholder_result(g, home_kind)
    if score is not None:
        hg, ag = score
        winner = home if home_kind.is_win else away
        result = GameResult(winner=winner, win_type=result.win_type, home_goals=hg, away_goals=ag)
    return Game(game_id=gid, date=d, home=home, away=away, result=result)


def snapshot(structure, games, as_of=None):
    ids = sorted(structure.membership)
    when = as_of or max((g.date for g in games), default=SEASON_START)
    return StandingsSnapshot(
        structure=structure,
        teams=make_teams(ids),
        games=tuple(games),
        as_of=when,
    )


def simple_snapshot(team_ids, games, **kwargs):
    return snapshot(two_division_structure(team_ids, **kwargs), games)
