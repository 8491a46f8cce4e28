"""Playoff clinch determination and n-day clinching scenario search."""

from .league import (
    ALL_OUTCOMES,
    ConferenceRanking,
    Game,
    GameResult,
    LeagueError,
    LeagueStructure,
    OutcomeKind,
    RankedTeam,
    StandingsSnapshot,
    Team,
    TeamRecord,
    TieBreakLevel,
    TieBreakVerdict,
    TotalTieError,
    WinType,
    compare_teams,
    compute_record,
    head_to_head_points,
    max_points,
    placeholder_result,
    point_percentage,
    points_for_outcome,
    qualified_teams,
    rank_conference,
)

__all__ = [
    "ALL_OUTCOMES",
    "ConferenceRanking",
    "Game",
    "GameResult",
    "LeagueError",
    "LeagueStructure",
    "OutcomeKind",
    "RankedTeam",
    "StandingsSnapshot",
    "Team",
    "TeamRecord",
    "TieBreakLevel",
    "TieBreakVerdict",
    "TotalTieError",
    "WinType",
    "compare_teams",
    "compute_record",
    "head_to_head_points",
    "max_points",
    "placeholder_result",
    "point_percentage",
    "points_for_outcome",
    "qualified_teams",
    "rank_conference",
]

__version__ = "0.1.0"
