"""Bundled example data.

A classic 6x4 cross-classification of parental socioeconomic status
(six ordered strata, high to low) against mental health status (four
ordered categories) for 1670 midtown-Manhattan survey respondents.
Both margins are ordinal, association is weak and concentrated in the
corners, which makes the table a good workout for component analysis.
"""

from __future__ import annotations

import numpy as np

from .estimate import PairedSample, expand_counts

__all__ = [
    "MENTAL_HEALTH_COUNTS",
    "MENTAL_HEALTH_ROWS",
    "MENTAL_HEALTH_COLS",
    "mental_health",
]

MENTAL_HEALTH_ROWS = ("A (high)", "B", "C", "D", "F", "G (low)")

MENTAL_HEALTH_COLS = (
    "Well",
    "Mild Symptom Formation",
    "Moderate Symptom Formation",
    "Impaired",
)

MENTAL_HEALTH_COUNTS = (
    (64, 94, 58, 46),
    (57, 94, 64, 40),
    (57, 105, 65, 60),
    (72, 141, 77, 94),
    (36, 97, 54, 78),
    (21, 71, 54, 71),
)


def mental_health() -> PairedSample:
    """The bundled status table expanded to 1670 categorical pairs.

    X is the parental-status stratum (scores 1..6, 1 highest), Y the
    mental-health category (scores 1..4, 1 = well).
    """
    return expand_counts(np.array(MENTAL_HEALTH_COUNTS, dtype=float),
                         list(MENTAL_HEALTH_ROWS), list(MENTAL_HEALTH_COLS))
