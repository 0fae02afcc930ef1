"""Per-link maturity: aggregate violation ratios and map them to five levels."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from .metrics import Assessment, LayerLink, REGISTRY


class MaturityLevel(enum.IntEnum):
    CHAOTIC = 1
    POOR = 2
    AVERAGE = 3
    GOOD = 4
    VERY_GOOD = 5

    @property
    def label(self) -> str:
        return self.name.lower()


# lower bound of each level above chaotic; intervals are left-closed
_BOUNDS = (
    (Fraction(4, 5), MaturityLevel.VERY_GOOD),
    (Fraction(3, 5), MaturityLevel.GOOD),
    (Fraction(2, 5), MaturityLevel.AVERAGE),
    (Fraction(1, 5), MaturityLevel.POOR),
)


class RatioRangeError(ValueError):
    code = "RATIO_RANGE"


def _exact(ratio) -> Fraction:
    # floats are read as the decimal literal they print as, so 0.6 means 3/5
    if isinstance(ratio, float):
        return Fraction(Decimal(repr(ratio)))
    return Fraction(ratio)


def maturity_level(ratio) -> MaturityLevel:
    value = _exact(ratio)
    if not 0 <= value <= 1:
        raise RatioRangeError(f"alignment ratio {ratio!r} outside [0, 1]")
    for bound, level in _BOUNDS:
        if value >= bound:
            return level
    return MaturityLevel.CHAOTIC


@dataclass(frozen=True)
class LinkMaturity:
    link: LayerLink
    ratio: Fraction | None
    level: MaturityLevel | None
    contributing: tuple[tuple[str, Fraction | None], ...]


def _contributions(assessment: Assessment, link: LayerLink):
    return tuple(
        (d.id, assessment.results[d.id].violation_ratio)
        for d in REGISTRY
        if d.link is link and d.id in assessment.results
    )


def link_ratio(assessment: Assessment, link: LayerLink) -> Fraction | None:
    """One minus the mean violation ratio of the link's assessable metrics.

    Returns ``None`` when every metric on the link has an empty population.
    """
    ratios = [r for _, r in _contributions(assessment, link) if r is not None]
    if not ratios:
        return None
    return 1 - sum(ratios, Fraction(0)) / len(ratios)


def link_maturity(assessment: Assessment, link: LayerLink) -> LinkMaturity:
    ratio = link_ratio(assessment, link)
    level = None if ratio is None else maturity_level(ratio)
    return LinkMaturity(link, ratio, level, _contributions(assessment, link))


MaturityTable = tuple[LinkMaturity, ...]


def maturity_table(assessment: Assessment) -> MaturityTable:
    return tuple(link_maturity(assessment, link) for link in LayerLink)
