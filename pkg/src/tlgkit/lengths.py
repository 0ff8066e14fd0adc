"""The nine target lengths, their match intervals, and the meta length tokens.

All interval membership in this package is open-closed: a word count L lies
in a range (lb, ub] iff lb < L <= ub. Ranges with an unbounded upper end use
``math.inf`` as ub.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum

from .errors import InvalidTargetError

__all__ = [
    "TargetLength",
    "MatchRange",
    "Level",
    "MetaLengthToken",
    "MLT_TOKENS",
    "pm_range",
    "fm_range",
    "level_of",
    "mlt_for_target",
    "mlt_for_length",
    "parse_leading_mlt",
]


class TargetLength(Enum):
    """One of the nine benchmark target lengths.

    The enum value is the serialized label; ``OVER_800`` renders as ">800"
    and has no finite word count.
    """

    W10 = "10"
    W30 = "30"
    W50 = "50"
    W80 = "80"
    W150 = "150"
    W300 = "300"
    W500 = "500"
    W700 = "700"
    OVER_800 = ">800"

    @property
    def label(self) -> str:
        return self.value

    @property
    def words(self) -> int | None:
        """Finite center word count, or None for the open-ended target."""
        if self is TargetLength.OVER_800:
            return None
        return int(self.value)

    @classmethod
    def from_label(cls, label: str) -> "TargetLength":
        try:
            return cls(label)
        except ValueError:
            raise InvalidTargetError(f"not a valid target length: {label!r}") from None

    @classmethod
    def from_words(cls, words: int) -> "TargetLength":
        return cls.from_label(str(words))

    def __repr__(self) -> str:  # "TargetLength.W50" is noisy in test output
        return f"TargetLength({self.value!r})"


#: The nine targets in canonical (ascending) table order.
ALL_TARGETS: tuple[TargetLength, ...] = tuple(TargetLength)


class Level(IntEnum):
    """Three-way grouping of targets into short / medium / long bands."""

    L0 = 0
    L1 = 1
    L2 = 2

    @property
    def label(self) -> str:
        return str(int(self))


@dataclass(frozen=True)
class MatchRange:
    """Half-open word-count interval (lb, ub]; ub may be math.inf."""

    lb: int
    ub: float

    def __post_init__(self) -> None:
        if self.lb < 0:
            raise ValueError(f"lower bound must be >= 0, got {self.lb}")
        if not self.lb < self.ub:
            raise ValueError(f"empty range ({self.lb}, {self.ub}]")

    def contains(self, length: int) -> bool:
        return self.lb < length <= self.ub

    def issubset(self, other: "MatchRange") -> bool:
        return other.lb <= self.lb and self.ub <= other.ub

    def overlaps(self, other: "MatchRange") -> bool:
        return self.lb < other.ub and other.lb < self.ub

    def __str__(self) -> str:
        upper = "inf" if math.isinf(self.ub) else str(int(self.ub))
        return f"({self.lb},{upper}]"


@dataclass(frozen=True)
class MetaLengthToken:
    """A length-band control token with its data-collection word-count range."""

    center: TargetLength
    surface: str
    range: MatchRange


# Precise-match tolerance around each finite target. The open-ended target
# shares its flexible range.
_PM_TOLERANCE: dict[TargetLength, int] = {
    TargetLength.W10: 10,
    TargetLength.W30: 10,
    TargetLength.W50: 10,
    TargetLength.W80: 10,
    TargetLength.W150: 20,
    TargetLength.W300: 20,
    TargetLength.W500: 50,
    TargetLength.W700: 70,
}

_FM_BOUNDS: dict[TargetLength, tuple[int, float]] = {
    TargetLength.W10: (0, 20),
    TargetLength.W30: (20, 40),
    TargetLength.W50: (40, 60),
    TargetLength.W80: (60, 100),
    TargetLength.W150: (100, 200),
    TargetLength.W300: (200, 400),
    TargetLength.W500: (400, 600),
    TargetLength.W700: (600, 800),
    TargetLength.OVER_800: (800, math.inf),
}

_LEVELS: dict[TargetLength, Level] = {
    TargetLength.W10: Level.L0,
    TargetLength.W30: Level.L0,
    TargetLength.W50: Level.L0,
    TargetLength.W80: Level.L0,
    TargetLength.W150: Level.L1,
    TargetLength.W300: Level.L1,
    TargetLength.W500: Level.L1,
    TargetLength.W700: Level.L2,
    TargetLength.OVER_800: Level.L2,
}

OPEN_ENDED_RANGE = MatchRange(800, math.inf)


def pm_range(target: TargetLength) -> MatchRange:
    """Precise-match interval for a target: (center - tol, center + tol]."""
    if target is TargetLength.OVER_800:
        return OPEN_ENDED_RANGE
    tol = _PM_TOLERANCE[target]
    center = target.words
    assert center is not None
    return MatchRange(max(center - tol, 0), center + tol)


def fm_range(target: TargetLength) -> MatchRange:
    """Flexible-match interval for a target."""
    lb, ub = _FM_BOUNDS[target]
    return MatchRange(lb, ub)


def level_of(target: TargetLength) -> Level:
    return _LEVELS[target]


def _token_range(target: TargetLength) -> MatchRange:
    # Data-collection band: (center - 5, center + 5] for finite centers.
    if target is TargetLength.OVER_800:
        return OPEN_ENDED_RANGE
    center = target.words
    assert center is not None
    return MatchRange(center - 5, center + 5)


#: The nine tokens in ascending center order.
MLT_TOKENS: tuple[MetaLengthToken, ...] = tuple(
    MetaLengthToken(center=t, surface=f"[MLT:{t.label}]", range=_token_range(t))
    for t in ALL_TARGETS
)

_TOKEN_BY_TARGET: dict[TargetLength, MetaLengthToken] = {t.center: t for t in MLT_TOKENS}
_TOKEN_BY_SURFACE: dict[str, MetaLengthToken] = {t.surface: t for t in MLT_TOKENS}


def mlt_for_target(target: TargetLength) -> MetaLengthToken:
    """The token whose center equals the given target (a bijection)."""
    return _TOKEN_BY_TARGET[target]


def mlt_for_length(word_count: int) -> MetaLengthToken | None:
    """The unique token whose range contains word_count, or None.

    Tokens are checked in ascending center order; the ranges are pairwise
    disjoint so at most one can match.
    """
    if word_count < 0:
        raise ValueError(f"word count must be >= 0, got {word_count}")
    for token in MLT_TOKENS:
        if token.range.contains(word_count):
            return token
    return None


def token_for_surface(surface: str) -> MetaLengthToken | None:
    return _TOKEN_BY_SURFACE.get(surface)


def parse_leading_mlt(text: str) -> tuple[MetaLengthToken | None, str]:
    """Split a leading token surface off a response.

    If ``text`` starts (after optional leading whitespace) with one of the
    nine surfaces, returns that token and the remainder with the surface and
    at most one immediately-following whitespace character removed.
    Otherwise returns (None, text) unchanged.
    """
    stripped = text.lstrip()
    for token in MLT_TOKENS:
        if stripped.startswith(token.surface):
            rest = stripped[len(token.surface):]
            if rest[:1].isspace():
                rest = rest[1:]
            return token, rest
    return None, text
