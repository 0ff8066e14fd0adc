"""The nine meta length tokens and their word-count bands.

Bands are open-closed: a response of L words belongs to a center c iff
c - 5 < L <= c + 5 (the open-ended token accepts any L > 800). These
constants mirror the corpus builder that produces the triples files this
package consumes.
"""

from __future__ import annotations

import math

CENTERS = (10, 30, 50, 80, 150, 300, 500, 700, None)  # None = over 800

MLT_SURFACES = tuple(
    f"[MLT:{c}]" if c is not None else "[MLT:>800]" for c in CENTERS
)

_BANDS = {
    surface: ((center - 5, center + 5) if center is not None else (800, math.inf))
    for surface, center in zip(MLT_SURFACES, CENTERS)
}


def word_count(text: str) -> int:
    return len(text.split())


def band_of(surface: str) -> tuple[int, float]:
    return _BANDS[surface]


def in_band(surface: str, length: int) -> bool:
    lb, ub = _BANDS[surface]
    return lb < length <= ub


def strip_leading_surfaces(text: str) -> str:
    """Drop token surfaces (and one following space each) off the front."""
    while True:
        stripped = text.lstrip()
        for surface in MLT_SURFACES:
            if stripped.startswith(surface):
                rest = stripped[len(surface):]
                text = rest[1:] if rest[:1].isspace() else rest
                break
        else:
            return text
