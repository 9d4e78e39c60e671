"""Named sampling designs.

A design turns ``(N, n, rng)`` into a point set in the unit cube and,
when it has one, the stratification its points were drawn from.  Names
follow the usual abbreviations: ``srs``, ``lhs``, ``gss``, ``algss``,
``lgss``, ``grid``, ``sukharev``, ``halton``, ``korobov``, ``lkorobov``, and
the partially stratified family ``pss``, ``lpss``, ``algpss``, ``lgpss``.
"""
from __future__ import annotations

import functools
import re
from dataclasses import dataclass

import numpy as np

from .geometry import Hyperbox, PointSet, Stratification
from .latinize import PssGrouping, algss, lgss, pss_compose
from .metrics import integer_root
from .sample import (INFINITY, parse_bates, sample_halton, sample_korobov, sample_lhs,
                     sample_srs, sample_stratified, select_korobov, shifted_korobov)
from .stratify import GssOptions, grid_partition, gss_partition

METHODS = (
    "srs", "lhs", "gss", "algss", "lgss", "grid", "sukharev", "halton",
    "korobov", "lkorobov", "pss", "lpss", "algpss", "lgpss",
)


@dataclass(frozen=True)
class Design:
    method: str
    b: object = 1
    groups: str | None = None
    avoid_odd_splits: bool = True
    korobov_trials: int = 30
    lgss_init: str = "cog"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        object.__setattr__(self, "b", parse_bates(self.b))
        if self.method in ("pss", "lpss", "algpss", "lgpss") and not self.groups:
            raise ValueError(f"method {self.method!r} needs a group spec such as '2x50'")

    @property
    def name(self) -> str:
        label = self.method
        if self.groups:
            label += f"-{self.groups}"
        if self.method in ("gss", "grid", "pss") and self.b != 1:
            label += f"-b{self.b}"
        return label

    def generate(self, N: int, n: int, rng: np.random.Generator) -> tuple[PointSet, Stratification | None]:
        return _GENERATORS[self.method](self, int(N), int(n), rng)


def parse_design(text: str) -> Design:
    """Parse a compact design label.

    Examples: ``srs``, ``gss-inf``, ``gss-b8``, ``lpss-4x25``,
    ``algpss-2x2+1x2``, ``korobov-t1000``, ``grid-inf``.
    """
    method, _, rest = text.strip().lower().partition("-")
    kwargs: dict = {}
    for part in filter(None, rest.split("-")):
        if part in ("inf", "binf"):
            kwargs["b"] = INFINITY
        elif re.fullmatch(r"b\d+", part):
            kwargs["b"] = int(part[1:])
        elif re.fullmatch(r"t\d+", part):
            kwargs["korobov_trials"] = int(part[1:])
        elif re.fullmatch(r"[\dx+,]+", part):
            kwargs["groups"] = part
        elif part == "noavoid":
            kwargs["avoid_odd_splits"] = False
        else:
            raise ValueError(f"cannot parse design option {part!r} in {text!r}")
    return Design(method, **kwargs)


def _gss_strata(design: Design, N: int, n: int, rng: np.random.Generator) -> Stratification:
    return gss_partition(N, Hyperbox.unit(n), GssOptions(design.avoid_odd_splits, rng))


def _grid_k(N: int, n: int) -> int:
    k = integer_root(N, n)
    if k**n != N:
        raise ValueError(f"conventional stratification needs N = k**{n}; {N} is not")
    return k


def _srs(design, N, n, rng):
    return sample_srs(N, Hyperbox.unit(n), rng), None


def _lhs(design, N, n, rng):
    return sample_lhs(N, n, rng), None


def _gss(design, N, n, rng):
    part_rng, draw_rng = rng.spawn(2)
    strat = _gss_strata(design, N, n, part_rng)
    return sample_stratified(strat, design.b, draw_rng), strat


def _algss(design, N, n, rng):
    part_rng, draw_rng = rng.spawn(2)
    strat = _gss_strata(design, N, n, part_rng)
    return algss(strat, draw_rng)[0], strat


def _lgss(design, N, n, rng):
    part_rng, draw_rng = rng.spawn(2)
    strat = _gss_strata(design, N, n, part_rng)
    return lgss(strat, draw_rng, init=design.lgss_init), strat


def _grid(design, N, n, rng):
    strat = grid_partition([_grid_k(N, n)] * n)
    return sample_stratified(strat, design.b, rng), strat


def _sukharev(design, N, n, rng):
    strat = grid_partition([_grid_k(N, n)] * n)
    return sample_stratified(strat, INFINITY), strat


def _halton(design, N, n, rng):
    # a random start index makes replications differ; the sequence itself is plain
    return sample_halton(N, n, int(rng.integers(0, 2**20))), None


@functools.lru_cache(maxsize=32)
def _exhaustive_korobov(N: int, n: int, latin: bool) -> int:
    # every multiplier is examined, so the winner does not depend on the stream
    return select_korobov(N, n, N - 1, np.random.default_rng(0), latin=latin).multiplier


def _korobov_common(design, N, n, rng, latin):
    if N > 1 and design.korobov_trials >= N - 1:
        spec = shifted_korobov(N, _exhaustive_korobov(N, n, latin), n, rng, latin)
    else:
        spec = select_korobov(N, n, design.korobov_trials, rng, latin=latin)
    return sample_korobov(spec, n), None


def _korobov(design, N, n, rng):
    return _korobov_common(design, N, n, rng, latin=False)


def _lkorobov(design, N, n, rng):
    return _korobov_common(design, N, n, rng, latin=True)


def _pss_family(design, N, n, rng):
    grouping = PssGrouping.parse(design.groups, n)
    group_rngs = rng.spawn(len(grouping.groups) + 1)
    parts = []
    for width, grng in zip(grouping.sizes, group_rngs):
        if design.method in ("pss", "lpss"):
            strat = grid_partition([_grid_k(N, width)] * width)
            if design.method == "pss":
                parts.append(sample_stratified(strat, design.b, grng))
            else:
                parts.append(lgss(strat, grng))
        else:
            part_rng, draw_rng = grng.spawn(2)
            strat = _gss_strata(design, N, width, part_rng)
            if design.method == "algpss":
                parts.append(algss(strat, draw_rng)[0])
            else:
                parts.append(lgss(strat, draw_rng, init=design.lgss_init))
    return pss_compose(parts, grouping, group_rngs[-1]), None


_GENERATORS = {
    "srs": _srs,
    "lhs": _lhs,
    "gss": _gss,
    "algss": _algss,
    "lgss": _lgss,
    "grid": _grid,
    "sukharev": _sukharev,
    "halton": _halton,
    "korobov": _korobov,
    "lkorobov": _lkorobov,
    "pss": _pss_family,
    "lpss": _pss_family,
    "algpss": _pss_family,
    "lgpss": _pss_family,
}
