"""Event ingestion, inter-event profiles and Kolmogorov-Smirnov similarity.

A *profile* is one entity's presence in one domain. Its burstiness signature
is the empirical distribution of gaps between consecutive activities inside
an observation window.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .errors import ContractError, IngestError

logger = logging.getLogger(__name__)

DEFAULT_MIN_EVENTS = 5


class ProfileKey(NamedTuple):
    entity: str
    domain: str

    def label(self) -> str:
        return f"{self.entity}@{self.domain}"


@dataclass(frozen=True, slots=True)
class Event:
    entity: str
    domain: str
    t: float

    def __post_init__(self):
        if not isinstance(self.t, (int, float)) or not math.isfinite(self.t):
            raise IngestError(f"non-finite timestamp in record {self!r}")
        if self.t < 0:
            raise IngestError(f"negative timestamp in record {self!r}")
        if self.entity == "" and self.domain == "":
            raise IngestError(f"empty (entity, domain) in record {self!r}")

    @property
    def key(self) -> ProfileKey:
        return ProfileKey(self.entity, self.domain)


@dataclass
class EventLog:
    """Events observed in the half-open window ``[start, end)``.

    Events outside the window are rejected; use :meth:`windowed` to cut a
    window out of a longer record.
    """

    events: list[Event]
    window: tuple[float, float] = (0.0, math.inf)

    def __post_init__(self):
        start, end = self.window
        if not start < end:
            raise ContractError(f"empty window {self.window}")
        for ev in self.events:
            if not start <= ev.t < end:
                raise ContractError(f"event {ev!r} outside window {self.window}")

    @classmethod
    def windowed(cls, events: Iterable[Event], start: float, length: float) -> "EventLog":
        end = start + length
        return cls([ev for ev in events if start <= ev.t < end], (start, end))

    def keys(self) -> list[ProfileKey]:
        return sorted({ev.key for ev in self.events})

    def times_by_key(self) -> dict[ProfileKey, np.ndarray]:
        grouped = defaultdict(list)
        for ev in self.events:
            grouped[ev.key].append(ev.t)
        return {k: np.sort(np.asarray(v, dtype=float)) for k, v in sorted(grouped.items())}

    def times_for(self, key: ProfileKey) -> np.ndarray:
        return np.sort(np.asarray([ev.t for ev in self.events if ev.key == key], dtype=float))

    def __len__(self):
        return len(self.events)


@dataclass(frozen=True)
class IntereventProfile:
    key: ProfileKey
    deltas: np.ndarray = field(repr=False)

    def __post_init__(self):
        deltas = np.sort(np.asarray(self.deltas, dtype=float))
        deltas.setflags(write=False)
        object.__setattr__(self, "deltas", deltas)

    @property
    def m(self) -> int:
        return int(self.deltas.size)

    def ecdf(self, x):
        return ecdf_eval(self, x)

    def scaled(self, c: float) -> "IntereventProfile":
        return IntereventProfile(self.key, self.deltas * c)


class ProfileSet(Mapping):
    """Mapping ``ProfileKey -> IntereventProfile`` that also remembers which
    profiles were dropped for having too few events."""

    def __init__(self, profiles: dict, omitted: list[ProfileKey]):
        self._profiles = dict(sorted(profiles.items()))
        self.omitted = omitted

    def __getitem__(self, key):
        return self._profiles[key]

    def __iter__(self) -> Iterator[ProfileKey]:
        return iter(self._profiles)

    def __len__(self):
        return len(self._profiles)

    def __repr__(self):
        return f"ProfileSet({len(self)} profiles, {len(self.omitted)} omitted)"


def build_profiles(log: EventLog, min_events: int = DEFAULT_MIN_EVENTS, *, keep_zeros: bool = False) -> ProfileSet:
    """Compute the inter-event profile of every sufficiently active profile.

    Parameters
    ----------
    log : EventLog
        Input events; order is irrelevant.
    min_events : int
        Minimum number of activity timestamps (after duplicate collapsing) a
        profile needs to be kept. Must be at least 2.
    keep_zeros : bool
        Keep zero gaps produced by simultaneous events instead of collapsing
        exact-duplicate timestamps into one activity.
    """
    if min_events < 2:
        raise ContractError(f"min_events must be >= 2, got {min_events}")
    profiles = {}
    omitted = []
    for key, times in log.times_by_key().items():
        if not keep_zeros:
            times = np.unique(times)
        if times.size < min_events:
            omitted.append(key)
            continue
        profiles[key] = IntereventProfile(key, np.diff(times))
    if omitted:
        logger.info("omitted %d profiles with fewer than %d events", len(omitted), min_events)
    return ProfileSet(profiles, omitted)


def _as_sorted(p) -> np.ndarray:
    if isinstance(p, IntereventProfile):
        return p.deltas
    return np.sort(np.asarray(p, dtype=float))


def ecdf_eval(profile, x):
    """Fraction of gaps ``<= x``. Works for scalar or array ``x``."""
    deltas = _as_sorted(profile)
    if deltas.size == 0:
        raise ContractError("empty profile")
    counts = np.searchsorted(deltas, x, side="right")
    out = counts / deltas.size
    return float(out) if np.ndim(out) == 0 else out


def ks_statistic(p, q) -> float:
    """Two-sample KS statistic between the gap distributions of ``p`` and ``q``.

    Both step functions are constant between consecutive points of the merged
    sample, so evaluating them at those points gives the exact supremum.
    """
    a = _as_sorted(p)
    b = _as_sorted(q)
    if a.size == 0 or b.size == 0:
        raise ContractError("KS statistic needs two non-empty profiles")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


@dataclass
class ScoreTable:
    """Symmetric pairwise scores over ``keys``; unscored pairs hold NaN."""

    keys: list[ProfileKey]
    matrix: np.ndarray = field(repr=False)

    def index(self, key) -> int:
        return self._index[key]

    def __post_init__(self):
        self._index = {k: i for i, k in enumerate(self.keys)}

    def __getitem__(self, pair):
        u, v = pair
        value = self.matrix[self._index[u], self._index[v]]
        if np.isnan(value):
            raise KeyError(pair)
        return float(value)

    def __contains__(self, pair):
        u, v = pair
        if u not in self._index or v not in self._index:
            return False
        return not np.isnan(self.matrix[self._index[u], self._index[v]])

    def pairs(self) -> Iterator[tuple[ProfileKey, ProfileKey, float]]:
        """Scored unordered pairs ``(u, v, score)`` with ``u < v``."""
        n = len(self.keys)
        for i, j in combinations(range(n), 2):
            value = self.matrix[i, j]
            if not np.isnan(value):
                yield self.keys[i], self.keys[j], float(value)

    def __len__(self):
        return sum(1 for _ in self.pairs())


def pairwise_ks(profiles: Mapping[ProfileKey, IntereventProfile], cross_domain_only: bool = False) -> ScoreTable:
    """KS statistic for every unordered pair of profiles.

    With ``cross_domain_only`` pairs that share a domain are left unscored.
    """
    keys = sorted(profiles)
    if len(keys) < 2:
        raise ContractError(f"need at least 2 profiles, got {len(keys)}")
    n = len(keys)
    matrix = np.full((n, n), np.nan)
    for i, j in combinations(range(n), 2):
        if cross_domain_only and keys[i].domain == keys[j].domain:
            continue
        s = ks_statistic(profiles[keys[i]], profiles[keys[j]])
        matrix[i, j] = matrix[j, i] = s
    return ScoreTable(keys, matrix)


def group_deltas(profiles: Mapping[ProfileKey, IntereventProfile], groups: Mapping[str, int]) -> dict[int, np.ndarray]:
    """Pool the gaps of all profiles whose entity belongs to the same group."""
    pooled = defaultdict(list)
    for key, prof in profiles.items():
        if key.entity in groups:
            pooled[groups[key.entity]].append(prof.deltas)
    return {g: np.sort(np.concatenate(chunks)) for g, chunks in sorted(pooled.items())}

