"""Bursty-corrected stochastic blockmodel (BC-SBM) generator.

Each outer step emits ``n`` directed edges, one per inner step:

* the source is drawn with probability proportional to ``(A_w z)_v``, where
  ``z`` counts inner steps since each node's last activity and ``A_w`` is the
  control-plane block matrix (``w_c`` inside community ``c``, ``epsilon``
  across communities);
* with probability ``lambda`` the target is drawn from the source's own
  community, otherwise from all nodes, in both cases proportional to
  ``degree + 1`` and never equal to the source;
* both endpoints' degrees grow by one, the aging set's recency counters grow
  by one and the source's counter is reset to zero.

The aging set is every node that appeared in an earlier snapshot, or every
node when ``age_all`` is set.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .community import Partition
from .errors import ParameterError
from .events import Event

logger = logging.getLogger(__name__)


@dataclass
class BcsbmParams:
    n: int = 150
    T: int = 100
    community_sizes: tuple[int, ...] = (50, 50, 50)
    community_weights: tuple[float, ...] = (1.0, 2.0, 4.0)
    epsilon: float = 0.0
    lam: float = 0.5
    z_init_max: int = 1000
    seed: int = 42
    age_all: bool = False

    def __post_init__(self):
        self.community_sizes = tuple(int(s) for s in self.community_sizes)
        self.community_weights = tuple(float(w) for w in self.community_weights)

    def validate(self) -> "BcsbmParams":
        if self.n < 2:
            raise ParameterError(f"n: need at least 2 nodes, got {self.n}")
        if self.T < 1:
            raise ParameterError(f"T: need at least one outer step, got {self.T}")
        if any(s <= 0 for s in self.community_sizes):
            raise ParameterError(f"community_sizes: all sizes must be positive, got {self.community_sizes}")
        if sum(self.community_sizes) != self.n:
            raise ParameterError(f"community_sizes: sum {sum(self.community_sizes)} != n = {self.n}")
        if len(self.community_weights) != len(self.community_sizes):
            raise ParameterError("community_weights: need one weight per community")
        if any(not w > 0 for w in self.community_weights):
            raise ParameterError(f"community_weights: all weights must be positive, got {self.community_weights}")
        if not self.epsilon >= 0:
            raise ParameterError(f"epsilon: must be non-negative, got {self.epsilon}")
        if not 0.0 <= self.lam <= 1.0:
            raise ParameterError(f"lam: must lie in [0, 1], got {self.lam}")
        if self.z_init_max < 1:
            raise ParameterError(f"z_init_max: must be positive, got {self.z_init_max}")
        return self

    def block_matrix(self) -> np.ndarray:
        """Community-level block weights; ``A_w[u, v] = B[c(u), c(v)]``."""
        k = len(self.community_sizes)
        B = np.full((k, k), float(self.epsilon))
        np.fill_diagonal(B, self.community_weights)
        return B

    def community_of(self) -> np.ndarray:
        return np.repeat(np.arange(len(self.community_sizes)), self.community_sizes)

    def to_dict(self) -> dict:
        """JSON-ready dict; ``lam`` is written under its plain name ``lambda``."""
        d = asdict(self)
        d["community_sizes"] = list(self.community_sizes)
        d["community_weights"] = list(self.community_weights)
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "BcsbmParams":
        data = dict(data)
        if "lambda" in data:
            data["lam"] = data.pop("lambda")
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ParameterError(f"{sorted(unknown)[0]}: unknown parameter")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"bad parameter value: {exc}") from exc

    def replace(self, **changes) -> "BcsbmParams":
        d = asdict(self)
        d.update(changes)
        return BcsbmParams(**d)


@dataclass
class GeneratorState:
    z: np.ndarray
    d: np.ndarray
    community_of: np.ndarray


@dataclass
class TemporalGraphRun:
    snapshots: list[np.ndarray]  # T arrays of shape (n, 2): source, target
    activity_log: list[Event]
    params: BcsbmParams
    ground_truth: Partition
    run_id: str = "bcsbm"
    state: GeneratorState | None = field(default=None, repr=False)
    uniform_fallbacks: int = 0

    def edges(self) -> np.ndarray:
        return np.concatenate(self.snapshots) if self.snapshots else np.empty((0, 2), dtype=np.int64)

    def in_degrees(self) -> np.ndarray:
        return np.bincount(self.edges()[:, 1], minlength=self.params.n)

    def total_degrees(self) -> np.ndarray:
        e = self.edges()
        return np.bincount(e.ravel(), minlength=self.params.n)


def _pick(cum: np.ndarray, u: float) -> int:
    """Inverse-CDF draw from cumulative weights; zero-weight slots are never hit."""
    idx = int(np.searchsorted(cum, u * cum[-1], side="right"))
    if idx == len(cum):
        # u * total rounded up to total
        idx = int(np.searchsorted(cum, cum[-1], side="left"))
    return idx


def simulate(params: BcsbmParams, run_id: str = "bcsbm") -> TemporalGraphRun:
    """Run the generator; identical params (including seed) give identical output."""
    params.validate()
    n, T = params.n, params.T
    rng = np.random.default_rng(params.seed)
    comm = params.community_of()
    B = params.block_matrix()
    k = B.shape[0]
    sizes = np.asarray(params.community_sizes)

    z = rng.integers(0, params.z_init_max, size=n).astype(np.float64)
    d = np.zeros(n, dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    all_nodes = np.ones(n, dtype=bool)
    fallbacks = 0
    snapshots = []
    activity = []

    for t in range(T):
        aging = all_nodes if params.age_all else seen.copy()
        in_snapshot = np.zeros(n, dtype=bool)
        edges = np.empty((n, 2), dtype=np.int64)
        for i in range(n):
            block_sums = np.bincount(comm, weights=z, minlength=k)
            source_w = (B @ block_sums)[comm]
            u_source, r, u_target = rng.random(3)
            total = source_w.sum()
            if total > 0:
                src = _pick(np.cumsum(source_w), u_source)
            else:
                fallbacks += 1
                src = min(int(u_source * n), n - 1)

            target_w = (d + 1).astype(np.float64)
            if r < params.lam and sizes[comm[src]] > 1:
                target_w[comm != comm[src]] = 0.0
            elif r < params.lam:
                fallbacks += 1
            target_w[src] = 0.0
            dst = _pick(np.cumsum(target_w), u_target)

            edges[i] = src, dst
            activity.append(Event(str(src), run_id, float(t * n + i)))
            d[src] += 1
            d[dst] += 1
            in_snapshot[src] = in_snapshot[dst] = True
            z[aging] += 1.0
            z[src] = 0.0
        seen |= in_snapshot
        snapshots.append(edges)

    if fallbacks:
        logger.warning("run %s: %d uniform fallbacks", run_id, fallbacks)
    truth = Partition({str(v): int(c) for v, c in enumerate(comm)})
    return TemporalGraphRun(
        snapshots=snapshots,
        activity_log=activity,
        params=params,
        ground_truth=truth,
        run_id=run_id,
        state=GeneratorState(z=z, d=d, community_of=comm),
        uniform_fallbacks=fallbacks,
    )


def derive_seed(base_seed: int, *path: int) -> int:
    """Deterministic child seed for ``(base_seed, *path)``."""
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def simulate_multi_domain(
    params: BcsbmParams, n_domains: int, seeds: Sequence[int] | None = None
) -> list[TemporalGraphRun]:
    """Independent data-plane runs over one shared control plane.

    Domain ``j`` is simulated with seed ``derive_seed(params.seed, j)`` unless
    ``seeds`` overrides them, and its events carry domain ``"d{j}"``.
    """
    if n_domains < 1:
        raise ParameterError(f"n_domains: must be positive, got {n_domains}")
    if seeds is None:
        seeds = [derive_seed(params.seed, j) for j in range(n_domains)]
    elif len(seeds) != n_domains:
        raise ParameterError(f"seeds: expected {n_domains} seeds, got {len(seeds)}")
    return [simulate(params.replace(seed=int(s)), run_id=f"d{j}") for j, s in enumerate(seeds)]


def intra_edge_fraction(run: TemporalGraphRun) -> float:
    edges = run.edges()
    if len(edges) == 0:
        raise ParameterError("run has no edges")
    comm = run.params.community_of()
    return float(np.mean(comm[edges[:, 0]] == comm[edges[:, 1]]))
