"""Lambda sweep: simulate, detect and score every (lambda, replicate) cell."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bcsbm import BcsbmParams, derive_seed, intra_edge_fraction, simulate
from .community import Partition, nmi
from .errors import ParameterError
from .heavytail import classify_network
from .pipeline import detect_bursty, detect_structural, edge_graph, evaluate

logger = logging.getLogger(__name__)

DETECTORS = ("bursty", "louvain_edges", "lpa_edges")
DEFAULT_GRID = tuple(round(0.1 * i, 1) for i in range(11))
SWEEP_COLUMNS = ("lambda", "replicate", "detector", "nmi", "ari", "intra_edge_fraction")
DEGFIT_COLUMNS = ("lambda", "seed", "eligible", "winner", "llr_pl", "p_pl", "llr_ln", "p_ln", "llr_exp", "p_exp")


@dataclass
class SweepSpec:
    lambda_grid: tuple[float, ...] = DEFAULT_GRID
    replicates: int = 10
    base_seed: int = 42
    detectors: tuple[str, ...] = DETECTORS
    generator: BcsbmParams = field(default_factory=BcsbmParams)
    resolution: float = 1.0
    transform: str = "one_minus_ks"
    min_events: int = 5
    degfit: bool = False
    degree: str = "in"

    def __post_init__(self):
        self.lambda_grid = tuple(float(v) for v in self.lambda_grid)
        self.detectors = tuple(self.detectors)

    def validate(self) -> "SweepSpec":
        grid = self.lambda_grid
        if not grid:
            raise ParameterError("lambda_grid: must not be empty")
        if any(not 0.0 <= v <= 1.0 for v in grid):
            raise ParameterError(f"lambda_grid: values must lie in [0, 1], got {grid}")
        if list(grid) != sorted(set(grid)):
            raise ParameterError("lambda_grid: values must be unique and sorted")
        if self.replicates < 1:
            raise ParameterError(f"replicates: must be >= 1, got {self.replicates}")
        unknown = set(self.detectors) - set(DETECTORS)
        if unknown or not self.detectors:
            raise ParameterError(f"detectors: expected a non-empty subset of {DETECTORS}, got {self.detectors}")
        if self.degree not in ("in", "total"):
            raise ParameterError(f"degree: expected 'in' or 'total', got {self.degree!r}")
        self.generator.validate()
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        data = dict(data)
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"{sorted(unknown)[0]}: unknown sweep field")
        if "generator" in data:
            data["generator"] = BcsbmParams.from_dict(data["generator"])
        try:
            return cls(**data).validate()
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ParameterError):
                raise
            raise ParameterError(f"bad sweep spec: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "lambda_grid": list(self.lambda_grid),
            "replicates": self.replicates,
            "base_seed": self.base_seed,
            "detectors": list(self.detectors),
            "generator": self.generator.to_dict(),
            "resolution": self.resolution,
            "transform": self.transform,
            "min_events": self.min_events,
            "degfit": self.degfit,
            "degree": self.degree,
        }

    def cells(self):
        for li, lam in enumerate(self.lambda_grid):
            for rep in range(self.replicates):
                yield li, lam, rep


@dataclass
class CellResult:
    lam: float
    replicate: int
    seed: int
    rows: list[dict]
    null_nmi: float | None = None
    degfit: dict | None = None


def shuffled_null(pred: Partition, truth: Partition, seed: int) -> float:
    """NMI of ``pred`` against a random relabelling of ``truth``'s nodes."""
    nodes = sorted(pred.nodes() & truth.nodes(), key=str)
    labels = np.array([truth[v] for v in nodes])
    np.random.default_rng(seed).shuffle(labels)
    shuffled = Partition(dict(zip(nodes, labels.tolist())))
    return nmi(pred.restrict(nodes), shuffled)


def run_cell(spec: SweepSpec, li: int, rep: int) -> CellResult:
    lam = spec.lambda_grid[li]
    seed = derive_seed(spec.base_seed, li, rep)
    run = simulate(spec.generator.replace(lam=lam, seed=seed))
    frac = intra_edge_fraction(run)
    truth = run.ground_truth
    rows = []
    null = None
    for det in spec.detectors:
        if det == "bursty":
            found = detect_bursty(run.activity_log, min_events=spec.min_events, transform=spec.transform,
                                  resolution=spec.resolution, seed=seed)
            null = shuffled_null(found.partition, truth, derive_seed(seed, 1))
        else:
            g = edge_graph(((str(s), str(d)) for s, d in run.edges()), nodes=truth.assignment)
            found = detect_structural(g, det, resolution=spec.resolution, seed=seed)
        scores = evaluate(found.partition, truth)
        rows.append({"lambda": lam, "replicate": rep, "detector": det, "nmi": scores["nmi"],
                     "ari": scores["ari"], "intra_edge_fraction": frac})
    degfit = None
    if spec.degfit:
        degrees = run.in_degrees() if spec.degree == "in" else run.total_degrees()
        degfit = degfit_row(lam, seed, classify_network(degrees))
    return CellResult(lam, rep, seed, rows, null, degfit)


def degfit_row(lam, seed, report) -> dict:
    row = {"lambda": lam, "seed": seed, "eligible": report.eligible, "winner": report.winner or ""}
    for short, model in (("pl", "power_law"), ("ln", "log_normal"), ("exp", "exponential")):
        c = report.comparisons.get(model)
        row[f"llr_{short}"] = c.llr if c else math.nan
        row[f"p_{short}"] = c.p_value if c else math.nan
    return row


def _run_cell_args(args):
    spec, li, rep = args
    return run_cell(spec, li, rep)


@dataclass
class SweepResult:
    cells: list[CellResult]
    failures: list[dict]

    @property
    def rows(self) -> list[dict]:
        return [row for cell in self.cells for row in cell.rows]

    @property
    def degfit_rows(self) -> list[dict]:
        return [cell.degfit for cell in self.cells if cell.degfit is not None]


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Run every cell; results come back in (lambda, replicate) order however
    they are scheduled. A failing cell is recorded, not fatal."""
    spec.validate()
    tasks = [(spec, li, rep) for li, _, rep in spec.cells()]
    cells, failures = [], []

    def collect(task, outcome):
        _, li, rep = task
        if isinstance(outcome, Exception):
            logger.error("cell lambda=%s replicate=%d failed: %s", spec.lambda_grid[li], rep, outcome)
            failures.append({"lambda": spec.lambda_grid[li], "replicate": rep, "error": repr(outcome)})
        else:
            cells.append(outcome)

    if workers <= 1:
        for task in tasks:
            try:
                outcome = _run_cell_args(task)
            except Exception as exc:  # noqa: BLE001 - recorded in the failure manifest
                outcome = exc
            collect(task, outcome)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_cell_args, task) for task in tasks]
            for task, fut in zip(tasks, futures):
                try:
                    outcome = fut.result()
                except Exception as exc:  # noqa: BLE001
                    outcome = exc
                collect(task, outcome)
    cells.sort(key=lambda c: (c.lam, c.replicate))
    return SweepResult(cells, failures)


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return value


def write_rows(rows, columns, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(row[k]) for k in columns})


def read_sweep_csv(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return [
            {
                "lambda": float(r["lambda"]),
                "replicate": int(r["replicate"]),
                "detector": r["detector"],
                "nmi": float(r["nmi"]),
                "ari": float(r["ari"]),
                "intra_edge_fraction": float(r["intra_edge_fraction"]),
            }
            for r in csv.DictReader(fh)
        ]


def read_degfit_csv(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        out = []
        for r in csv.DictReader(fh):
            row = {"lambda": float(r["lambda"]), "seed": int(r["seed"]), "eligible": r["eligible"] == "True",
                   "winner": r["winner"]}
            for key in DEGFIT_COLUMNS[4:]:
                row[key] = float(r[key])
            out.append(row)
        return out


def summarize(rows) -> dict[tuple[str, float], tuple[float, float, int]]:
    """``(detector, lambda) -> (mean nmi, sd nmi, count)``."""
    groups: dict = {}
    for row in rows:
        groups.setdefault((row["detector"], row["lambda"]), []).append(row["nmi"])
    return {
        key: (float(np.mean(v)), float(np.std(v, ddof=1)) if len(v) > 1 else 0.0, len(v))
        for key, v in sorted(groups.items())
    }


def plot_sweep(rows, path, *, timestamp: bool = True):
    """Mean NMI against lambda per detector with +-1 s.d. bands, as SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    summary = summarize(rows)
    detectors = sorted({det for det, _ in summary})
    with matplotlib.rc_context({"svg.hashsalt": "burstcoord", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5.5, 4))
        for det in detectors:
            lams = sorted(lam for d, lam in summary if d == det)
            mean = np.array([summary[(det, lam)][0] for lam in lams])
            sd = np.array([summary[(det, lam)][1] for lam in lams])
            ax.plot(lams, mean, marker="o", label=det)
            ax.fill_between(lams, mean - sd, mean + sd, alpha=0.2)
        ax.set_xlabel("lambda (intra-community target probability)")
        ax.set_ylabel("NMI")
        ax.set_ylim(-0.02, 1.02)
        ax.legend()
        fig.tight_layout()
        metadata = None if timestamp else {"Date": None}
        fig.savefig(path, format="svg", metadata=metadata)
        plt.close(fig)
