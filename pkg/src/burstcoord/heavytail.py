"""Heavy-tailed model selection for degree distributions.

Power-law tails are fitted by continuous maximum likelihood with the lower
cutoff ``xmin`` chosen to minimise the KS distance (Clauset, Shalizi &
Newman 2009). Truncated power-law, log-normal and exponential tails are then
fitted above the same ``xmin`` and compared through Vuong's normalised
log-likelihood ratio test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy import integrate, optimize, special, stats

from .errors import ContractError, FitError

MODELS = ("power_law", "truncated_power_law", "log_normal", "exponential")
ALTERNATIVES = ("truncated_power_law", "log_normal", "exponential")
MIN_SAMPLES = 10
MIN_UNIQUE_DEGREES = 50
SIGNIFICANCE = 0.1
DEFAULT_MIN_TAIL = 10

# truncated power law search box: alpha in (1, 6], beta in (0, 10]
_TPL_ALPHA_MAX = 6.0
_TPL_LOG10_BETA = (-15.0, 1.0)
_ALPHA_FLOOR = 1.0 + 1e-9
_QUAD_SPAN = 50.0
_UNDERFLOW = 746.0


@dataclass(frozen=True)
class TailFit:
    model: str
    params: dict
    xmin: float
    loglik: float
    n_tail: int
    ks: float | None = None

    def logpdf(self, x) -> np.ndarray:
        """Pointwise log-density of the tail model at ``x >= xmin``."""
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.model == "power_law":
            a = p["alpha"]
            return math.log(a - 1.0) - math.log(self.xmin) - a * np.log(x / self.xmin)
        if self.model == "truncated_power_law":
            a, b = p["alpha"], p["beta"]
            return -a * np.log(x) - b * x - _tpl_log_norm(a, b, self.xmin)
        if self.model == "log_normal":
            mu, s = p["mu"], p["sigma"]
            lx = np.log(x)
            return (
                -lx - math.log(s) - 0.5 * math.log(2 * math.pi) - (lx - mu) ** 2 / (2 * s * s)
                - stats.norm.logsf((math.log(self.xmin) - mu) / s)
            )
        if self.model == "exponential":
            lam = p["rate"]
            return math.log(lam) - lam * (x - self.xmin)
        raise ContractError(f"unknown model {self.model!r}")

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "params": dict(self.params),
            "xmin": self.xmin,
            "loglik": self.loglik,
            "n_tail": self.n_tail,
            "ks": self.ks,
        }


@dataclass(frozen=True)
class LlrResult:
    llr: float
    p_value: float

    def favours_first(self, significance: float = SIGNIFICANCE) -> bool:
        return self.llr > 0 and self.p_value < significance

    def to_dict(self) -> dict:
        return {"llr": self.llr, "p_value": self.p_value}


def _clean(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=float).ravel()
    x = x[np.isfinite(x) & (x > 0)]
    return np.sort(x)


def _tail(samples, xmin) -> np.ndarray:
    x = _clean(samples)
    return x[x >= xmin]


def _power_law_at(x_tail: np.ndarray, xmin: float):
    logs = np.log(x_tail / xmin)
    s = logs.sum()
    if s <= 0:
        return None
    n = x_tail.size
    alpha = 1.0 + n / s
    cdf = 1.0 - (x_tail / xmin) ** (1.0 - alpha)
    i = np.arange(1, n + 1)
    ks = max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n))
    loglik = n * math.log(alpha - 1.0) - n * math.log(xmin) - alpha * s
    return alpha, float(ks), float(loglik)


def fit_power_law(samples, xmin: float | None = None, *, min_tail: int = DEFAULT_MIN_TAIL) -> TailFit:
    """Continuous power-law fit with KS-optimal ``xmin``.

    Every distinct sample value leaving at least ``min_tail`` points (and two
    distinct values) in the tail is tried as ``xmin`` unless one is given.
    """
    x = _clean(samples)
    if x.size < MIN_SAMPLES:
        raise FitError(f"need at least {MIN_SAMPLES} positive samples, got {x.size}")
    if x[0] == x[-1]:
        raise FitError("all samples are equal; no tail to fit")
    if xmin is not None:
        candidates = [float(xmin)]
    else:
        distinct = np.unique(x)
        candidates = [v for v in distinct[:-1] if x.size - np.searchsorted(x, v) >= min_tail]
        if not candidates:
            candidates = [float(distinct[0])]

    best = None
    for xm in candidates:
        start = np.searchsorted(x, xm, side="left")
        fit = _power_law_at(x[start:], xm)
        if fit is None:
            continue
        if best is None or fit[1] < best[1][1]:
            best = (xm, fit, x.size - start)
    if best is None:
        raise FitError("no admissible xmin", {"candidates": len(candidates)})
    xm, (alpha, ks, loglik), n_tail = best
    return TailFit("power_law", {"alpha": alpha}, float(xm), loglik, int(n_tail), ks)


def _tpl_log_norm(alpha: float, beta: float, xmin: float) -> float:
    """log of int_xmin^inf x^-alpha exp(-beta x) dx, by quadrature.

    With ``x = xmin e^u`` and ``b = beta xmin`` the integral is
    ``xmin^(1-alpha) * I`` where ``I = int_0^inf exp((1-alpha)u - b e^u) du``.
    When ``b^(alpha-1)`` is small the pure power-law part ``1/(alpha-1)`` is
    split off and only the correction is integrated, so ``beta -> 0``
    reproduces the power-law normaliser to full precision. Beyond the point
    where ``exp(-b e^u)`` underflows the remaining piece is done in closed
    form.
    """
    b = beta * xmin
    knee = max(-math.log(b), 0.0)
    # past u = log1p(_UNDERFLOW / b) the integrand underflows; always > knee
    stop = min(knee + _QUAD_SPAN, math.log1p(_UNDERFLOW / b))
    quad = partial(integrate.quad, epsabs=0.0, epsrel=1e-13, limit=200)
    if (alpha - 1.0) * knee > 1.0:

        def correction(u):
            return math.exp((1.0 - alpha) * u) * -math.expm1(-b * math.exp(u))

        j = quad(correction, 0.0, knee)[0] + quad(correction, knee, stop)[0]
        j += math.exp((1.0 - alpha) * stop) / (alpha - 1.0)
        log_i = -math.log(alpha - 1.0) + math.log1p(-(alpha - 1.0) * j)
    else:

        def full(u):
            # exp(-b) factored out to keep the integrand <= 1
            return math.exp((1.0 - alpha) * u - b * math.expm1(u))

        i = quad(full, 0.0, knee)[0] if knee > 0 else 0.0
        i += quad(full, knee, stop)[0]
        log_i = math.log(i) - b
    return (1.0 - alpha) * math.log(xmin) + log_i


def _fit_tpl(tail: np.ndarray, xmin: float, alpha_pl: float | None) -> TailFit:
    n = tail.size
    log_sum = float(np.log(tail).sum())
    lin_sum = float(tail.sum())
    alpha_max = max(_TPL_ALPHA_MAX, (alpha_pl or 0.0) + 1.0)
    lo_b, hi_b = _TPL_LOG10_BETA

    def negll(theta):
        a, lb = theta
        a = min(max(a, _ALPHA_FLOOR), alpha_max)
        lb = min(max(lb, lo_b), hi_b)
        beta = 10.0**lb
        try:
            return a * log_sum + beta * lin_sum + n * _tpl_log_norm(a, beta, xmin)
        except (ValueError, OverflowError, ZeroDivisionError):
            return np.inf

    scale = math.log10(1.0 / max(tail.mean(), 1e-300))
    a0 = alpha_pl if alpha_pl is not None else 2.0
    starts = [
        (a0, lo_b),
        (a0, scale - 2.0),
        (1.5, scale),
        (2.5, scale - 1.0),
        (1.1, math.log10(1.0 / tail[-1])),
    ]
    bounds = [(_ALPHA_FLOOR, alpha_max), (lo_b, hi_b)]
    best = None
    failures = []
    for a_start, b_start in starts:
        x0 = (min(max(a_start, _ALPHA_FLOOR), alpha_max), min(max(b_start, lo_b), hi_b))
        res = optimize.minimize(
            negll, x0, method="Nelder-Mead", bounds=bounds,
            options={"xatol": 1e-9, "fatol": 1e-10, "maxiter": 4000},
        )
        if not np.isfinite(res.fun):
            failures.append(res.message)
            continue
        if best is None or res.fun < best.fun:
            best = res
    if best is None:
        raise FitError("truncated power-law optimisation failed from every start", {"messages": failures})
    alpha, lb = float(best.x[0]), float(best.x[1])
    return TailFit("truncated_power_law", {"alpha": alpha, "beta": 10.0**lb}, xmin, -float(best.fun), n)


def _fit_log_normal(tail: np.ndarray, xmin: float) -> TailFit:
    lx = np.log(tail)
    n = tail.size
    sum_lx = float(lx.sum())
    log_xmin = math.log(xmin)

    def negll(theta):
        mu, log_s = theta
        s = math.exp(log_s)
        z = (lx - mu) / s
        ll = -sum_lx - n * log_s - 0.5 * n * math.log(2 * math.pi) - 0.5 * float(np.dot(z, z))
        ll -= n * float(stats.norm.logsf((log_xmin - mu) / s))
        return -ll if np.isfinite(ll) else np.inf

    m0, s0 = float(lx.mean()), max(float(lx.std()), 1e-3)
    starts = [(m0, math.log(s0)), (m0 - s0, math.log(2 * s0)), (log_xmin, math.log(s0)),
              (m0 - 3 * s0, math.log(3 * s0)), (m0 + s0, math.log(0.5 * s0))]
    best = None
    for x0 in starts:
        res = optimize.minimize(negll, x0, method="Nelder-Mead",
                                options={"xatol": 1e-9, "fatol": 1e-10, "maxiter": 4000})
        if np.isfinite(res.fun) and (best is None or res.fun < best.fun):
            best = res
    if best is None:
        raise FitError("log-normal optimisation failed from every start")
    mu, log_s = best.x
    return TailFit("log_normal", {"mu": float(mu), "sigma": float(math.exp(log_s))}, xmin, -float(best.fun), n)


def _fit_exponential(tail: np.ndarray, xmin: float) -> TailFit:
    excess = float(tail.mean()) - xmin
    if excess <= 0:
        raise FitError("exponential fit needs samples above xmin")
    rate = 1.0 / excess
    n = tail.size
    loglik = n * math.log(rate) - rate * float((tail - xmin).sum())
    return TailFit("exponential", {"rate": rate}, xmin, loglik, n)


def fit_alternative(samples, model: str, xmin: float, *, alpha_hint: float | None = None) -> TailFit:
    """Maximum-likelihood fit of an alternative tail model above ``xmin``.

    ``alpha_hint`` (the power-law exponent at the same ``xmin``) seeds one of
    the truncated power-law restarts at the pure power-law limit.
    """
    tail = _tail(samples, xmin)
    if tail.size == 0:
        raise FitError(f"no samples at or above xmin={xmin}")
    if model == "truncated_power_law":
        if alpha_hint is None:
            pl = _power_law_at(tail, xmin)
            alpha_hint = pl[0] if pl is not None else None
        return _fit_tpl(tail, float(xmin), alpha_hint)
    if model == "log_normal":
        return _fit_log_normal(tail, float(xmin))
    if model == "exponential":
        return _fit_exponential(tail, float(xmin))
    raise ContractError(f"unknown alternative model {model!r}; expected one of {ALTERNATIVES}")


def llr_test(fit_a: TailFit, fit_b: TailFit, samples) -> LlrResult:
    """Vuong's test: ``llr = loglik_a - loglik_b`` with a two-sided normal p-value."""
    if fit_a.xmin != fit_b.xmin:
        raise ContractError(f"fits use different xmin ({fit_a.xmin} vs {fit_b.xmin})")
    tail = _tail(samples, fit_a.xmin)
    if tail.size != fit_a.n_tail or tail.size != fit_b.n_tail:
        raise ContractError("samples do not match the fitted tail")
    diff = fit_a.logpdf(tail) - fit_b.logpdf(tail)
    llr = float(diff.sum())
    sigma = float(diff.std())
    if sigma == 0.0 or tail.size == 0:
        return LlrResult(llr, 1.0)
    p = float(special.erfc(abs(llr) / math.sqrt(2.0 * tail.size * sigma * sigma)))
    return LlrResult(llr, min(p, 1.0))


@dataclass
class NetworkReport:
    eligible: bool
    n_unique: int
    winner: str | None = None
    fits: dict = field(default_factory=dict)
    comparisons: dict = field(default_factory=dict)
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "eligible": self.eligible,
            "n_unique": self.n_unique,
            "winner": self.winner,
            "fits": {k: f.to_dict() for k, f in self.fits.items()},
            "comparisons": {k: c.to_dict() for k, c in self.comparisons.items()},
            "note": self.note,
        }


def classify_network(
    degrees,
    *,
    min_unique: int = MIN_UNIQUE_DEGREES,
    significance: float = SIGNIFICANCE,
    min_tail: int = DEFAULT_MIN_TAIL,
) -> NetworkReport:
    """Decide whether a truncated power law beats every other tail model.

    Networks with fewer than ``min_unique`` distinct positive degrees are
    reported as ineligible. Otherwise the winner is ``truncated_power_law``
    when it has a positive LLR with p below ``significance`` against the
    power law, the log-normal and the exponential; else ``inconclusive``.
    """
    x = _clean(degrees)
    n_unique = int(np.unique(x).size)
    if n_unique < min_unique:
        return NetworkReport(False, n_unique, note=f"fewer than {min_unique} unique degrees")
    pl = fit_power_law(x, min_tail=min_tail)
    fits = {"power_law": pl}
    for model in ALTERNATIVES:
        fits[model] = fit_alternative(x, model, pl.xmin, alpha_hint=pl.params["alpha"])
    tpl = fits["truncated_power_law"]
    comparisons = {m: llr_test(tpl, fits[m], x) for m in ("power_law", "log_normal", "exponential")}
    wins = all(c.favours_first(significance) for c in comparisons.values())
    return NetworkReport(True, n_unique, "truncated_power_law" if wins else "inconclusive", fits, comparisons)
