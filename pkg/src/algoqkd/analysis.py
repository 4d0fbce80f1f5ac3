"""Closed-form quantities and Monte Carlo experiments.

Binary entropy, the asymptotic key rate ``1 - h(2(p+eps)) - h(p+eps)``, the
finite-N security bound ``2^(-delta N) + 3 exp(-eps^2 N / 4)``, the
sampling-without-replacement tail experiment and the aggregation of protocol
sessions against the security bound.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

PROXY_CAVEAT = (
    "PROXY: description lengths come from a computable lossless compressor, "
    "not from (uncomputable) Kolmogorov complexity, and Eve's side information "
    "is her classical measurement record rather than her quantum state. "
    "The frequency below is evidence about the proxy only."
)


def binary_entropy(p: float) -> float:
    """``h(p) = -p log2 p - (1-p) log2 (1-p)`` with ``h(0) = h(1) = 0``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary entropy needs p in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    # log1p keeps the (1-p) term accurate near p -> 0
    return float(-(p * math.log(p) + (1.0 - p) * math.log1p(-p)) / math.log(2.0))


class KeyRate(NamedTuple):
    value: float
    in_regime: bool  # False when 2(p+eps) > 1/2, where the rate is not monotone/positive


def key_rate(p: float, epsilon: float) -> KeyRate:
    """Asymptotic rate per sifted bit, ``1 - h(2(p+eps)) - h(p+eps)``."""
    if p < 0 or epsilon < 0:
        raise ValueError("p and epsilon must be non-negative")
    q = p + epsilon
    if 2 * q > 1:
        raise ValueError(f"2(p+epsilon) = {2 * q} exceeds 1; entropy undefined")
    value = 1.0 - binary_entropy(2 * q) - binary_entropy(q)
    return KeyRate(value, bool(2 * q <= 0.5))


def security_bound(n: int, delta: float, epsilon: float) -> float:
    """``2^(-delta n) + 3 exp(-epsilon^2 n / 4)``."""
    if n < 1 or delta <= 0 or epsilon <= 0:
        raise ValueError("security bound needs n >= 1, delta > 0, epsilon > 0")
    return 2.0 ** (-delta * n) + 3.0 * math.exp(-(epsilon**2) * n / 4.0)


def hoeffding_bound(n: int, epsilon: float) -> float:
    return math.exp(-(epsilon**2) * n / 2.0)


@dataclass
class SamplingTailReport:
    n: int
    p: float
    epsilon: float
    trials: int
    joint_frequency: float  # max over the error-weight grid
    hoeffding_bound: float
    standard_error: float
    worst_weight: int
    holds: bool
    sweep: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def split_test_positions(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform size-``n`` subset of ``range(2n)`` (Fisher-Yates shuffle), sorted."""
    return np.sort(rng.permutation(2 * n)[:n])


def _joint_event(test_errors: np.ndarray, weight: int, n: int, p: float, epsilon: float):
    info_errors = weight - test_errors
    return (info_errors > n * (p + epsilon)) & (test_errors <= n * p)


def default_weight_grid(n: int, p: float, epsilon: float, points: int = 41) -> list[int]:
    grid = set(np.linspace(0, 2 * n, points).round().astype(int).tolist())
    centre = 2 * n * (p + epsilon / 2)
    grid.add(int(round(centre)))
    # dense band over the region where both constraints can be met
    lo = int(math.floor(n * (p + epsilon)))
    hi = int(math.ceil(n * (2 * p + epsilon))) + 1
    grid.update(range(max(lo, 0), min(hi, 2 * n) + 1, max(1, (hi - lo) // 20)))
    return sorted(w for w in grid if 0 <= w <= 2 * n)


def sampling_tail_mc(n: int, p: float, epsilon: float, trials: int, seed: int,
                     weights: Sequence[int] | None = None,
                     method: str = "hypergeometric") -> SamplingTailReport:
    """Frequency of ``|z_I + z'_I| > n(p+eps) and |z_T + z'_T| <= n p``.

    For each error weight ``w`` on the grid, a fixed pattern with ``w`` errors
    among the ``2n`` positions is split by a uniformly random test set of
    size ``n``. ``method="fisher-yates"`` draws each split explicitly;
    ``"hypergeometric"`` draws the number of errors landing in the test set
    from its exact law, which is the same distribution and much faster.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if method not in ("hypergeometric", "fisher-yates"):
        raise ValueError(f"unknown method {method!r}")
    weights = default_weight_grid(n, p, epsilon) if weights is None else list(weights)
    ss = np.random.SeedSequence(seed)
    sweep = []
    for w, child in zip(weights, ss.spawn(len(weights))):
        rng = np.random.default_rng(child)
        if w == 0:
            test_errors = np.zeros(trials, dtype=np.int64)
        elif method == "hypergeometric":
            test_errors = rng.hypergeometric(w, 2 * n - w, n, size=trials)
        else:
            # errors sit on positions [0, w); count how many the test set picks up
            test_errors = np.array(
                [int(np.count_nonzero(split_test_positions(rng, n) < w)) for _ in range(trials)]
            )
        hits = int(np.count_nonzero(_joint_event(test_errors, w, n, p, epsilon)))
        freq = hits / trials
        sweep.append({"weight": int(w), "hits": hits, "frequency": freq,
                      "standard_error": math.sqrt(freq * (1 - freq) / trials)})
    worst = max(sweep, key=lambda r: r["frequency"])
    bound = hoeffding_bound(n, epsilon)
    return SamplingTailReport(
        n=n, p=p, epsilon=epsilon, trials=trials, joint_frequency=worst["frequency"],
        hoeffding_bound=bound, standard_error=worst["standard_error"],
        worst_weight=worst["weight"],
        holds=bool(worst["frequency"] <= bound + 3 * worst["standard_error"]),
        sweep=sweep,
    )


@dataclass
class SecurityBoundReport:
    n: int
    delta: float
    epsilon: float
    bound: float
    empirical_bad_frequency: float | None
    sessions: int
    aborted: int = 0
    bad_events: int = 0
    deficiency_threshold: float = 0.0
    c_model: int = 0
    model: str = ""
    boundary_hits: int = 0
    vacuous: bool = False
    holds: bool = True
    caveat: str = PROXY_CAVEAT

    def to_dict(self) -> dict:
        return asdict(self)


def aggregate_sessions(transcripts, model, delta: float) -> SecurityBoundReport:
    """Fraction of sessions that pass the test yet leave Eve a short description.

    A session is *bad* when it did not abort and the proxied deficiency
    ``M - dl(final key | Eve's record, public data)`` is at least
    ``delta * N + c_model``.
    """
    from .protocol import eve_guess_proxy

    transcripts = list(transcripts)
    if not transcripts:
        raise ValueError("no transcripts to aggregate")
    keys = {(t.params["n"], t.params["m"], t.params["p"], t.params["epsilon"]) for t in transcripts}
    if len(keys) != 1:
        raise ValueError(f"transcripts come from {len(keys)} different configurations")
    n, m, p, epsilon = keys.pop()
    c_model = model.c_model(m)
    threshold = delta * n + c_model
    bad = aborted = boundary = 0
    for t in transcripts:
        boundary += int(t.boundary_hit)
        if t.aborted:
            aborted += 1
            continue
        _, deficiency = eve_guess_proxy(t, model)
        if deficiency >= threshold:
            bad += 1
    bound = security_bound(n, delta, epsilon)
    freq = bad / len(transcripts)
    return SecurityBoundReport(
        n=n, delta=delta, epsilon=epsilon, bound=bound, empirical_bad_frequency=freq,
        sessions=len(transcripts), aborted=aborted, bad_events=bad,
        deficiency_threshold=threshold, c_model=c_model, model=model.name,
        boundary_hits=boundary, vacuous=bool(bound >= 1.0), holds=bool(freq <= bound),
    )
