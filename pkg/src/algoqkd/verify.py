"""Randomised verification sweeps shared by the CLI and the acceptance tests."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .algoinfo import LZ78Model, counting_check, length_profile
from .gf2 import BitString
from .lincode import CodeConstructionError, CodeRequirement, character_sum, construct_code
from .listing import FAMILIES, build_synthetic_instance, verify_listing_bound
from .qsim import (
    VERIFY_TOL,
    DensityOperator,
    random_density,
    random_projector,
    verify_projection_perturbation,
)

SUITES = ("lemma-a1", "lemma-a2", "listing-bound", "counting")


@dataclass
class SuiteResult:
    suite: str
    instances: int
    violations: int
    stats: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _random_weight_vector(n: int, max_weight: int, rng) -> BitString:
    w = int(rng.integers(0, max_weight + 1))
    bits = np.zeros(n, dtype=np.uint8)
    bits[rng.choice(n, size=w, replace=False)] = 1
    return BitString(bits)


def random_code_family(count: int, seed: int, n_range=(6, 16), min_distance: int = 3):
    """Codes with ``d(C) >= min_distance`` over a spread of ``(n, m)``."""
    rng = np.random.default_rng(seed)
    codes = []
    while len(codes) < count:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        m = int(rng.integers(1, max(2, n // 3) + 1))
        floor = int(rng.integers(min_distance - 1, max(min_distance, n // 2)))
        try:
            codes.append(construct_code(CodeRequirement(n, m, floor),
                                        seed=int(rng.integers(2**63)), max_attempts=200))
        except CodeConstructionError:
            continue
    return codes


def character_sum_suite(codes: int = 50, triples: int = 200, seed: int = 0) -> SuiteResult:
    """Character sums over ``f^{-1}(y)`` equal ``[s == t] 2^(n-m)`` for light ``s, t``."""
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    family = random_code_family(codes, int(rng.integers(2**63)))
    violations = 0
    equal_cases = 0
    for code in family:
        radius = (code.min_distance - 1) // 2  # |s|, |t| < d/2
        for _ in range(triples):
            y = BitString.random(code.m, rng)
            s = _random_weight_vector(code.n, radius, rng)
            t = s if rng.random() < 0.25 else _random_weight_vector(code.n, radius, rng)
            expected = (1 << (code.n - code.m)) if s == t else 0
            equal_cases += s == t
            if character_sum(code, y, s, t) != expected:
                violations += 1
    return SuiteResult("lemma-a2", codes * triples, violations,
                       {"codes": codes, "equal_cases": int(equal_cases),
                        "n_values": sorted({c.n for c in family}),
                        "min_distances": sorted({c.min_distance for c in family})},
                       time.perf_counter() - start)


def perturbation_suite(instances: int = 1000, seed: int = 0) -> SuiteResult:
    """Projection perturbation on random states and projectors, dimensions 2..16.

    A third of the states are concentrated near the range of ``P`` so that
    the right-hand side is small and the inequality is exercised near its edge.
    """
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    violations = 0
    worst_ratio = 0.0
    worst_slack = np.inf
    for i in range(instances):
        dim = int(rng.integers(2, 17))
        p = random_projector(dim, int(rng.integers(0, dim + 1)), rng)
        q = random_projector(dim, int(rng.integers(0, dim + 1)), rng)
        rho = random_density(dim, rng, rank=int(rng.integers(1, dim + 1)))
        if i % 3 == 0 and np.trace(p.matrix).real > 0.5:
            inside = p.matrix @ rho.matrix @ p.matrix
            inside /= np.trace(inside).real
            eta = float(rng.uniform(0, 0.05))
            mixed = (1 - eta) * inside + eta * rho.matrix
            rho = DensityOperator((mixed + mixed.conj().T) / 2)
        check = verify_projection_perturbation(rho, p, q)
        violations += not check.holds
        if check.rhs > 0:
            worst_ratio = max(worst_ratio, check.ratio)
        worst_slack = min(worst_slack, check.rhs - check.lhs)
    return SuiteResult("lemma-a1", instances, violations,
                       {"max_lhs_over_rhs": worst_ratio, "min_slack": float(worst_slack),
                        "tolerance": VERIFY_TOL},
                       time.perf_counter() - start)


def listing_bound_suite(instances: int = 200, seed: int = 0, max_n: int = 4) -> SuiteResult:
    """Synthetic instances checking distinguishability, ``Q_L^2 = Q_L``, the
    classical-probability identity and the listing bound itself."""
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    violations = 0
    worst = {"identification_residue": 0.0, "q_projector_residue": 0.0, "classical_residue": 0.0,
             "max_lhs_over_rhs": 0.0, "min_slack": np.inf, "min_conditional_slack": np.inf}
    by_family = {f: 0 for f in FAMILIES}
    for i in range(instances):
        n = int(rng.integers(2, max_n + 1))
        radius = int(rng.integers(0, (n - 1) // 2 + 1))
        max_m = min(n - 1 if radius else n, 3 if n == 4 else n)
        m = int(rng.integers(1, max(1, max_m) + 1))
        try:
            code = construct_code(CodeRequirement(n, m, 2 * radius),
                                  seed=int(rng.integers(2**63)), max_attempts=200)
        except CodeConstructionError:
            code = construct_code(CodeRequirement(n, 1, 2 * radius), seed=i, max_attempts=200)
        family = FAMILIES[i % len(FAMILIES)]
        by_family[family] += 1
        inst = build_synthetic_instance(code, int(rng.integers(2**63)),
                                        int(rng.integers(1, 5)), family)
        check = verify_listing_bound(inst, radius / n)
        bad = (inst.identification_residue > VERIFY_TOL or inst.q_projector_residue > VERIFY_TOL
               or check.classical_residue > VERIFY_TOL or not check.holds
               or not check.conditional_holds)
        violations += bad
        worst["identification_residue"] = max(worst["identification_residue"], inst.identification_residue)
        worst["q_projector_residue"] = max(worst["q_projector_residue"], inst.q_projector_residue)
        worst["classical_residue"] = max(worst["classical_residue"], check.classical_residue)
        worst["max_lhs_over_rhs"] = max(worst["max_lhs_over_rhs"], check.ratio)
        worst["min_slack"] = min(worst["min_slack"], check.rhs - check.lhs)
        worst["min_conditional_slack"] = min(worst["min_conditional_slack"],
                                             check.conditional_worst_slack)
    worst = {k: float(v) for k, v in worst.items()}
    worst["families"] = by_family
    return SuiteResult("listing-bound", instances, violations, worst,
                       time.perf_counter() - start)


def counting_suite(max_m: int = 12, model: LZ78Model | None = None) -> SuiteResult:
    """Counting law at every threshold ``-1..max dl`` for every ``m <= max_m``."""
    start = time.perf_counter()
    model = model or LZ78Model()
    violations = 0
    checks = 0
    table = []
    for m in range(1, max_m + 1):
        lengths = length_profile(model, m)
        tightest = (0.0, -1, 0, 0)  # (count / bound, threshold, count, bound)
        for threshold in range(-1, int(lengths.max()) + 1):
            count = int(np.count_nonzero(lengths <= threshold))
            bound = (1 << (threshold + 1)) - 1 if threshold >= 0 else 0
            violations += count > bound
            checks += 1
            if bound and count / bound > tightest[0]:
                tightest = (count / bound, threshold, count, bound)
        table.append({"m": m, "min_dl": int(lengths.min()), "max_dl": int(lengths.max()),
                      "strings": 1 << m, "threshold": tightest[1], "count": tightest[2],
                      "bound": tightest[3]})
    # the public operation must agree with the sweep
    spot = counting_check(model, max_m, int(length_profile(model, max_m).max()))
    violations += not (spot.holds and spot.count == 1 << max_m)
    return SuiteResult("counting", checks, violations, {"table": table},
                       time.perf_counter() - start)


def run_suite(name: str, seed: int = 0, instances: int | None = None,
              m: int | None = None) -> SuiteResult:
    if name == "lemma-a1":
        return perturbation_suite(instances or 1000, seed)
    if name == "lemma-a2":
        return character_sum_suite(instances or 50, 200, seed)
    if name == "listing-bound":
        return listing_bound_suite(instances or 200, seed)
    if name == "counting":
        return counting_suite(m or 12)
    raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
