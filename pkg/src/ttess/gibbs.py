"""Energies over tessellations and Monte-Carlo estimation of the Gibbs mass.

The unnormalised measure weights a tessellation by exp(-H(T)) on top of a
Poisson line process of intensity tau. Every energy declares a stability
constant C with H(T) >= -C * #lines, checked at evaluation time. The total
mass is estimated by sampling line sets, enumerating all tessellations on
each and averaging the summed weights; a companion series evaluates the
analytic upper bound term by term in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cells import extract_cells
from .errors import StabilityViolation
from .geometry import (
    build_event_table,
    choose_time_axis,
    sample_poisson_lines,
    unit_square,
)
from .enumeration import DEFAULT_BUDGET, enumerate_all
from .tessellation import Prototessellation, require_ttessellation


@dataclass(frozen=True)
class NLines:
    """Energy proportional to the number of lines."""

    theta: float
    needs_cells = False

    def term(self, tess, table, cells=None) -> float:
        return self.theta * len(tess.births)

    def stability_constant(self, window) -> float:
        return max(0.0, -self.theta)


@dataclass(frozen=True)
class TotalLength:
    """Energy proportional to the summed segment lengths."""

    theta: float
    needs_cells = False

    def term(self, tess, table, cells=None) -> float:
        total = 0.0
        for l in range(len(tess.births)):
            total += math.dist(
                table.point_of(tess.births[l]), table.point_of(tess.deaths[l])
            )
        return self.theta * total

    def stability_constant(self, window) -> float:
        return max(0.0, -self.theta * window.diameter())


@dataclass(frozen=True)
class AreaVariance:
    """Energy penalising unequal cell areas (sum of squared deviations)."""

    theta: float
    needs_cells = True

    def term(self, tess, table, cells=None) -> float:
        if cells is None:
            cells = extract_cells(tess, table)
        mean = sum(c.area for c in cells) / len(cells)
        return self.theta * sum((c.area - mean) ** 2 for c in cells)

    def stability_constant(self, window) -> float:
        return max(0.0, -self.theta) * window.area() ** 2


@dataclass(frozen=True)
class Composite:
    parts: tuple

    @property
    def needs_cells(self) -> bool:
        return any(p.needs_cells for p in self.parts)

    def term(self, tess, table, cells=None) -> float:
        return sum(p.term(tess, table, cells) for p in self.parts)

    def stability_constant(self, window) -> float:
        return sum(p.stability_constant(window) for p in self.parts)


def parse_energy(text: str):
    """Parse ``nlines:0.5`` / ``length:1.0`` / ``area:2.0`` (comma-composable)."""
    kinds = {"nlines": NLines, "length": TotalLength, "area": AreaVariance}
    parts = []
    for chunk in text.split(","):
        name, _, value = chunk.partition(":")
        name = name.strip().lower()
        if name not in kinds:
            raise ValueError(f"unknown energy {name!r} (expected one of {sorted(kinds)})")
        parts.append(kinds[name](float(value) if value else 1.0))
    return parts[0] if len(parts) == 1 else Composite(tuple(parts))


def energy(model, tess: Prototessellation, table, *, cells=None,
           validated: bool = False) -> float:
    """Evaluate H(T), enforcing the declared stability bound."""
    if not validated:
        require_ttessellation(tess, table)
    if cells is None and model.needs_cells:
        cells = extract_cells(tess, table)
    value = model.term(tess, table, cells)
    bound = model.stability_constant(table.window) * len(tess.births)
    if value + bound < -1e-9 * (1.0 + abs(value)):
        raise StabilityViolation(
            f"H = {value} undercuts the declared linear bound -{bound}"
        )
    return value


@dataclass(frozen=True)
class PartitionEstimate:
    z_hat: float
    std_error: float
    samples: int
    skipped_oversize: int
    tau: float
    k_cap: int
    seed: int
    per_sample: tuple | None = None

    @property
    def truncated(self) -> bool:
        return self.skipped_oversize > 0

    def to_dict(self) -> dict:
        return {
            "z_hat": self.z_hat,
            "std_error": self.std_error,
            "samples": self.samples,
            "skipped_oversize": self.skipped_oversize,
            "tau": self.tau,
            "k_cap": self.k_cap,
            "seed": self.seed,
            "truncated": self.truncated,
        }


def estimate_partition(model, tau: float, vertices=None, n_samples: int = 1000,
                       k_cap: int = 9, seed: int = 0,
                       budget: int = DEFAULT_BUDGET,
                       keep_samples: bool = False) -> PartitionEstimate:
    """Monte-Carlo estimate of the Gibbs mass on the window.

    Each sample draws a Poisson line set, enumerates every tessellation on
    it and sums their weights exp(-H). Samples with more than ``k_cap``
    lines contribute zero and are counted in ``skipped_oversize``, so a
    nonzero count flags the estimate as truncated. Per-sample randomness is
    derived from (seed, index), making the estimate schedule-independent.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    verts = unit_square() if vertices is None else vertices
    weights = []
    per_sample = []
    skipped = 0
    for i in range(n_samples):
        lines = sample_poisson_lines(tau, verts, seed=(seed, i))
        k = len(lines)
        if k > k_cap:
            skipped += 1
            weights.append(0.0)
            per_sample.append((k, 0.0))
            continue
        window = choose_time_axis(lines, verts, seed=(seed, i, 1))
        table = build_event_table(lines, window)
        weight = 0.0
        for tess in enumerate_all(table, budget=budget):
            weight += math.exp(-energy(model, tess, table, validated=True))
        weights.append(weight)
        per_sample.append((k, weight))
    mean = sum(weights) / n_samples
    if n_samples > 1:
        var = sum((w - mean) ** 2 for w in weights) / (n_samples - 1)
        std_error = math.sqrt(var / n_samples)
    else:
        std_error = math.inf
    return PartitionEstimate(
        z_hat=mean,
        std_error=std_error,
        samples=n_samples,
        skipped_oversize=skipped,
        tau=tau,
        k_cap=k_cap,
        seed=seed,
        per_sample=tuple(per_sample) if keep_samples else None,
    )


@dataclass(frozen=True)
class FourKBound:
    """Per-k tessellation count bound (4k)^k."""

    def log_value(self, k: int) -> float:
        return 0.0 if k == 0 else k * math.log(4.0 * k)


@dataclass(frozen=True)
class RateBound:
    """Count bound constant^k * (k / (ln k)^(1-epsilon))^(k - k/ln k).

    No numeric constant is canonical; the caller supplies one. Values at
    k = 0, 1 are the trivial count 1 times constant^k.
    """

    epsilon: float
    constant: float

    def log_value(self, k: int) -> float:
        if k == 0:
            return 0.0
        if k == 1:
            return math.log(self.constant)
        lk = math.log(k)
        exponent = k - k / lk
        return k * math.log(self.constant) + exponent * (
            math.log(k) - (1.0 - self.epsilon) * math.log(lk)
        )


@dataclass(frozen=True)
class BoundSeries:
    stability_constant: float
    tau: float
    log_terms: tuple
    terms: tuple
    log_total: float
    total: float
    tail_decreasing: bool


def partition_series_bound(stability_constant: float, tau: float, k_max: int,
                           bound) -> BoundSeries:
    """Partial sum of exp(C k) * bound(k) * e^(-tau) tau^k / k!, in log space."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    log_terms = []
    for k in range(k_max + 1):
        log_terms.append(
            stability_constant * k
            + bound.log_value(k)
            - tau
            + (k * math.log(tau) if k else 0.0)
            - math.lgamma(k + 1)
        )
    peak = max(log_terms)
    log_total = peak + math.log(sum(math.exp(t - peak) for t in log_terms))
    terms = tuple(math.exp(t) if t < 700 else math.inf for t in log_terms)
    tail_decreasing = len(log_terms) < 2 or log_terms[-1] < log_terms[-2]
    return BoundSeries(
        stability_constant=stability_constant,
        tau=tau,
        log_terms=tuple(log_terms),
        terms=terms,
        log_total=log_total,
        total=math.exp(log_total) if log_total < 700 else math.inf,
        tail_decreasing=tail_decreasing,
    )
