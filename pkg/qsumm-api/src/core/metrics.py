"""
Métricas de avaliação: razão de aproximação, probabilidade de satisfazer a
restrição e histogramas de distância de Hamming.

Toda função aceita um `SampleSet` (modo amostrado), o vetor de
probabilidades de um statevector (modo exato) ou um mapa bitstring -> probabilidade.
"""

import math
from typing import Mapping

import numpy as np
from core.errors import DegenerateRange, EmptyInput
from core.problem import OracleResult, ProblemInstance, bitstring_to_index, objective_table
from core.simulator import SampleSet
from pydantic import BaseModel, Field

Distribution = SampleSet | np.ndarray | Mapping[str, float]


class MetricReport(BaseModel):
    approx_ratio: float | None = Field(description="Indefinida sem amostras dentro da restrição")
    degenerate: bool = Field(default=False, description="f_max == f_min; razão reportada como 1")
    icp: float
    f_observed: float | None
    hamming_hist: dict[int, float]


class RandomBaseline(BaseModel):
    icp: float = Field(description="Probabilidade de restrição de uma bitstring uniforme")
    approx_ratio_in_constraint: float
    hamming_hist: dict[int, float]


def masses(dist: Distribution) -> tuple[np.ndarray, np.ndarray, int]:
    """(índices, massas normalizadas, n) de uma distribuição."""
    if isinstance(dist, SampleSet):
        indices = np.array([bitstring_to_index(b) for b in dist.counts], dtype=np.int64)
        mass = np.array(list(dist.counts.values()), dtype=float) / dist.shots
        return indices, mass, dist.n_qubits
    if isinstance(dist, Mapping):
        if not dist:
            raise EmptyInput("Distribuição vazia.")
        n = len(next(iter(dist)))
        indices = np.array([bitstring_to_index(b) for b in dist], dtype=np.int64)
        mass = np.array(list(dist.values()), dtype=float)
        return indices, mass / mass.sum(), n
    probs = np.asarray(dist, dtype=float)
    n = probs.size.bit_length() - 1
    return np.arange(probs.size, dtype=np.int64), probs / probs.sum(), n


def popcount(indices: np.ndarray, n: int) -> np.ndarray:
    weights = np.zeros(indices.shape, dtype=np.int64)
    for k in range(n):
        weights += (indices >> k) & 1
    return weights


def approximation_ratio(f_observed: float, f_min: float, f_max: float) -> float:
    if math.isclose(f_max, f_min, rel_tol=0.0, abs_tol=1e-12):
        raise DegenerateRange(f"f_max == f_min == {f_max}: todas as soluções viáveis empatam.")
    return (f_observed - f_min) / (f_max - f_min)


def in_constraint_probability(dist: Distribution, m: int) -> float:
    return hamming_distance_distribution(dist, m).get(0, 0.0)


def mean_in_constraint_objective(dist: Distribution, instance: ProblemInstance) -> float | None:
    indices, mass, n = masses(dist)
    feasible = popcount(indices, n) == instance.m
    total = mass[feasible].sum()
    if total <= 0.0:
        return None
    values = objective_table(instance, "raw")[indices[feasible]]
    return float(mass[feasible] @ values / total)


def hamming_distance_distribution(dist: Distribution, m: int) -> dict[int, float]:
    """Massa por distância |wt(x) - m|; só distâncias com massa positiva aparecem."""
    indices, mass, n = masses(dist)
    distance = np.abs(popcount(indices, n) - m)
    hist = np.bincount(distance, weights=mass, minlength=max(m, n - m) + 1)
    return {d: float(p) for d, p in enumerate(hist) if p > 0.0}


def random_hamming_baseline(n: int, m: int) -> dict[int, float]:
    hist: dict[int, float] = {}
    for w in range(n + 1):
        d = abs(w - m)
        hist[d] = hist.get(d, 0.0) + math.comb(n, w) / 2**n
    return dict(sorted(hist.items()))


def evaluate(dist: Distribution, instance: ProblemInstance, oracle: OracleResult) -> MetricReport:
    f_observed = mean_in_constraint_objective(dist, instance)
    approx_ratio, degenerate = None, False
    if f_observed is not None:
        try:
            approx_ratio = approximation_ratio(f_observed, oracle.f_min, oracle.f_max)
        except DegenerateRange:
            approx_ratio, degenerate = 1.0, True
    return MetricReport(
        approx_ratio=approx_ratio,
        degenerate=degenerate,
        icp=in_constraint_probability(dist, instance.m),
        f_observed=f_observed,
        hamming_hist=hamming_distance_distribution(dist, instance.m),
    )


def random_metrics(instance: ProblemInstance, oracle: OracleResult) -> RandomBaseline:
    """Referências "Random" (todas as bitstrings) e "Random in-constraint"."""
    try:
        ar = approximation_ratio(oracle.mean_feasible, oracle.f_min, oracle.f_max)
    except DegenerateRange:
        ar = 1.0
    return RandomBaseline(
        icp=math.comb(instance.n, instance.m) / 2**instance.n,
        approx_ratio_in_constraint=ar,
        hamming_hist=random_hamming_baseline(instance.n, instance.m),
    )
