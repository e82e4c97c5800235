"""
Formulação do problema de sumarização extrativa como otimização binária com
restrição de cardinalidade, sua versão penalizada e oráculos por força bruta.

Convenção: somas sobre i != j percorrem pares ordenados (as duas orientações).
Bitstrings são impressas com o qubit 0 primeiro; o qubit i é o bit i do índice.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Literal, Sequence

import numpy as np
from config.logs import logger
from config.settings import settings
from core.errors import (
    DimensionMismatch,
    InfeasibleConstraint,
    InvalidMatrix,
    LengthMismatch,
    TooLarge,
)
from pydantic import BaseModel, Field, model_validator

ObjectiveKind = Literal["raw", "penalized"]


def index_to_bitstring(index: int, n: int) -> str:
    return "".join(str((index >> k) & 1) for k in range(n))


def bitstring_to_index(bits: str) -> int:
    return sum(1 << k for k, c in enumerate(bits) if c == "1")


def _subset_sums(weights: np.ndarray) -> np.ndarray:
    """Tabela t[x] = sum_k weights[k] * bit_k(x), construída por duplicação."""
    table = np.zeros(1)
    for w in weights:
        table = np.concatenate([table, table + w])
    return table


@dataclass(frozen=True, eq=False)
class DiagonalTerms:
    """
    f(x) = constant + sum_i linear[i] x_i + sum_{i != j} pairs[i, j] x_i x_j.

    `table` avalia f em todas as 2^n bases computacionais (qubit i = bit i do índice).
    """

    linear: np.ndarray
    pairs: np.ndarray
    constant: float = 0.0

    @property
    def n(self) -> int:
        return self.linear.shape[0]

    @cached_property
    def table(self) -> np.ndarray:
        table = np.full(1, self.constant, dtype=float)
        for k in range(self.n):
            coupling = _subset_sums(2.0 * self.pairs[k, :k])
            table = np.concatenate([table, table + self.linear[k] + coupling])
        return table

    def evaluate(self, x: Sequence[int]) -> float:
        bits = np.asarray(x, dtype=float)
        return float(self.constant + self.linear @ bits + bits @ self.pairs @ bits)


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    n: int
    m: int
    mu: np.ndarray
    beta: np.ndarray
    lam: float
    gamma: float

    @cached_property
    def weights(self) -> np.ndarray:
        """Peso de Hamming de cada índice de base."""
        return _subset_sums(np.ones(self.n)).astype(np.int64)

    @cached_property
    def feasible_indices(self) -> np.ndarray:
        return np.flatnonzero(self.weights == self.m)

    @cached_property
    def raw_terms(self) -> DiagonalTerms:
        return DiagonalTerms(linear=self.mu, pairs=-self.lam * self.beta)

    @cached_property
    def penalized_terms(self) -> DiagonalTerms:
        coeffs = penalized_coefficients(self)
        return DiagonalTerms(
            linear=coeffs.linear,
            pairs=-coeffs.quadratic,
            constant=-self.gamma * self.m**2,
        )

    def terms(self, kind: ObjectiveKind) -> DiagonalTerms:
        return self.raw_terms if kind == "raw" else self.penalized_terms


@dataclass(frozen=True, eq=False)
class PenalizedCoefficients:
    linear: np.ndarray
    quadratic: np.ndarray


class OracleResult(BaseModel):
    f_min: float
    f_max: float
    argmax: str
    feasible_count: int
    mean_feasible: float


class ProblemFile(BaseModel):
    """Esquema JSON do arquivo de problema."""

    schema_version: str = Field(default_factory=lambda: settings.SCHEMA_VERSION)
    n: int = Field(description="Número de sentenças (qubits)")
    m: int = Field(description="Tamanho exigido do resumo")
    lambda_: float = Field(alias="lambda", description="Peso de redundância")
    gamma: float | None = Field(default=None, description="Peso da penalidade; regra padrão se ausente")
    mu: list[float]
    beta: list[list[float]]
    sentences: list[str] | None = Field(default=None, description="Sentenças originais, quando ingeridas de um artigo")
    fallback_rows: list[int] = Field(default_factory=list)

    model_config = {"populate_by_name": True}

    @model_validator(mode="after")
    def validate_shapes(self) -> "ProblemFile":
        if len(self.mu) != self.n:
            raise ValueError(f"'mu' tem {len(self.mu)} entradas, esperado {self.n}.")
        if len(self.beta) != self.n or any(len(row) != self.n for row in self.beta):
            raise ValueError(f"'beta' deve ser uma matriz {self.n}x{self.n}.")
        return self

    def to_instance(self) -> ProblemInstance:
        return build_instance(
            np.array(self.mu), np.array(self.beta), self.lambda_, self.m, gamma=self.gamma
        )

    @classmethod
    def from_instance(cls, instance: ProblemInstance, **extra) -> "ProblemFile":
        return cls(
            n=instance.n,
            m=instance.m,
            lambda_=instance.lam,
            gamma=instance.gamma,
            mu=instance.mu.tolist(),
            beta=instance.beta.tolist(),
            **extra,
        )


def build_instance(
    mu: np.ndarray,
    beta: np.ndarray,
    lam: float,
    m: int,
    gamma: float | None = None,
) -> ProblemInstance:
    """
    Monta a instância do problema e calcula Γ pela regra padrão, a menos que seja informado.

    Args:
        mu (np.ndarray): Centralidades, tamanho n.
        beta (np.ndarray): Similaridades, n x n, simétrica com diagonal zero.
        lam (float): Peso de redundância.
        m (int): Número de sentenças do resumo.
        gamma (float | None): Peso da penalidade; None aplica `gamma_rule`.
    """
    mu = np.asarray(mu, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if mu.ndim != 1:
        raise DimensionMismatch("'mu' deve ser um vetor.")
    n = mu.shape[0]
    if beta.shape != (n, n):
        raise DimensionMismatch(f"'beta' tem forma {beta.shape}, esperado {(n, n)}.")
    if not np.allclose(beta, beta.T, atol=1e-12):
        raise InvalidMatrix("'beta' precisa ser simétrica.")
    if np.any(np.diag(beta) != 0.0):
        raise InvalidMatrix("'beta' precisa ter diagonal zero.")
    if not 0 < m < n:
        raise InfeasibleConstraint(f"Restrição inviável: m={m} com n={n}.")
    if lam < 0:
        raise DimensionMismatch("'lambda' deve ser não negativo.")
    instance = ProblemInstance(n=n, m=m, mu=mu, beta=beta, lam=float(lam), gamma=0.0)
    if gamma is None:
        gamma = gamma_rule(instance)
    elif gamma < 0:
        raise DimensionMismatch("'gamma' deve ser não negativo.")
    return ProblemInstance(n=n, m=m, mu=mu, beta=beta, lam=float(lam), gamma=float(gamma))


def gamma_rule(instance: ProblemInstance) -> float:
    return float(instance.mu.sum() + instance.lam * instance.beta.sum())


def _check_length(instance: ProblemInstance, x: Sequence[int]) -> np.ndarray:
    bits = np.asarray([int(b) for b in x], dtype=float)
    if bits.shape != (instance.n,):
        raise LengthMismatch(f"Bitstring com {bits.size} bits para n={instance.n}.")
    return bits


def objective_raw(instance: ProblemInstance, x: Sequence[int]) -> float:
    bits = _check_length(instance, x)
    return float(instance.mu @ bits - instance.lam * (bits @ instance.beta @ bits))


def objective_penalized(instance: ProblemInstance, x: Sequence[int]) -> float:
    bits = _check_length(instance, x)
    violation = bits.sum() - instance.m
    return objective_raw(instance, x) - instance.gamma * violation**2


def penalized_coefficients(instance: ProblemInstance) -> PenalizedCoefficients:
    g, m = instance.gamma, instance.m
    linear = instance.mu + 2.0 * g * m - g
    quadratic = instance.lam * instance.beta + g
    np.fill_diagonal(quadratic, 0.0)
    return PenalizedCoefficients(linear=linear, quadratic=quadratic)


def objective_table(instance: ProblemInstance, kind: ObjectiveKind = "raw") -> np.ndarray:
    return instance.terms(kind).table


def brute_force(instance: ProblemInstance) -> OracleResult:
    """
    Enumera todas as bitstrings de peso m.

    Empates no argmax ficam com a menor bitstring em ordem lexicográfica (qubit 0 primeiro).
    """
    if instance.n > settings.BRUTE_FORCE_MAX_QUBITS:
        raise TooLarge(
            f"Força bruta limitada a {settings.BRUTE_FORCE_MAX_QUBITS} qubits, recebido {instance.n}."
        )
    feasible = instance.feasible_indices
    values = objective_table(instance, "raw")[feasible]
    f_max = float(values.max())
    ties = feasible[values == values.max()]
    argmax = min(index_to_bitstring(int(i), instance.n) for i in ties)
    result = OracleResult(
        f_min=float(values.min()),
        f_max=f_max,
        argmax=argmax,
        feasible_count=math.comb(instance.n, instance.m),
        mean_feasible=float(values.mean()),
    )
    logger.info(
        f"Força bruta: {result.feasible_count} soluções viáveis, f_max={f_max:.6f}."
    )
    return result


def random_baseline(instance: ProblemInstance) -> float:
    return brute_force(instance).mean_feasible
