"""
Circuitos QAOA, XY-QAOA (com preparação de estado de Dicke) e L-VQE, e a
contagem de portas de dois qubits.
"""

import math
from enum import Enum
from typing import Literal

import numpy as np
from core.errors import InfeasibleConstraint, ParamMismatch
from core.problem import ObjectiveKind, ProblemInstance
from core.simulator import Circuit, Gate, GateKind
from pydantic import BaseModel, Field

MixerTopology = Literal["path", "ring"]
Convention = Literal["native-2q", "cnot-decomposed"]


class Algorithm(str, Enum):
    QAOA = "qaoa"
    XY_QAOA = "xy-qaoa"
    LVQE = "lvqe"


class AnsatzParams(BaseModel):
    kind: Algorithm
    p: int = Field(ge=1, description="Número de camadas")
    gammas: list[float] = Field(default_factory=list)
    betas: list[float] = Field(default_factory=list)
    thetas: list[float] = Field(default_factory=list)

    def to_vector(self) -> np.ndarray:
        if self.kind is Algorithm.LVQE:
            return np.array(self.thetas, dtype=float)
        return np.array(self.gammas + self.betas, dtype=float)

    @classmethod
    def from_vector(cls, kind: Algorithm, p: int, vector: np.ndarray) -> "AnsatzParams":
        values = [float(v) for v in vector]
        if kind is Algorithm.LVQE:
            return cls(kind=kind, p=p, thetas=values)
        if len(values) != 2 * p:
            raise ParamMismatch(f"Esperados {2 * p} parâmetros, recebidos {len(values)}.")
        return cls(kind=kind, p=p, gammas=values[:p], betas=values[p:])


class GateStats(BaseModel):
    two_qubit_count: int
    two_qubit_depth: int
    convention: Convention


# Contagens publicadas (após otimização com transpilador), apenas para referência.
REFERENCE_GATE_COUNTS = {
    ("lvqe", 14): {"initial": (0, 0), "full": (4, 26)},
    ("lvqe", 20): {"initial": (0, 0), "full": (8, 76)},
    ("qaoa", 14): {"initial": (0, 0), "full": (50, 182)},
    ("qaoa", 20): {"initial": (0, 0), "full": (74, 380)},
    ("xy-qaoa", 14): {"initial": (68, 185), "full": (114, 393)},
    ("xy-qaoa", 20): {"initial": (95, 347), "full": (159, 765)},
}


def reference_gate_counts(algorithm: Algorithm, n: int) -> dict[str, tuple[int, int]] | None:
    """(profundidade 2Q, contagem 2Q) publicadas para o algoritmo e tamanho, se existirem."""
    return REFERENCE_GATE_COUNTS.get((algorithm.value, n))


def lvqe_param_count(n: int, p: int) -> int:
    return n + 4 * p * (n - 1)


def _check_layers(params: AnsatzParams, kind: Algorithm) -> None:
    if params.kind is not kind:
        raise ParamMismatch(f"Parâmetros de {params.kind.value} para circuito {kind.value}.")
    if len(params.gammas) != params.p or len(params.betas) != params.p:
        raise ParamMismatch(
            f"Esperados {params.p} gammas e betas, recebidos {len(params.gammas)} e {len(params.betas)}."
        )


def _phase(instance: ProblemInstance, angle: float, objective: ObjectiveKind) -> Gate:
    return Gate(
        GateKind.PHASE, tuple(range(instance.n)), angle, terms=instance.terms(objective)
    )


def build_qaoa(
    instance: ProblemInstance, params: AnsatzParams, objective: ObjectiveKind = "penalized"
) -> Circuit:
    """H em todos os qubits e, por camada, fase com gamma_j e RX(2 beta_j) em cada qubit."""
    _check_layers(params, Algorithm.QAOA)
    n = instance.n
    gates = [Gate(GateKind.H, (q,)) for q in range(n)]
    for gamma, beta in zip(params.gammas, params.betas):
        gates.append(_phase(instance, gamma, objective))
        gates.extend(Gate(GateKind.RX, (q,), 2.0 * beta) for q in range(n))
    return Circuit(n, tuple(gates))


def _cry(theta: float, control: int, target: int) -> list[Gate]:
    return [
        Gate(GateKind.RY, (target,), theta / 2),
        Gate(GateKind.CNOT, (control, target)),
        Gate(GateKind.RY, (target,), -theta / 2),
        Gate(GateKind.CNOT, (control, target)),
    ]


def _ccry(theta: float, c1: int, c2: int, target: int) -> list[Gate]:
    return (
        _cry(theta / 2, c2, target)
        + [Gate(GateKind.CNOT, (c1, c2))]
        + _cry(-theta / 2, c2, target)
        + [Gate(GateKind.CNOT, (c1, c2))]
        + _cry(theta / 2, c1, target)
    )


def _split_cyclic_shift(high: int, low: int) -> list[Gate]:
    gates = []
    for index in (high - i for i in range(low)):
        theta = 2 * math.acos(math.sqrt((high - index + 1) / high))
        if index == high:
            body = _cry(theta, high - 1, high - 2)
        else:
            body = _ccry(theta, high - 1, index - 1, index - 2)
        gates.append(Gate(GateKind.CNOT, (index - 2, high - 1)))
        gates.extend(body)
        gates.append(Gate(GateKind.CNOT, (index - 2, high - 1)))
    return gates


def build_dicke(n: int, m: int) -> Circuit:
    """
    Prepara |D^n_m> a partir de |0...0> com a construção determinística por
    split-and-cyclic-shift: os m últimos qubits começam em |1> e cada bloco
    redistribui a excitação com rotações RY controladas.
    """
    if not 0 < m < n:
        raise InfeasibleConstraint(f"Estado de Dicke inviável: m={m}, n={n}.")
    gates = [Gate(GateKind.RY, (q,), math.pi) for q in range(n - m, n)]
    for high in range(n, m, -1):
        gates.extend(_split_cyclic_shift(high, m))
    for high in range(m, 1, -1):
        gates.extend(_split_cyclic_shift(high, high - 1))
    return Circuit(n, tuple(gates))


def mixer_pairs(n: int, topology: MixerTopology = "path") -> list[tuple[int, int]]:
    pairs = [(k, k + 1) for k in range(n - 1)]
    if topology == "ring" and n > 2:
        pairs.append((n - 1, 0))
    return pairs


def build_xy_qaoa(
    instance: ProblemInstance,
    params: AnsatzParams,
    topology: MixerTopology = "path",
    objective: ObjectiveKind = "raw",
) -> Circuit:
    _check_layers(params, Algorithm.XY_QAOA)
    gates = list(build_dicke(instance.n, instance.m).gates)
    for gamma, beta in zip(params.gammas, params.betas):
        gates.append(_phase(instance, gamma, objective))
        gates.extend(
            Gate(GateKind.RXXplusYY, pair, beta) for pair in mixer_pairs(instance.n, topology)
        )
    return Circuit(instance.n, tuple(gates))


def _brickwork_pairs(n: int) -> list[tuple[int, int]]:
    even = [(k, k + 1) for k in range(0, n - 1, 2)]
    odd = [(k, k + 1) for k in range(1, n - 1, 2)]
    return even + odd


def build_lvqe(n: int, p: int, thetas: list[float] | np.ndarray) -> Circuit:
    """
    V(theta_0) com RY em cada qubit, seguido de p camadas em tijolo (pares pares,
    depois ímpares). Cada bloco de par: RY nos dois qubits, CNOT, RY nos dois, CNOT.
    """
    thetas = [float(t) for t in thetas]
    expected = lvqe_param_count(n, p)
    if len(thetas) != expected:
        raise ParamMismatch(f"L-VQE com n={n}, p={p} exige {expected} ângulos, recebidos {len(thetas)}.")
    angles = iter(thetas)
    gates = [Gate(GateKind.RY, (q,), next(angles)) for q in range(n)]
    for _ in range(p):
        for k, l in _brickwork_pairs(n):
            gates += [
                Gate(GateKind.RY, (k,), next(angles)),
                Gate(GateKind.RY, (l,), next(angles)),
                Gate(GateKind.CNOT, (k, l)),
                Gate(GateKind.RY, (k,), next(angles)),
                Gate(GateKind.RY, (l,), next(angles)),
                Gate(GateKind.CNOT, (k, l)),
            ]
    return Circuit(n, tuple(gates))


def build_circuit(
    instance: ProblemInstance,
    params: AnsatzParams,
    topology: MixerTopology = "path",
    objective: ObjectiveKind | None = None,
) -> Circuit:
    match params.kind:
        case Algorithm.QAOA:
            return build_qaoa(instance, params, objective or "penalized")
        case Algorithm.XY_QAOA:
            return build_xy_qaoa(instance, params, topology, objective or "raw")
        case Algorithm.LVQE:
            return build_lvqe(instance.n, params.p, params.thetas)


def gate_stats(circuit: Circuit, convention: Convention = "cnot-decomposed") -> GateStats:
    """
    Contagem e profundidade de portas de dois qubits.

    O operador de fase conta pela sua decomposição RZ/RZZ. Em `cnot-decomposed`,
    RZZ e RXXplusYY valem 2 portas nativas cada. A profundidade usa camadas gulosas.
    """
    level: dict[int, int] = {}
    count = 0
    for gate in circuit.expanded().gates:
        if len(gate.qubits) != 2:
            continue
        cost = 2 if convention == "cnot-decomposed" and gate.kind is not GateKind.CNOT else 1
        count += cost
        start = max(level.get(q, 0) for q in gate.qubits)
        for q in gate.qubits:
            level[q] = start + cost
    return GateStats(
        two_qubit_count=count,
        two_qubit_depth=max(level.values(), default=0),
        convention=convention,
    )
