"""
Simulação exata em statevector denso, amostragem de medidas e ruído de Pauli
estocástico por trajetórias.

O qubit 0 é o bit menos significativo do índice da base; bitstrings são
impressas com o qubit 0 primeiro.
"""

from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from itertools import groupby
from typing import Callable, Iterable, Sequence

import numpy as np
from config.logs import logger
from config.settings import settings
from core.errors import DimensionMismatch, IndexOutOfRange, ParseError, TooManyQubits
from core.problem import DiagonalTerms, index_to_bitstring
from pydantic import BaseModel, Field, model_validator


class GateKind(str, Enum):
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    H = "H"
    CNOT = "CNOT"
    RZZ = "RZZ"
    RXXplusYY = "RXXplusYY"
    PHASE = "PHASE"


ONE_QUBIT = {GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.H}
TWO_QUBIT = {GateKind.CNOT, GateKind.RZZ, GateKind.RXXplusYY}
PARAMETRIC = {GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.RZZ, GateKind.RXXplusYY}


@dataclass(frozen=True, eq=False)
class Gate:
    """
    Uma porta do circuito.

    PHASE é o operador de fase exp(-i * angle * f) aplicado como diagonal exata;
    `terms` descreve f.
    """

    kind: GateKind
    qubits: tuple[int, ...]
    angle: float | None = None
    terms: DiagonalTerms | None = None


@dataclass(frozen=True, eq=False)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...]

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise DimensionMismatch("Circuitos com números de qubits diferentes.")
        return Circuit(self.n_qubits, self.gates + other.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def expanded(self) -> "Circuit":
        """Circuito equivalente com cada PHASE trocado por sua decomposição RZ/RZZ."""
        gates: list[Gate] = []
        for gate in self.gates:
            if gate.kind is GateKind.PHASE:
                gates.extend(phase_decomposition(gate.terms, gate.angle))
            else:
                gates.append(gate)
        return Circuit(self.n_qubits, tuple(gates))


class Statevector:
    def __init__(self, amplitudes: np.ndarray) -> None:
        n = int(amplitudes.size).bit_length() - 1
        if amplitudes.ndim != 1 or 1 << n != amplitudes.size:
            raise DimensionMismatch("O vetor de estado precisa ter 2^n amplitudes.")
        self.n_qubits = n
        self.amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)

    def copy(self) -> "Statevector":
        return Statevector(self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


class NoiseModel(BaseModel):
    p1: float = Field(default=0.0, ge=0.0, le=1.0, description="Despolarizante de 1 qubit")
    p2: float = Field(default=0.0, ge=0.0, le=1.0, description="Despolarizante de 2 qubits")
    p_spam: float = Field(default=0.0, ge=0.0, le=1.0, description="Inversão de bit na leitura")

    @classmethod
    def h1(cls) -> "NoiseModel":
        return cls(p1=settings.NOISE_P1, p2=settings.NOISE_P2, p_spam=settings.NOISE_PSPAM)

    @property
    def is_noiseless(self) -> bool:
        return self.p1 == 0.0 and self.p2 == 0.0 and self.p_spam == 0.0


class SampleSet(BaseModel):
    n_qubits: int
    shots: int
    counts: dict[str, int]

    @model_validator(mode="after")
    def validate_counts(self) -> "SampleSet":
        if self.shots <= 0 or sum(self.counts.values()) != self.shots:
            raise ValueError("A soma das contagens deve ser igual a 'shots' > 0.")
        if any(len(bits) != self.n_qubits for bits in self.counts):
            raise ValueError("Bitstrings com tamanho diferente de 'n_qubits'.")
        return self

    @classmethod
    def from_indices(cls, n_qubits: int, indices: Iterable[int]) -> "SampleSet":
        tally = Counter(int(i) for i in indices)
        counts = {index_to_bitstring(i, n_qubits): tally[i] for i in sorted(tally)}
        return cls(n_qubits=n_qubits, shots=sum(tally.values()), counts=counts)


_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_ONE_QUBIT_ERRORS = ("X", "Y", "Z")
_TWO_QUBIT_ERRORS = tuple(a + b for a in "IXYZ" for b in "IXYZ" if a + b != "II")


def gate_matrix(gate: Gate) -> np.ndarray:
    """Matriz unitária da porta; em portas de 2 qubits a base é 2*b(q0) + b(q1)."""
    theta = gate.angle
    match gate.kind:
        case GateKind.H:
            return _H
        case GateKind.RX:
            c, s = np.cos(theta / 2), np.sin(theta / 2)
            return np.array([[c, -1j * s], [-1j * s, c]])
        case GateKind.RY:
            c, s = np.cos(theta / 2), np.sin(theta / 2)
            return np.array([[c, -s], [s, c]], dtype=complex)
        case GateKind.RZ:
            return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
        case GateKind.CNOT:
            return np.array(
                [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
            )
        case GateKind.RZZ:
            a, b = np.exp(-0.5j * theta), np.exp(0.5j * theta)
            return np.diag([a, b, b, a])
        case GateKind.RXXplusYY:
            c, s = np.cos(theta), np.sin(theta)
            return np.array(
                [[1, 0, 0, 0], [0, c, -1j * s, 0], [0, -1j * s, c, 0], [0, 0, 0, 1]]
            )
    raise ValueError(f"Porta sem matriz: {gate.kind}")


def _apply_1q(psi: np.ndarray, n: int, u: np.ndarray, q: int) -> None:
    view = psi.reshape(1 << (n - 1 - q), 2, 1 << q)
    a, b = view[:, 0, :].copy(), view[:, 1, :].copy()
    view[:, 0, :] = u[0, 0] * a + u[0, 1] * b
    view[:, 1, :] = u[1, 0] * a + u[1, 1] * b


def _apply_2q(psi: np.ndarray, n: int, u: np.ndarray, q0: int, q1: int) -> None:
    low, high = sorted((q0, q1))
    view = psi.reshape(1 << (n - 1 - high), 2, 1 << (high - low - 1), 2, 1 << low)

    def axes(b0: int, b1: int) -> tuple[int, int]:
        return (b0, b1) if q0 == high else (b1, b0)

    basis = [(b0, b1) for b0 in (0, 1) for b1 in (0, 1)]
    blocks = []
    for b0, b1 in basis:
        bh, bl = axes(b0, b1)
        blocks.append(view[:, bh, :, bl, :].copy())
    for k, (b0, b1) in enumerate(basis):
        bh, bl = axes(b0, b1)
        view[:, bh, :, bl, :] = sum(u[k, l] * blocks[l] for l in range(4) if u[k, l] != 0)


def _check_qubits(state: Statevector, qubits: Sequence[int]) -> None:
    if any(not 0 <= q < state.n_qubits for q in qubits):
        raise IndexOutOfRange(f"Qubits {qubits} fora do intervalo [0, {state.n_qubits}).")
    if len(set(qubits)) != len(qubits):
        raise IndexOutOfRange(f"Qubits repetidos na porta: {qubits}.")


def init_zero(n: int) -> Statevector:
    if not 1 <= n <= settings.MAX_QUBITS:
        raise TooManyQubits(f"Simulação suporta de 1 a {settings.MAX_QUBITS} qubits, recebido {n}.")
    amplitudes = np.zeros(1 << n, dtype=np.complex128)
    amplitudes[0] = 1.0
    return Statevector(amplitudes)


def apply(state: Statevector, gate: Gate) -> Statevector:
    """Aplica a porta no próprio estado e o retorna."""
    if gate.kind is GateKind.PHASE:
        return apply_phase_operator(state, gate.terms, gate.angle)
    _check_qubits(state, gate.qubits)
    u = gate_matrix(gate)
    if len(gate.qubits) == 1:
        _apply_1q(state.amplitudes, state.n_qubits, u, gate.qubits[0])
    else:
        _apply_2q(state.amplitudes, state.n_qubits, u, *gate.qubits)
    return state


def apply_pauli(state: Statevector, label: str, qubits: Sequence[int]) -> Statevector:
    for p, q in zip(label, qubits):
        if p != "I":
            _apply_1q(state.amplitudes, state.n_qubits, _PAULI[p], q)
    return state


def apply_phase_operator(
    state: Statevector, coeffs: DiagonalTerms | np.ndarray, gamma_angle: float
) -> Statevector:
    """Multiplica a amplitude de |x> por exp(-i * gamma_angle * f(x))."""
    table = coeffs.table if isinstance(coeffs, DiagonalTerms) else np.asarray(coeffs)
    if table.shape != state.amplitudes.shape:
        raise DimensionMismatch(
            f"Objetivo com {table.size} entradas para estado de {state.n_qubits} qubits."
        )
    state.amplitudes *= np.exp(-1j * gamma_angle * table)
    return state


def simulate(circuit: Circuit) -> Statevector:
    state = init_zero(circuit.n_qubits)
    for gate in circuit.gates:
        apply(state, gate)
    return state


def diagonal_values(
    n: int, f: DiagonalTerms | np.ndarray | Callable[[str], float]
) -> np.ndarray:
    if isinstance(f, DiagonalTerms):
        return f.table
    if callable(f):
        return np.fromiter(
            (f(index_to_bitstring(x, n)) for x in range(1 << n)), dtype=float, count=1 << n
        )
    return np.asarray(f, dtype=float)


def expectation_diagonal(
    state: Statevector, f: DiagonalTerms | np.ndarray | Callable[[str], float]
) -> float:
    values = diagonal_values(state.n_qubits, f)
    return float(state.probabilities() @ values)


def sample(state: Statevector, shots: int, seed: int) -> SampleSet:
    if shots < 1:
        raise ValueError("'shots' deve ser >= 1.")
    probs = state.probabilities()
    probs = probs / probs.sum()
    counts = np.random.default_rng(seed).multinomial(shots, probs)
    nonzero = np.flatnonzero(counts)
    return SampleSet(
        n_qubits=state.n_qubits,
        shots=shots,
        counts={index_to_bitstring(int(i), state.n_qubits): int(counts[i]) for i in nonzero},
    )


def phase_decomposition(terms: DiagonalTerms, gamma_angle: float) -> list[Gate]:
    """
    RZZ/RZ equivalentes a exp(-i * gamma_angle * f), a menos de fase global.

    Com x_i = (1 - Z_i) / 2: o par {i, j} contribui J_ij/2 * Z_i Z_j e cada
    qubit fica com -h_i/2 - sum_j J_ij/2 em Z_i. Coeficientes nulos não geram porta.
    """
    n = terms.n
    gates = []
    for i in range(n):
        for j in range(i + 1, n):
            c = terms.pairs[i, j] / 2.0
            if c != 0.0:
                gates.append(Gate(GateKind.RZZ, (i, j), 2.0 * gamma_angle * c))
    for i in range(n):
        a = -terms.linear[i] / 2.0 - terms.pairs[i].sum() / 2.0 + terms.pairs[i, i] / 2.0
        if a != 0.0:
            gates.append(Gate(GateKind.RZ, (i,), 2.0 * gamma_angle * a))
    return gates


ErrorPattern = tuple[tuple[int, str], ...]


def _trajectory_events(
    gates: Sequence[Gate], noise: NoiseModel, rng: np.random.Generator
) -> ErrorPattern:
    rates = np.array([noise.p1 if len(g.qubits) == 1 else noise.p2 for g in gates])
    hits = np.flatnonzero(rng.random(len(gates)) < rates)
    events = []
    for pos in hits:
        choices = _ONE_QUBIT_ERRORS if len(gates[pos].qubits) == 1 else _TWO_QUBIT_ERRORS
        events.append((int(pos), choices[int(rng.integers(len(choices)))]))
    return tuple(events)


def _advance(state: Statevector, gates: Sequence[Gate], start: int, stop: int) -> int:
    for gate in gates[start:stop]:
        apply(state, gate)
    return stop


def _walk_patterns(
    gates: Sequence[Gate],
    state: Statevector,
    position: int,
    depth: int,
    patterns: Sequence[ErrorPattern],
    finish: Callable[[ErrorPattern, Statevector], None],
) -> None:
    """
    Percorre a árvore de prefixos dos padrões de erro em profundidade.

    `patterns` está ordenado e todos compartilham os `depth` primeiros eventos, já
    aplicados em `state` até a porta `position`. Cada porta antes de um ponto de
    ramificação é aplicada uma única vez para todo o grupo.
    """
    ending = [p for p in patterns if len(p) == depth]
    branching = [p for p in patterns if len(p) > depth]
    for (pos, label), group in groupby(branching, key=lambda p: p[depth]):
        position = _advance(state, gates, position, pos + 1)
        child = apply_pauli(state.copy(), label, gates[pos].qubits)
        _walk_patterns(gates, child, position, depth + 1, list(group), finish)
    if ending:
        _advance(state, gates, position, len(gates))
        for pattern in ending:
            finish(pattern, state)


def run_noisy(
    circuit: Circuit,
    noise: NoiseModel,
    shots: int,
    seed: int,
    workers: int = 1,
) -> SampleSet:
    """
    Amostragem ruidosa pelo método de trajetórias.

    Cada trajetória t usa o gerador derivado de (seed, t): sorteia Paulis após as
    portas, depois o resultado da medida e por fim as inversões de leitura. Padrões
    de erro idênticos são simulados uma única vez e padrões com o mesmo prefixo
    compartilham o estado até o primeiro evento em que divergem.
    """
    if noise.is_noiseless:
        return sample(simulate(circuit), shots, seed)
    if shots < 1:
        raise ValueError("'shots' deve ser >= 1.")
    gates = circuit.expanded().gates
    n = circuit.n_qubits
    draws: dict[ErrorPattern, list[tuple[int, float, int]]] = defaultdict(list)
    for t in range(shots):
        rng = np.random.default_rng([seed, t])
        events = _trajectory_events(gates, noise, rng)
        u = rng.random()
        flips = rng.random(n) < noise.p_spam
        mask = int(sum(1 << q for q in np.flatnonzero(flips)))
        draws[events].append((t, u, mask))

    patterns = sorted(draws)
    logger.info(
        f"Ruído por trajetórias: {shots} trajetórias, {len(patterns)} padrões de erro distintos."
    )
    last = (1 << n) - 1
    outcomes = np.empty(shots, dtype=np.int64)

    def finish(pattern: ErrorPattern, state: Statevector) -> None:
        cdf = np.cumsum(state.probabilities())
        cdf /= cdf[-1]
        for t, u, mask in draws[pattern]:
            outcomes[t] = min(int(np.searchsorted(cdf, u, side="right")), last) ^ mask

    bounds = np.linspace(0, len(patterns), min(max(1, workers), len(patterns)) + 1).astype(int)
    chunks = [patterns[a:b] for a, b in zip(bounds, bounds[1:])]
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        futures = [
            pool.submit(_walk_patterns, gates, init_zero(n), 0, 0, chunk, finish) for chunk in chunks
        ]
        for future in futures:
            future.result()
    return SampleSet.from_indices(n, outcomes.tolist())


def dump_circuit(circuit: Circuit) -> str:
    """Formato textual, uma porta por linha: `KIND q0[,q1][,angle]`."""
    lines = [f"# n_qubits={circuit.n_qubits}"]
    for gate in circuit.expanded().gates:
        fields = [str(q) for q in gate.qubits]
        if gate.angle is not None:
            fields.append(repr(float(gate.angle)))
        lines.append(f"{gate.kind.value} {','.join(fields)}")
    return "\n".join(lines) + "\n"


def parse_circuit(text: str, n_qubits: int | None = None) -> Circuit:
    gates = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# n_qubits=") and n_qubits is None:
                n_qubits = int(line.split("=", 1)[1])
            continue
        try:
            name, args = line.split(maxsplit=1)
            kind = GateKind(name)
            fields = args.split(",")
            arity = 1 if kind in ONE_QUBIT else 2
            qubits = tuple(int(f) for f in fields[:arity])
            angle = float(fields[arity]) if kind in PARAMETRIC else None
        except (ValueError, IndexError) as e:
            raise ParseError(f"linha {lineno}: porta inválida '{line}' ({e}).") from e
        if kind is GateKind.PHASE or len(fields) != arity + (kind in PARAMETRIC):
            raise ParseError(f"linha {lineno}: porta inválida '{line}'.")
        gates.append(Gate(kind, qubits, angle))
    if n_qubits is None:
        raise ParseError("Número de qubits ausente no circuito.")
    return Circuit(n_qubits, tuple(gates))
