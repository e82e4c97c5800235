"""
Busca de parâmetros: grade do QAOA com fronteira de Pareto e seleção por
limiar de ICP, e otimização local COBYLA com múltiplos pontos iniciais.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Literal, NamedTuple, Sequence

import numpy as np
from config.logs import logger
from config.settings import settings
from core import metrics
from core.ansatz import Algorithm, AnsatzParams, MixerTopology, build_circuit, build_qaoa, lvqe_param_count
from core.errors import EmptyInput, NoFeasiblePoint, ParseError
from core.problem import ObjectiveKind, OracleResult, ProblemInstance, brute_force
from core.simulator import expectation_diagonal, sample, simulate
from pydantic import BaseModel, Field
from scipy.optimize import minimize

ObjectiveMode = Literal["expectation", "ar"]
Objective = Callable[[np.ndarray], float]


class GridPoint(BaseModel):
    gamma: float
    beta: float
    approx_ratio: float | None = Field(description="Indefinida sem massa dentro da restrição")
    icp: float = Field(ge=0.0, le=1.0)
    penalized_expectation: float | None = None


class StartRecord(BaseModel):
    initial: list[float]
    final_value: float


class OptimizationRun(BaseModel):
    best_vector: list[float]
    best_value: float
    evaluations: int
    starts: list[StartRecord]
    best_params: AnsatzParams | None = None


class LocalResult(NamedTuple):
    x: np.ndarray
    value: float
    evaluations: int


def derive_seed(seed: int, index: int) -> int:
    """Semente independente por tarefa, derivada de (seed, índice)."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def grid_values(text: str) -> list[float]:
    """Converte `a:b:k` em k valores uniformes de a até b (inclusive)."""
    try:
        start, stop, count = text.split(":")
        values = np.linspace(float(start), float(stop), int(count))
    except ValueError as e:
        raise ParseError(f"Grade inválida '{text}', esperado 'a:b:k'.") from e
    if values.size == 0:
        raise ParseError(f"Grade vazia '{text}'.")
    return [float(v) for v in values]


def evaluate_qaoa_point(
    instance: ProblemInstance,
    oracle: OracleResult,
    gamma: float,
    beta: float,
    shots: int | None = None,
    seed: int = 0,
    objective: ObjectiveKind = "penalized",
) -> GridPoint:
    params = AnsatzParams(kind=Algorithm.QAOA, p=1, gammas=[gamma], betas=[beta])
    state = simulate(build_qaoa(instance, params, objective))
    dist = state.probabilities() if shots is None else sample(state, shots, seed)
    report = metrics.evaluate(dist, instance, oracle)
    return GridPoint(
        gamma=gamma,
        beta=beta,
        approx_ratio=report.approx_ratio,
        icp=min(1.0, report.icp),
        penalized_expectation=expectation_diagonal(state, instance.penalized_terms),
    )


def grid_search_qaoa(
    instance: ProblemInstance,
    grid_gamma: Sequence[float],
    grid_beta: Sequence[float],
    shots: int | None = None,
    seed: int = 0,
    workers: int = 1,
    objective: ObjectiveKind = "penalized",
    oracle: OracleResult | None = None,
) -> list[GridPoint]:
    """
    Avalia o QAOA com p=1 em cada par (gamma, beta) da grade.

    Args:
        shots (int | None): None avalia exatamente pelo statevector; caso contrário,
            amostra com a semente derivada de (seed, índice do ponto).
    """
    if not grid_gamma or not grid_beta:
        raise EmptyInput("A grade de parâmetros está vazia.")
    oracle = oracle or brute_force(instance)
    pairs = [(g, b) for g in grid_gamma for b in grid_beta]
    mode = "exato" if shots is None else f"{shots} shots"
    logger.info(f"Busca em grade do QAOA: {len(pairs)} pontos ({mode}).")

    def run(task: tuple[int, tuple[float, float]]) -> GridPoint:
        idx, (g, b) = task
        return evaluate_qaoa_point(instance, oracle, g, b, shots, derive_seed(seed, idx), objective)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(run, enumerate(pairs)))


def _defined(points: Sequence[GridPoint]) -> list[GridPoint]:
    return [p for p in points if p.approx_ratio is not None]


def pareto_frontier(points: Sequence[GridPoint]) -> list[GridPoint]:
    """
    Pontos não dominados em (razão de aproximação, ICP), ordenados por ICP crescente.

    a domina b quando a.AR >= b.AR e a.ICP >= b.ICP com ao menos uma desigualdade estrita.
    """
    candidates = _defined(points)
    if not candidates:
        raise EmptyInput("Nenhum ponto com razão de aproximação definida.")
    ar = np.array([p.approx_ratio for p in candidates])
    icp = np.array([p.icp for p in candidates])
    front = []
    for i, point in enumerate(candidates):
        dominated = (ar >= ar[i]) & (icp >= icp[i]) & ((ar > ar[i]) | (icp > icp[i]))
        if not dominated.any():
            front.append(point)
    front.sort(key=lambda p: (p.icp, -p.approx_ratio, p.gamma, p.beta))
    logger.info(f"Fronteira de Pareto: {len(front)} / {len(points)} pontos.")
    return front


def select_qaoa_params(
    points: Sequence[GridPoint], icp_threshold: float = settings.ICP_THRESHOLD
) -> GridPoint:
    """Maior razão de aproximação entre os pontos com ICP acima do limiar."""
    eligible = [p for p in _defined(points) if p.icp > icp_threshold]
    if not eligible:
        raise NoFeasiblePoint(f"Nenhum ponto com ICP acima de {icp_threshold}.")
    return min(eligible, key=lambda p: (-p.approx_ratio, -p.icp, p.gamma, p.beta))


def local_optimize(
    objective: Objective,
    initial: Sequence[float],
    budget: int,
    tol: float = 1e-6,
    rhobeg: float = 0.5,
) -> LocalResult:
    """
    Maximização sem derivadas (COBYLA) limitada a `budget` avaliações.

    Retorna o melhor ponto avaliado, nunca pior que o inicial.
    """
    x0 = np.asarray(initial, dtype=float)
    best = [x0.copy(), float(objective(x0))]
    evaluations = 1
    if budget - 1 < x0.size + 2:
        logger.warning(
            f"Orçamento de {budget} avaliações insuficiente para o COBYLA em {x0.size} parâmetros; "
            "mantendo o ponto inicial."
        )
        return LocalResult(best[0], best[1], evaluations)

    def negated(x: np.ndarray) -> float:
        nonlocal evaluations
        value = float(objective(x))
        evaluations += 1
        if value > best[1]:
            best[0], best[1] = np.array(x, dtype=float), value
        return -value

    minimize(
        negated,
        x0,
        method="COBYLA",
        tol=tol,
        options={"maxiter": budget - 1, "rhobeg": rhobeg},
    )
    return LocalResult(best[0], best[1], evaluations)


def multistart(
    objective: Objective,
    n_starts: int,
    param_ranges: Sequence[tuple[float, float]],
    seed: int,
    budget_per_start: int,
    workers: int = 1,
) -> OptimizationRun:
    """
    COBYLA a partir de `n_starts` pontos uniformes em `param_ranges`.

    O ponto inicial k vem do gerador derivado de (seed, k), então os conjuntos
    de partida são aninhados quando `n_starts` cresce.
    """
    if n_starts < 1:
        raise EmptyInput("'n_starts' deve ser >= 1.")
    low = np.array([r[0] for r in param_ranges], dtype=float)
    high = np.array([r[1] for r in param_ranges], dtype=float)

    def run(k: int) -> tuple[np.ndarray, LocalResult]:
        rng = np.random.default_rng([seed, k])
        x0 = low + (high - low) * rng.random(low.size)
        return x0, local_optimize(objective, x0, budget_per_start)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(run, range(n_starts)))

    best_k = max(range(n_starts), key=lambda k: (results[k][1].value, -k))
    best = results[best_k][1]
    logger.info(
        f"Multistart: {n_starts} partidas, melhor valor {best.value:.6f} (partida {best_k})."
    )
    return OptimizationRun(
        best_vector=best.x.tolist(),
        best_value=best.value,
        evaluations=sum(r.evaluations for _, r in results),
        starts=[StartRecord(initial=x0.tolist(), final_value=r.value) for x0, r in results],
    )


def default_objective_kind(algorithm: Algorithm) -> ObjectiveKind:
    return "raw" if algorithm is Algorithm.XY_QAOA else "penalized"


def default_starts(algorithm: Algorithm, n: int) -> int:
    if algorithm is Algorithm.LVQE:
        return settings.LVQE_STARTS_14 if n <= 14 else settings.LVQE_STARTS_20
    return settings.XY_QAOA_STARTS


def param_ranges(algorithm: Algorithm, n: int, p: int) -> list[tuple[float, float]]:
    if algorithm is Algorithm.LVQE:
        return [(0.0, 2 * math.pi)] * lvqe_param_count(n, p)
    return [(0.0, settings.GRID_GAMMA_MAX)] * p + [(0.0, settings.GRID_BETA_MAX)] * p


def ansatz_objective(
    instance: ProblemInstance,
    algorithm: Algorithm,
    p: int,
    mode: ObjectiveMode = "expectation",
    topology: MixerTopology = "path",
    objective: ObjectiveKind | None = None,
    oracle: OracleResult | None = None,
    icp_floor: float = settings.ICP_THRESHOLD,
) -> Objective:
    """
    Função a maximizar sobre o vetor de parâmetros do ansatz.

    `expectation` devolve o valor esperado do objetivo codificado. `ar` devolve a
    razão de aproximação menos o déficit de ICP abaixo de `icp_floor`.
    """
    kind = objective or default_objective_kind(algorithm)
    terms = instance.terms(kind)
    if mode == "ar":
        oracle = oracle or brute_force(instance)

    def f(x: np.ndarray) -> float:
        params = AnsatzParams.from_vector(algorithm, p, x)
        state = simulate(build_circuit(instance, params, topology, kind))
        if mode == "expectation":
            return expectation_diagonal(state, terms)
        report = metrics.evaluate(state.probabilities(), instance, oracle)
        ar = report.approx_ratio if report.approx_ratio is not None else 0.0
        return ar - max(0.0, icp_floor - report.icp)

    return f


def optimize_parameters(
    instance: ProblemInstance,
    algorithm: Algorithm,
    p: int,
    seed: int,
    n_starts: int | None = None,
    budget_per_start: int = settings.BUDGET_PER_START,
    mode: ObjectiveMode = "expectation",
    topology: MixerTopology = "path",
    objective: ObjectiveKind | None = None,
    workers: int = 1,
    oracle: OracleResult | None = None,
) -> OptimizationRun:
    if n_starts is None:
        n_starts = default_starts(algorithm, instance.n)
    logger.info(
        f"Otimizando {algorithm.value} (p={p}, n={instance.n}) com {n_starts} partidas, modo '{mode}'."
    )
    f = ansatz_objective(instance, algorithm, p, mode, topology, objective, oracle)
    run = multistart(
        f, n_starts, param_ranges(algorithm, instance.n, p), seed, budget_per_start, workers
    )
    run.best_params = AnsatzParams.from_vector(algorithm, p, np.array(run.best_vector))
    return run
