import traceback
from typing import Literal

from config.logs import logger
from config.settings import settings
from core import metrics, optimize, textprep
from core.ansatz import (
    Algorithm,
    AnsatzParams,
    GateStats,
    MixerTopology,
    build_circuit,
    build_dicke,
    gate_stats,
    reference_gate_counts,
)
from core.errors import ParamMismatch, QSummError, TooLarge
from core.optimize import GridPoint, ObjectiveMode, OptimizationRun
from core.problem import (
    ObjectiveKind,
    OracleResult,
    ProblemFile,
    ProblemInstance,
    brute_force,
    index_to_bitstring,
)
from core.rouge import RougeScores, weighted_rouge
from core.simulator import Circuit, NoiseModel, SampleSet, dump_circuit, run_noisy, simulate
from infra.storage import Storage
from fastapi import APIRouter, Depends, HTTPException
from fastapi.concurrency import run_in_threadpool
from pydantic import BaseModel, Field

router = APIRouter(prefix="/api", tags=["Solver"])

NoiseKind = Literal["none", "h1", "custom"]


class SolveRequest(BaseModel):
    problem: ProblemFile
    algorithm: Algorithm = Field(examples=["xy-qaoa"])
    p: int = Field(default=1, ge=1)
    shots: int = Field(default_factory=lambda: settings.SHOTS, ge=1)
    seed: int = Field(default=0, ge=0)
    noise: NoiseKind = "none"
    p1: float | None = Field(default=None, ge=0.0, le=1.0)
    p2: float | None = Field(default=None, ge=0.0, le=1.0)
    pspam: float | None = Field(default=None, ge=0.0, le=1.0)
    mixer_topology: MixerTopology = Field(default_factory=lambda: settings.MIXER_TOPOLOGY)
    grid_gamma: str | None = Field(default=None, description="Grade 'a:b:k' para gamma")
    grid_beta: str | None = Field(default=None, description="Grade 'a:b:k' para beta")
    grid_shots: int = Field(default_factory=lambda: settings.GRID_SHOTS, ge=1)
    grid_exact: bool = Field(default=False, description="Avalia a grade pelo statevector, sem amostrar")
    icp_threshold: float = Field(default_factory=lambda: settings.ICP_THRESHOLD)
    objective: ObjectiveKind | None = None
    opt_mode: ObjectiveMode = "expectation"
    starts: int | None = Field(default=None, ge=1)
    budget: int = Field(default_factory=lambda: settings.BUDGET_PER_START, ge=1)
    exact: bool = Field(default=False, description="Métricas pelo statevector (somente sem ruído)")
    params: AnsatzParams | None = Field(default=None, description="Parâmetros explícitos")
    initial_state_only: bool = False
    reference: str | None = Field(default=None, description="Resumo de referência para ROUGE")
    workers: int = Field(default_factory=lambda: settings.WORKERS, ge=1)


class SolveReport(BaseModel):
    schema_version: str = Field(default_factory=lambda: settings.SCHEMA_VERSION)
    algorithm: Algorithm
    n: int
    m: int
    p: int
    params: AnsatzParams
    shots: int | None
    seed: int
    noise: NoiseModel | None
    mixer_topology: MixerTopology
    objective: ObjectiveKind | None
    initial_state_only: bool
    metrics: metrics.MetricReport
    random_baseline: metrics.RandomBaseline
    gate_stats: GateStats
    reference_gate_stats: dict[str, tuple[int, int]] | None
    oracle: OracleResult
    selected_grid_point: GridPoint | None = None
    optimization: OptimizationRun | None = None
    samples: SampleSet | None = None
    distribution: dict[str, float] | None = Field(
        default=None, description="Probabilidades exatas das bitstrings dentro da restrição"
    )
    rouge: RougeScores | None = None


def noise_model(request: SolveRequest) -> NoiseModel | None:
    match request.noise:
        case "none":
            return None
        case "h1":
            return NoiseModel.h1()
        case "custom":
            return NoiseModel(p1=request.p1 or 0.0, p2=request.p2 or 0.0, p_spam=request.pspam or 0.0)


class SolveUseCase:
    """
    Duas fases: parâmetros escolhidos em simulação sem ruído (grade + limiar para
    QAOA com p=1, multistart nos demais casos, ou parâmetros explícitos) e depois
    avaliação com o ruído configurado.
    """

    def _choose_params(
        self, request: SolveRequest, instance: ProblemInstance, oracle: OracleResult
    ) -> tuple[AnsatzParams, GridPoint | None, OptimizationRun | None]:
        if request.initial_state_only:
            return AnsatzParams(kind=request.algorithm, p=request.p), None, None
        if request.params is not None:
            if request.params.kind is not request.algorithm or request.params.p != request.p:
                raise ParamMismatch("Parâmetros explícitos não correspondem ao algoritmo ou a p.")
            return request.params, None, None
        if request.algorithm is Algorithm.QAOA and request.p == 1:
            default_gamma = f"0:{settings.GRID_GAMMA_MAX}:{settings.GRID_POINTS}"
            default_beta = f"0:{settings.GRID_BETA_MAX}:{settings.GRID_POINTS}"
            points = optimize.grid_search_qaoa(
                instance,
                optimize.grid_values(request.grid_gamma or default_gamma),
                optimize.grid_values(request.grid_beta or default_beta),
                shots=None if request.grid_exact else request.grid_shots,
                seed=request.seed,
                workers=request.workers,
                objective=request.objective or "penalized",
                oracle=oracle,
            )
            chosen = optimize.select_qaoa_params(points, request.icp_threshold)
            logger.info(
                f"Parâmetros do QAOA pela grade: gamma={chosen.gamma:.4f}, beta={chosen.beta:.4f}."
            )
            params = AnsatzParams(
                kind=Algorithm.QAOA, p=1, gammas=[chosen.gamma], betas=[chosen.beta]
            )
            return params, chosen, None
        run = optimize.optimize_parameters(
            instance,
            request.algorithm,
            request.p,
            seed=request.seed,
            n_starts=request.starts,
            budget_per_start=request.budget,
            mode=request.opt_mode,
            topology=request.mixer_topology,
            objective=request.objective,
            workers=request.workers,
            oracle=oracle,
        )
        return run.best_params, None, run

    def circuit(self, request: SolveRequest, instance: ProblemInstance, params: AnsatzParams) -> Circuit:
        if request.initial_state_only:
            return build_dicke(instance.n, instance.m)
        return build_circuit(instance, params, request.mixer_topology, request.objective)

    def execute(self, request: SolveRequest, dump_path: str | None = None) -> SolveReport:
        logger.info(f"Executando caso de uso: SolveUseCase ({request.algorithm.value}).")
        if request.initial_state_only and request.algorithm is not Algorithm.XY_QAOA:
            raise ParamMismatch("'initial_state_only' só se aplica ao xy-qaoa.")
        if request.exact and request.noise != "none":
            raise ParamMismatch("'exact' só está disponível sem ruído.")
        instance = request.problem.to_instance()
        if instance.n > settings.MAX_QUBITS:
            raise TooLarge(f"Problema com {instance.n} qubits excede o limite {settings.MAX_QUBITS}.")
        oracle = brute_force(instance)
        params, chosen, run = self._choose_params(request, instance, oracle)
        circuit = self.circuit(request, instance, params)
        if dump_path is not None:
            Storage().write_text(dump_path, dump_circuit(circuit))

        noise = noise_model(request)
        samples, distribution = None, None
        if request.exact:
            probs = simulate(circuit).probabilities()
            dist = probs
            distribution = {
                index_to_bitstring(int(i), instance.n): float(probs[i])
                for i in instance.feasible_indices
                if probs[i] > 0.0
            }
        else:
            samples = run_noisy(
                circuit, noise or NoiseModel(), request.shots, request.seed, request.workers
            )
            dist = samples
        report_metrics = metrics.evaluate(dist, instance, oracle)
        logger.info(
            f"Métricas: AR={report_metrics.approx_ratio}, ICP={report_metrics.icp:.4f}."
        )

        rouge = None
        if request.reference and request.problem.sentences:
            corpus = textprep.SentenceCorpus.from_sentences(request.problem.sentences)
            try:
                rouge = weighted_rouge(
                    dist, corpus, instance.m, textprep.tokenize(request.reference)
                )
            except QSummError as e:
                logger.warning(f"ROUGE não calculado: {e}")

        return SolveReport(
            algorithm=request.algorithm,
            n=instance.n,
            m=instance.m,
            p=request.p,
            params=params,
            shots=None if samples is None else request.shots,
            seed=request.seed,
            noise=noise,
            mixer_topology=request.mixer_topology,
            objective=request.objective,
            initial_state_only=request.initial_state_only,
            metrics=report_metrics,
            random_baseline=metrics.random_metrics(instance, oracle),
            gate_stats=gate_stats(circuit, "cnot-decomposed"),
            reference_gate_stats=reference_gate_counts(request.algorithm, instance.n),
            oracle=oracle,
            selected_grid_point=chosen,
            optimization=run,
            samples=samples,
            distribution=distribution,
            rouge=rouge,
        )


@router.post("/solve", response_model=SolveReport)
async def solve_route(
    request: SolveRequest,
    solve_usecase: SolveUseCase = Depends(SolveUseCase),
) -> SolveReport:
    """
    Endpoint para otimizar os parâmetros e avaliar o circuito escolhido.

    - **problem**: Problema (formato do arquivo de problema).
    - **algorithm**: qaoa, xy-qaoa ou lvqe.
    - **noise**: none, h1 ou custom.

    Retorna o relatório com métricas, contagem de portas e parâmetros.
    """
    try:
        return await run_in_threadpool(solve_usecase.execute, request)
    except QSummError as e:
        logger.error(f"Erro no endpoint solve: {e}")
        raise HTTPException(status_code=e.status_code, detail=str(e))
    except Exception as e:
        logger.error(f"Erro no endpoint solve: {e}")
        logger.error(traceback.format_exc())
        raise HTTPException(status_code=500, detail=f"Failed: {e}")
