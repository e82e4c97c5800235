import traceback

import pandas as pd
from config.logs import logger
from config.settings import settings
from core import metrics, optimize
from core.errors import NoFeasiblePoint, QSummError, TooLarge
from core.optimize import GridPoint
from core.problem import ObjectiveKind, ProblemFile, brute_force
from fastapi import APIRouter, Depends, HTTPException
from fastapi.concurrency import run_in_threadpool
from pydantic import BaseModel, Field

router = APIRouter(prefix="/api", tags=["Pareto"])

GRID_COLUMNS = ["gamma", "beta", "approx_ratio", "icp", "penalized_expectation"]


class ParetoRequest(BaseModel):
    problem: ProblemFile
    grid_gamma: str = Field(
        default_factory=lambda: f"0:{settings.GRID_GAMMA_MAX}:{settings.GRID_POINTS}",
        description="Grade 'a:b:k' para gamma",
        examples=["0:3.14159:50"],
    )
    grid_beta: str = Field(
        default_factory=lambda: f"0:{settings.GRID_BETA_MAX}:{settings.GRID_POINTS}",
        description="Grade 'a:b:k' para beta",
    )
    grid_shots: int = Field(default_factory=lambda: settings.GRID_SHOTS, ge=1)
    grid_exact: bool = Field(default=False, description="Avalia a grade pelo statevector, sem amostrar")
    seed: int = Field(default=0, ge=0)
    icp_threshold: float = Field(default_factory=lambda: settings.ICP_THRESHOLD)
    objective: ObjectiveKind = "penalized"
    workers: int = Field(default_factory=lambda: settings.WORKERS, ge=1)


class ParetoReport(BaseModel):
    schema_version: str = Field(default_factory=lambda: settings.SCHEMA_VERSION)
    n: int
    m: int
    grid_shots: int | None
    seed: int
    icp_threshold: float
    random_approx_ratio: float = Field(description="AR da mistura uniforme das soluções viáveis")
    frontier: list[GridPoint]
    max_penalized_expectation: GridPoint = Field(
        description="Ponto que maximiza o valor esperado do objetivo penalizado"
    )
    selected: GridPoint | None = Field(description="Ponto escolhido pelo limiar de ICP")
    grid: list[GridPoint]


def grid_frame(points: list[GridPoint]) -> pd.DataFrame:
    return pd.DataFrame([p.model_dump() for p in points], columns=GRID_COLUMNS)


class ParetoUseCase:
    def execute(self, request: ParetoRequest) -> ParetoReport:
        logger.info("Executando caso de uso: ParetoUseCase.")
        grid_gamma = optimize.grid_values(request.grid_gamma)
        grid_beta = optimize.grid_values(request.grid_beta)
        instance = request.problem.to_instance()
        if instance.n > settings.MAX_QUBITS:
            raise TooLarge(f"Problema com {instance.n} qubits excede o limite {settings.MAX_QUBITS}.")
        oracle = brute_force(instance)
        points = optimize.grid_search_qaoa(
            instance,
            grid_gamma,
            grid_beta,
            shots=None if request.grid_exact else request.grid_shots,
            seed=request.seed,
            workers=request.workers,
            objective=request.objective,
            oracle=oracle,
        )
        try:
            selected = optimize.select_qaoa_params(points, request.icp_threshold)
        except NoFeasiblePoint as e:
            logger.warning(f"Sem ponto selecionado: {e}")
            selected = None
        best_expectation = min(
            points, key=lambda p: (-p.penalized_expectation, p.gamma, p.beta)
        )
        return ParetoReport(
            n=instance.n,
            m=instance.m,
            grid_shots=None if request.grid_exact else request.grid_shots,
            seed=request.seed,
            icp_threshold=request.icp_threshold,
            random_approx_ratio=metrics.random_metrics(instance, oracle).approx_ratio_in_constraint,
            frontier=optimize.pareto_frontier(points),
            max_penalized_expectation=best_expectation,
            selected=selected,
            grid=points,
        )


@router.post("/pareto", response_model=ParetoReport)
async def pareto_route(
    request: ParetoRequest,
    pareto_usecase: ParetoUseCase = Depends(ParetoUseCase),
) -> ParetoReport:
    """
    Endpoint para a busca em grade do QAOA (p=1) e sua fronteira de Pareto.

    - **problem**: Problema (formato do arquivo de problema).
    - **grid_gamma** / **grid_beta**: Grades no formato 'a:b:k'.

    Retorna a grade completa, a fronteira, o ponto selecionado e o ponto de maior valor esperado.
    """
    try:
        return await run_in_threadpool(pareto_usecase.execute, request)
    except QSummError as e:
        logger.error(f"Erro no endpoint pareto: {e}")
        raise HTTPException(status_code=e.status_code, detail=str(e))
    except Exception as e:
        logger.error(f"Erro no endpoint pareto: {e}")
        logger.error(traceback.format_exc())
        raise HTTPException(status_code=500, detail=f"Failed: {e}")
