import traceback

import pandas as pd
from config.logs import logger
from config.settings import settings
from core import optimize, textprep
from core.errors import EmptyInput, NoInConstraintMass, ParamMismatch, QSummError
from core.problem import ProblemFile
from core.rouge import (
    RougeScores,
    SweepEntry,
    lambda_sweep,
    optimal_rouge,
    uniform_rouge,
    weighted_rouge,
)
from fastapi import APIRouter, Depends, HTTPException
from fastapi.concurrency import run_in_threadpool
from pydantic import BaseModel, Field
from routes.problems import article_terms
from routes.solve import SolveReport

router = APIRouter(prefix="/api/rouge", tags=["ROUGE"])

SWEEP_COLUMNS = ["lambda", "rouge1_f", "rouge2_f", "rougeL_f"]


class RougeRequest(BaseModel):
    report: SolveReport = Field(description="Relatório com amostras ou distribuição exata")
    reference: str = Field(description="Resumo de referência", examples=["A cat sat."])
    article: str | None = Field(
        default=None, description="Artigo original; ausente usa as sentenças do problema"
    )
    problem: ProblemFile | None = Field(
        default=None, description="Problema do relatório; necessário para o ROUGE do ótimo"
    )
    baselines: bool = Field(
        default=False, description="Calcula também o ROUGE uniforme e o do ótimo"
    )


class RougeReport(BaseModel):
    schema_version: str = Field(default_factory=lambda: settings.SCHEMA_VERSION)
    algorithm: str
    scores: RougeScores
    uniform: RougeScores | None = None
    optimal: RougeScores | None = None


class SweepRequest(BaseModel):
    article: str
    reference: str
    m: int = Field(description="Número de sentenças do resumo", examples=[3])
    lambda_grid: str = Field(default="0:0.25:26", description="Grade 'a:b:k' de lambda")
    embeddings: list[list[float]] | None = None
    idf_n: textprep.IdfMode = Field(default_factory=lambda: settings.IDF_N)
    workers: int = Field(default_factory=lambda: settings.WORKERS, ge=1)


class SweepReport(BaseModel):
    schema_version: str = Field(default_factory=lambda: settings.SCHEMA_VERSION)
    m: int
    entries: list[SweepEntry]


def sweep_frame(entries: list[SweepEntry]) -> pd.DataFrame:
    return pd.DataFrame(
        [[e.lambda_, e.scores.rouge1_f, e.scores.rouge2_f, e.scores.rougeL_f] for e in entries],
        columns=SWEEP_COLUMNS,
    )


class RougeUseCase:
    def _corpus(self, request: RougeRequest) -> textprep.SentenceCorpus:
        if request.article is not None:
            return textprep.split_sentences(request.article)
        if request.problem is not None and request.problem.sentences:
            return textprep.SentenceCorpus.from_sentences(request.problem.sentences)
        raise EmptyInput("Informe o artigo ou um problema com as sentenças.")

    def execute(self, request: RougeRequest) -> RougeReport:
        logger.info("Executando caso de uso: RougeUseCase.")
        report = request.report
        distribution = report.samples if report.samples is not None else report.distribution
        if distribution is None:
            raise EmptyInput("O relatório não contém amostras nem distribuição.")
        if report.samples is None and not distribution:
            raise NoInConstraintMass("A distribuição do relatório não tem massa dentro da restrição.")
        corpus = self._corpus(request)
        reference = textprep.tokenize(request.reference)
        scores = weighted_rouge(distribution, corpus, report.m, reference)
        logger.info(
            f"ROUGE ponderado: R1={scores.rouge1_f:.4f}, R2={scores.rouge2_f:.4f}, RL={scores.rougeL_f:.4f}."
        )
        uniform, optimal = None, None
        if request.baselines:
            uniform = uniform_rouge(corpus, report.m, reference)
            if request.problem is not None:
                instance = request.problem.to_instance()
                if instance.m != report.m:
                    raise ParamMismatch("O problema e o relatório têm valores de m diferentes.")
                optimal = optimal_rouge(instance, corpus, reference)
        return RougeReport(
            algorithm=report.algorithm.value, scores=scores, uniform=uniform, optimal=optimal
        )


class SweepUseCase:
    def execute(self, request: SweepRequest) -> SweepReport:
        logger.info("Executando caso de uso: SweepUseCase.")
        grid = optimize.grid_values(request.lambda_grid)
        terms = article_terms(request.article, request.m, request.embeddings, request.idf_n)
        entries = lambda_sweep(
            terms.corpus,
            terms.mu,
            terms.beta,
            textprep.tokenize(request.reference),
            grid,
            request.m,
            request.workers,
        )
        return SweepReport(m=request.m, entries=entries)


@router.post("", response_model=RougeReport)
async def rouge_route(
    request: RougeRequest,
    rouge_usecase: RougeUseCase = Depends(RougeUseCase),
) -> RougeReport:
    """
    Endpoint para o ROUGE ponderado pela distribuição de saída de um relatório.

    - **report**: Relatório do solver.
    - **reference**: Resumo de referência.
    - **baselines**: Inclui ROUGE uniforme e do ótimo.
    """
    try:
        return await run_in_threadpool(rouge_usecase.execute, request)
    except QSummError as e:
        logger.error(f"Erro no endpoint rouge: {e}")
        raise HTTPException(status_code=e.status_code, detail=str(e))
    except Exception as e:
        logger.error(f"Erro no endpoint rouge: {e}")
        logger.error(traceback.format_exc())
        raise HTTPException(status_code=500, detail=f"Failed: {e}")


@router.post("/sweep", response_model=SweepReport)
async def sweep_route(
    request: SweepRequest,
    sweep_usecase: SweepUseCase = Depends(SweepUseCase),
) -> SweepReport:
    """
    Endpoint para a varredura de lambda: ROUGE do resumo ótimo de cada objetivo.
    """
    try:
        return await run_in_threadpool(sweep_usecase.execute, request)
    except QSummError as e:
        logger.error(f"Erro no endpoint sweep: {e}")
        raise HTTPException(status_code=e.status_code, detail=str(e))
    except Exception as e:
        logger.error(f"Erro no endpoint sweep: {e}")
        logger.error(traceback.format_exc())
        raise HTTPException(status_code=500, detail=f"Failed: {e}")
