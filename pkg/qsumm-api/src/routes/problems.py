import traceback
from typing import Literal, NamedTuple

import numpy as np
from config.logs import logger
from config.settings import settings
from core import textprep
from core.errors import CountMismatch, InfeasibleConstraint, QSummError
from core.problem import ProblemFile, build_instance
from fastapi import APIRouter, Depends, HTTPException
from fastapi.concurrency import run_in_threadpool
from pydantic import BaseModel, Field, field_validator

router = APIRouter(prefix="/api/problems", tags=["Problemas"])


class IngestRequest(BaseModel):
    article: str = Field(
        description="Artigo em texto plano", examples=["A cat sat. A dog ran. Birds sing."]
    )
    embeddings: list[list[float]] | None = Field(
        default=None, description="Um embedding por sentença; ausente usa tf-idf"
    )
    lambda_: float = Field(
        default_factory=lambda: settings.DEFAULT_LAMBDA, alias="lambda", ge=0.0
    )
    m: int = Field(description="Número de sentenças do resumo", examples=[2])
    idf_n: Literal["words", "sentences"] = Field(default_factory=lambda: settings.IDF_N)

    model_config = {"populate_by_name": True}

    @field_validator("article")
    def validate_article(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("O artigo não pode ser vazio.")
        return v


class ArticleTerms(NamedTuple):
    corpus: textprep.SentenceCorpus
    mu: np.ndarray
    beta: np.ndarray
    fallback_rows: list[int]


def article_terms(
    article: str,
    m: int,
    embeddings: list[list[float]] | textprep.EmbeddingSet | None = None,
    idf_mode: textprep.IdfMode = "words",
) -> ArticleTerms:
    """
    Centralidades e similaridades de um artigo.

    Sem embeddings, as similaridades vêm dos vetores tf-idf das próprias sentenças.
    """
    corpus = textprep.split_sentences(article)
    if corpus.n < m + 1:
        raise InfeasibleConstraint(
            f"O artigo tem {corpus.n} sentenças; são necessárias pelo menos {m + 1}."
        )
    if embeddings is None:
        embeddings = textprep.fallback_embedding(corpus, idf_mode)
    elif not isinstance(embeddings, textprep.EmbeddingSet):
        embeddings = textprep.EmbeddingSet(vectors=np.array(embeddings, dtype=float))
    if len(embeddings) != corpus.n:
        raise CountMismatch(f"{len(embeddings)} embeddings para {corpus.n} sentenças.")
    return ArticleTerms(
        corpus=corpus,
        mu=textprep.centralities(corpus, idf_mode),
        beta=textprep.similarity_matrix(embeddings),
        fallback_rows=embeddings.fallback_rows,
    )


class IngestUseCase:
    def execute(
        self, request: IngestRequest, embeddings: textprep.EmbeddingSet | None = None
    ) -> ProblemFile:
        logger.info("Executando caso de uso: IngestUseCase.")
        if embeddings is None:
            embeddings = request.embeddings
        terms = article_terms(request.article, request.m, embeddings, request.idf_n)
        instance = build_instance(terms.mu, terms.beta, request.lambda_, request.m)
        logger.info(f"Problema criado com n={instance.n}, m={instance.m}, Γ={instance.gamma:.6f}.")
        return ProblemFile.from_instance(
            instance,
            sentences=terms.corpus.raw_sentences,
            fallback_rows=terms.fallback_rows,
        )


@router.post("/ingest", response_model=ProblemFile, response_model_by_alias=True)
async def ingest_route(
    request: IngestRequest,
    ingest_usecase: IngestUseCase = Depends(IngestUseCase),
) -> ProblemFile:
    """
    Endpoint para transformar um artigo em arquivo de problema.

    - **article**: Texto do artigo.
    - **embeddings**: Embeddings opcionais, um por sentença.
    - **lambda**: Peso de redundância (padrão 0.075).
    - **m**: Tamanho do resumo.

    Retorna o problema com centralidades, similaridades e Γ.
    """
    try:
        return await run_in_threadpool(ingest_usecase.execute, request)
    except QSummError as e:
        logger.error(f"Erro no endpoint ingest: {e}")
        raise HTTPException(status_code=e.status_code, detail=str(e))
    except Exception as e:
        logger.error(f"Erro no endpoint ingest: {e}")
        logger.error(traceback.format_exc())
        raise HTTPException(status_code=500, detail=f"Failed: {e}")
