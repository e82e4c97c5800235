"""
ROUGE-1-F, ROUGE-2-F e ROUGE-L-F, avaliação ponderada pela distribuição de
saída e varredura de lambda com soluções ótimas por força bruta.
"""

from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np
from config.logs import logger
from core.errors import CountMismatch, EmptyReference, NoInConstraintMass
from core.metrics import Distribution, masses, popcount
from core.problem import ProblemInstance, brute_force, build_instance, index_to_bitstring
from core.textprep import SentenceCorpus, tokenize
from pydantic import BaseModel, Field
from rouge_score import rouge_scorer, tokenizers

ROUGE_TYPES = ("rouge1", "rouge2", "rougeL")


class RougeScores(BaseModel):
    rouge1_f: float = Field(ge=0.0, le=1.0)
    rouge2_f: float = Field(ge=0.0, le=1.0)
    rougeL_f: float = Field(ge=0.0, le=1.0)


class CorpusTokenizer(tokenizers.Tokenizer):
    """Tokeniza como o corpus: minúsculas, sem pontuação e sem stemming."""

    def tokenize(self, text: str) -> list[str]:
        return tokenize(text)


@lru_cache(maxsize=None)
def _scorer(*rouge_types: str) -> rouge_scorer.RougeScorer:
    return rouge_scorer.RougeScorer(list(rouge_types), use_stemmer=False, tokenizer=CorpusTokenizer())


def _fmeasures(pred: Sequence[str], ref: Sequence[str], rouge_types: tuple[str, ...]) -> dict[str, float]:
    if not ref:
        raise EmptyReference("A referência está vazia.")
    scores = _scorer(*rouge_types).score(" ".join(ref), " ".join(pred))
    return {key: float(scores[key].fmeasure) for key in rouge_types}


def rouge_n(pred: Sequence[str], ref: Sequence[str], order: int = 1) -> float:
    key = f"rouge{order}"
    return _fmeasures(pred, ref, (key,))[key]


def rouge_l(pred: Sequence[str], ref: Sequence[str]) -> float:
    return _fmeasures(pred, ref, ("rougeL",))["rougeL"]


def score(pred: Sequence[str], ref: Sequence[str]) -> RougeScores:
    f = _fmeasures(pred, ref, ROUGE_TYPES)
    return RougeScores(rouge1_f=f["rouge1"], rouge2_f=f["rouge2"], rougeL_f=f["rougeL"])


def summary_tokens(corpus: SentenceCorpus, bits: str) -> list[str]:
    """Concatena as sentenças selecionadas na ordem do documento."""
    return [w for s, b in enumerate(bits) if b == "1" for w in corpus.sentences[s]]


def _mean_scores(weighted: Sequence[tuple[float, RougeScores]]) -> RougeScores:
    total = sum(w for w, _ in weighted)
    return RougeScores(
        rouge1_f=min(1.0, sum(w * s.rouge1_f for w, s in weighted) / total),
        rouge2_f=min(1.0, sum(w * s.rouge2_f for w, s in weighted) / total),
        rougeL_f=min(1.0, sum(w * s.rougeL_f for w, s in weighted) / total),
    )


def weighted_rouge(
    distribution: Distribution, corpus: SentenceCorpus, m: int, reference: Sequence[str]
) -> RougeScores:
    """
    Média dos escores ROUGE dos resumos dentro da restrição, ponderada pela
    probabilidade de cada bitstring e normalizada pela massa dentro da restrição.
    """
    if not reference:
        raise EmptyReference("A referência está vazia.")
    indices, mass, n = masses(distribution)
    if n != corpus.n:
        raise CountMismatch(f"Distribuição com {n} qubits para artigo de {corpus.n} sentenças.")
    keep = (popcount(indices, n) == m) & (mass > 0.0)
    weighted = [
        (float(p), score(summary_tokens(corpus, index_to_bitstring(int(i), n)), reference))
        for i, p in zip(indices[keep], mass[keep])
    ]
    if not weighted:
        raise NoInConstraintMass("Distribuição sem massa dentro da restrição.")
    return _mean_scores(weighted)


def uniform_rouge(corpus: SentenceCorpus, m: int, reference: Sequence[str]) -> RougeScores:
    """ROUGE esperado de um resumo viável sorteado uniformemente."""
    weighted = []
    for chosen in combinations(range(corpus.n), m):
        bits = "".join("1" if s in chosen else "0" for s in range(corpus.n))
        weighted.append((1.0, score(summary_tokens(corpus, bits), reference)))
    return _mean_scores(weighted)


def optimal_rouge(
    instance: ProblemInstance, corpus: SentenceCorpus, reference: Sequence[str]
) -> RougeScores:
    """ROUGE do resumo ótimo obtido por força bruta."""
    return score(summary_tokens(corpus, brute_force(instance).argmax), reference)


class SweepEntry(BaseModel):
    lambda_: float = Field(alias="lambda")
    argmax: str
    scores: RougeScores

    model_config = {"populate_by_name": True}


def lambda_sweep(
    corpus: SentenceCorpus,
    mu: np.ndarray,
    beta: np.ndarray,
    reference: Sequence[str],
    lambda_grid: Sequence[float],
    m: int,
    workers: int = 1,
) -> list[SweepEntry]:
    """Para cada lambda, refaz a instância (Γ pela regra padrão) e pontua o resumo ótimo."""
    if not reference:
        raise EmptyReference("A referência está vazia.")
    logger.info(f"Varredura de lambda com {len(lambda_grid)} valores, m={m}.")

    def run(lam: float) -> SweepEntry:
        instance = build_instance(mu, beta, lam, m)
        argmax = brute_force(instance).argmax
        return SweepEntry(
            lambda_=lam, argmax=argmax, scores=score(summary_tokens(corpus, argmax), reference)
        )

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(run, lambda_grid))
