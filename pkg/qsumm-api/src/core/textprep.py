"""
Pré-processamento do artigo: divisão em sentenças, centralidade tf-idf e
matriz de similaridade por cosseno entre embeddings.
"""

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
from config.logs import logger
from core.errors import (
    CountMismatch,
    DimensionMismatch,
    EmptyDocument,
    IndexOutOfRange,
    ParseError,
    WordNotInSentence,
    ZeroVector,
)

IdfMode = Literal["words", "sentences"]

_SENTENCE_BOUNDARY = re.compile(r"(?<=[.!?])\s+")
_TOKEN = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class SentenceCorpus:
    """Sentenças do documento, na ordem em que aparecem, já tokenizadas."""

    sentences: list[list[str]]
    raw_sentences: list[str]

    def __post_init__(self) -> None:
        if len(self.sentences) < 2:
            raise EmptyDocument(
                f"O documento precisa de pelo menos 2 sentenças, encontrado {len(self.sentences)}."
            )
        if len(self.sentences) != len(self.raw_sentences):
            raise CountMismatch("Tokens e sentenças originais com tamanhos diferentes.")
        if any(not tokens for tokens in self.sentences):
            raise EmptyDocument("Toda sentença precisa de pelo menos um token.")

    @classmethod
    def from_sentences(cls, raw_sentences: list[str]) -> "SentenceCorpus":
        """Reconstrói o corpus a partir de sentenças já divididas (ex.: de um arquivo de problema)."""
        return cls(sentences=[tokenize(s) for s in raw_sentences], raw_sentences=list(raw_sentences))

    @property
    def n(self) -> int:
        return len(self.sentences)

    @property
    def vocabulary(self) -> list[str]:
        return sorted({w for tokens in self.sentences for w in tokens})


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    """
    Um vetor real por sentença.

    `fallback_rows` lista as sentenças cujo vetor tf-idf era nulo e foi
    substituído pelo vetor de frequências.
    """

    vectors: np.ndarray
    fallback_rows: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.vectors.ndim != 2 or self.vectors.shape[1] < 1:
            raise DimensionMismatch("Embeddings devem formar uma matriz N x d com d >= 1.")
        zero_rows = np.flatnonzero(~np.any(self.vectors != 0.0, axis=1))
        if zero_rows.size:
            raise ZeroVector(f"Embedding nulo na sentença {int(zero_rows[0])}.")

    def __len__(self) -> int:
        return self.vectors.shape[0]


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def split_sentences(text: str) -> SentenceCorpus:
    """
    Divide o texto em sentenças nos terminadores `.`, `!` e `?` seguidos de espaço.

    Args:
        text (str): O documento em texto plano.

    Returns:
        SentenceCorpus: Sentenças não vazias com seus tokens em minúsculas.
    """
    if not text.strip():
        raise EmptyDocument("O documento está vazio.")
    raw, tokens = [], []
    for chunk in _SENTENCE_BOUNDARY.split(text.strip()):
        words = tokenize(chunk)
        if words:
            raw.append(chunk.strip())
            tokens.append(words)
    logger.info(f"Documento dividido em {len(tokens)} sentenças.")
    return SentenceCorpus(sentences=tokens, raw_sentences=raw)


def _n_idf(corpus: SentenceCorpus, idf_mode: IdfMode) -> int:
    if idf_mode == "sentences":
        return corpus.n
    return len(corpus.vocabulary)


def _document_frequency(corpus: SentenceCorpus, w: str) -> int:
    return sum(1 for tokens in corpus.sentences if w in tokens)


def tf_idf_word(
    w: str, s: int, corpus: SentenceCorpus, idf_mode: IdfMode = "words"
) -> float:
    """
    tf(w, S) * idf(w, D), com idf em log natural e sentenças como documentos.

    Args:
        w (str): O token.
        s (int): Índice da sentença.
        corpus (SentenceCorpus): O documento.
        idf_mode (str): "words" usa o número de palavras únicas como numerador do idf,
            "sentences" usa o número de sentenças.
    """
    if not 0 <= s < corpus.n:
        raise IndexOutOfRange(f"Sentença {s} fora do intervalo [0, {corpus.n}).")
    tokens = corpus.sentences[s]
    count = tokens.count(w)
    if count == 0:
        raise WordNotInSentence(f"A palavra '{w}' não ocorre na sentença {s}.")
    tf = count / len(tokens)
    idf = math.log(_n_idf(corpus, idf_mode) / _document_frequency(corpus, w))
    return tf * idf


def sentence_centrality(
    s: int, corpus: SentenceCorpus, idf_mode: IdfMode = "words"
) -> float:
    """Média do tf-idf das ocorrências de palavras da sentença."""
    if not 0 <= s < corpus.n:
        raise IndexOutOfRange(f"Sentença {s} fora do intervalo [0, {corpus.n}).")
    tokens = corpus.sentences[s]
    total = sum(
        count * tf_idf_word(w, s, corpus, idf_mode)
        for w, count in Counter(tokens).items()
    )
    return total / len(tokens)


def centralities(corpus: SentenceCorpus, idf_mode: IdfMode = "words") -> np.ndarray:
    return np.array([sentence_centrality(s, corpus, idf_mode) for s in range(corpus.n)])


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DimensionMismatch(f"Dimensões incompatíveis: {u.shape} e {v.shape}.")
    norm_u, norm_v = np.linalg.norm(u), np.linalg.norm(v)
    if norm_u == 0.0 or norm_v == 0.0:
        raise ZeroVector("Similaridade de cosseno indefinida para vetor nulo.")
    return float(np.clip(np.dot(u, v) / (norm_u * norm_v), -1.0, 1.0))


def similarity_matrix(emb: EmbeddingSet) -> np.ndarray:
    """Matriz simétrica de similaridades com diagonal zero."""
    norms = np.linalg.norm(emb.vectors, axis=1)
    if np.any(norms == 0.0):
        raise ZeroVector(f"Embedding nulo na sentença {int(np.argmin(norms))}.")
    unit = emb.vectors / norms[:, None]
    beta = np.clip(unit @ unit.T, -1.0, 1.0)
    beta = (beta + beta.T) / 2.0
    np.fill_diagonal(beta, 0.0)
    return beta


def load_embeddings(path: str | Path, expected_count: int | None = None) -> EmbeddingSet:
    """
    Lê um embedding por linha, floats separados por vírgula.

    Args:
        path (str | Path): Caminho do arquivo.
        expected_count (int | None): Número de sentenças do corpus associado, se houver.
    """
    logger.info(f"Lendo embeddings de '{path}'.")
    rows: list[list[float]] = []
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            row = [float(value) for value in line.split(",")]
        except ValueError as e:
            raise ParseError(f"{path}:{lineno}: valor inválido ({e}).") from e
        if rows and len(row) != len(rows[0]):
            raise ParseError(
                f"{path}:{lineno}: dimensão {len(row)} difere da primeira linha ({len(rows[0])})."
            )
        rows.append(row)
    if not rows:
        raise ParseError(f"{path}: nenhum embedding encontrado.")
    if expected_count is not None and len(rows) != expected_count:
        raise CountMismatch(
            f"{path}: {len(rows)} embeddings para {expected_count} sentenças."
        )
    return EmbeddingSet(vectors=np.array(rows, dtype=float))


def fallback_embedding(corpus: SentenceCorpus, idf_mode: IdfMode = "words") -> EmbeddingSet:
    """
    Vetor tf-idf de cada sentença sobre o vocabulário ordenado do documento.

    Sentenças cujo vetor tf-idf é nulo (todo token com idf zero) recebem o vetor
    de frequências relativas; os índices ficam em `fallback_rows`.
    """
    vocabulary = corpus.vocabulary
    position = {w: k for k, w in enumerate(vocabulary)}
    vectors = np.zeros((corpus.n, len(vocabulary)))
    fallback_rows = []
    for s, tokens in enumerate(corpus.sentences):
        counts = Counter(tokens)
        for w in counts:
            vectors[s, position[w]] = tf_idf_word(w, s, corpus, idf_mode)
        if not np.any(vectors[s] != 0.0):
            for w, count in counts.items():
                vectors[s, position[w]] = count / len(tokens)
            fallback_rows.append(s)
    if fallback_rows:
        logger.warning(
            f"Vetor tf-idf nulo nas sentenças {fallback_rows}; usando frequências de termos."
        )
    return EmbeddingSet(vectors=vectors, fallback_rows=fallback_rows)
