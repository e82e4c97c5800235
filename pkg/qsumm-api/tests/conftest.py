from pathlib import Path

import numpy as np
import pytest
from core.problem import ProblemInstance, build_instance

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "data"


def random_instance(n: int, m: int, seed: int, lam: float = 0.075) -> ProblemInstance:
    """Instância com centralidades em [0, 1) e similaridades simétricas não negativas."""
    rng = np.random.default_rng(seed)
    mu = rng.random(n)
    upper = np.triu(rng.random((n, n)), k=1)
    return build_instance(mu, upper + upper.T, lam, m)


@pytest.fixture
def make_instance():
    return random_instance


@pytest.fixture
def small_instance() -> ProblemInstance:
    return random_instance(5, 2, seed=7)


@pytest.fixture
def article_text() -> str:
    return (DATA_DIR / "article.txt").read_text(encoding="utf-8")


@pytest.fixture
def reference_text() -> str:
    return (DATA_DIR / "reference.txt").read_text(encoding="utf-8")


@pytest.fixture
def toy_article() -> str:
    return (
        "The river flooded the old mill. "
        "Farmers moved their cattle to the hills. "
        "The mayor opened the school as a shelter. "
        "Rain is expected to stop by Friday."
    )
