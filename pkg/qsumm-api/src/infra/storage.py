import sys
from pathlib import Path
from typing import TypeVar

import pandas as pd
from config.logs import logger
from core.errors import ParseError
from pydantic import BaseModel, ValidationError

ModelT = TypeVar("ModelT", bound=BaseModel)


class Storage:
    """Leitura e escrita dos artefatos do pipeline no sistema de arquivos local."""

    def read_text(self, path: str | Path) -> str:
        logger.info(f"Lendo arquivo '{path}'.")
        try:
            return Path(path).read_text(encoding="utf-8")
        except OSError as e:
            logger.error(f"Erro ao ler o arquivo '{path}': {e}")
            raise

    def read_model(self, path: str | Path, model: type[ModelT]) -> ModelT:
        content = self.read_text(path)
        try:
            return model.model_validate_json(content)
        except ValidationError as e:
            logger.error(f"Arquivo '{path}' não segue o esquema {model.__name__}: {e}")
            raise ParseError(f"{path}: {e}") from e

    def write_text(self, path: str | Path | None, content: str) -> str:
        """Grava o conteúdo em `path`; sem caminho, escreve na saída padrão."""
        if path is None or str(path) == "-":
            sys.stdout.write(content)
            sys.stdout.flush()
            return "-"
        logger.info(f"Gravando '{path}'.")
        try:
            target = Path(path)
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(content, encoding="utf-8")
        except OSError as e:
            logger.error(f"Erro ao gravar o arquivo '{path}': {e}")
            raise
        logger.info(f"Arquivo '{path}' gravado com sucesso.")
        return str(path)

    def write_model(self, path: str | Path | None, model: BaseModel) -> str:
        return self.write_text(path, model.model_dump_json(indent=2, by_alias=True) + "\n")

    def write_csv(self, path: str | Path | None, frame: pd.DataFrame) -> str:
        return self.write_text(path, frame.to_csv(index=False, lineterminator="\n"))
