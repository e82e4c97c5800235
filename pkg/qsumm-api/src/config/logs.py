import logging

# httpx: TestClient; numexpr: aviso de threads ao importar o pandas
for name in ("httpx", "multipart", "numexpr"):
    logging.getLogger(name).setLevel(logging.WARNING)

logger = logging.getLogger("uvicorn")
