from fastapi import FastAPI
from routes import pareto, problems, rouge, solve

app = FastAPI(title="qsumm-api")
app.include_router(problems.router)
app.include_router(solve.router)
app.include_router(pareto.router)
app.include_router(rouge.router)
