"""
Linha de comando: ingest, solve, pareto, rouge, sweep-lambda e serve.

Logs vão para stderr; stdout recebe apenas JSON ou CSV.
"""

import argparse
import logging
import sys
from typing import Any, Sequence

from config.logs import logger
from config.settings import settings
from core import textprep
from core.ansatz import Algorithm, AnsatzParams
from core.errors import InvalidInput, QSummError
from core.problem import ProblemFile
from infra.storage import Storage
from pydantic import ValidationError
from routes.pareto import ParetoRequest, ParetoUseCase, grid_frame
from routes.problems import IngestRequest, IngestUseCase
from routes.rouge import RougeRequest, RougeUseCase, SweepRequest, SweepUseCase, sweep_frame
from routes.solve import SolveReport, SolveRequest, SolveUseCase

EXIT_IO = 2


def _present(**fields: Any) -> dict[str, Any]:
    """Somente as opções informadas; as demais ficam com os padrões de `settings`."""
    return {k: v for k, v in fields.items() if v is not None}


def cmd_ingest(args: argparse.Namespace, storage: Storage) -> None:
    article = storage.read_text(args.article)
    embeddings = None
    if args.embeddings:
        corpus = textprep.split_sentences(article)
        embeddings = textprep.load_embeddings(args.embeddings, expected_count=corpus.n)
    request = IngestRequest(
        **_present(article=article, m=args.m, lambda_=args.lambda_, idf_n=args.idf_n)
    )
    problem = IngestUseCase().execute(request, embeddings)
    storage.write_model(args.out, problem)


def cmd_solve(args: argparse.Namespace, storage: Storage) -> None:
    problem = storage.read_model(args.problem, ProblemFile)
    params = storage.read_model(args.params, AnsatzParams) if args.params else None
    reference = storage.read_text(args.reference) if args.reference else None
    request = SolveRequest(
        **_present(
            problem=problem,
            algorithm=args.algorithm,
            p=args.p,
            shots=args.shots,
            seed=args.seed,
            noise=args.noise,
            p1=args.p1,
            p2=args.p2,
            pspam=args.pspam,
            mixer_topology=args.mixer_topology,
            grid_gamma=args.grid_gamma,
            grid_beta=args.grid_beta,
            grid_shots=args.grid_shots,
            grid_exact=args.grid_exact,
            icp_threshold=args.icp_threshold,
            objective=args.objective,
            opt_mode=args.opt_mode,
            starts=args.starts,
            budget=args.budget,
            exact=args.exact,
            params=params,
            initial_state_only=args.initial_state_only,
            reference=reference,
            workers=args.workers,
        )
    )
    report = SolveUseCase().execute(request, dump_path=args.dump_circuit)
    storage.write_model(args.out, report)


def cmd_pareto(args: argparse.Namespace, storage: Storage) -> None:
    problem = storage.read_model(args.problem, ProblemFile)
    request = ParetoRequest(
        **_present(
            problem=problem,
            grid_gamma=args.grid_gamma,
            grid_beta=args.grid_beta,
            grid_shots=args.grid_shots,
            grid_exact=args.grid_exact,
            seed=args.seed,
            icp_threshold=args.icp_threshold,
            objective=args.objective,
            workers=args.workers,
        )
    )
    report = ParetoUseCase().execute(request)
    if args.csv:
        storage.write_csv(args.csv, grid_frame(report.grid))
    storage.write_model(args.out, report)


def cmd_rouge(args: argparse.Namespace, storage: Storage) -> None:
    request = RougeRequest(
        **_present(
            report=storage.read_model(args.report, SolveReport),
            reference=storage.read_text(args.reference),
            article=storage.read_text(args.article) if args.article else None,
            problem=storage.read_model(args.problem, ProblemFile) if args.problem else None,
            baselines=args.baselines,
        )
    )
    storage.write_model(args.out, RougeUseCase().execute(request))


def cmd_sweep_lambda(args: argparse.Namespace, storage: Storage) -> None:
    article = storage.read_text(args.article)
    embeddings = None
    if args.embeddings:
        corpus = textprep.split_sentences(article)
        embeddings = textprep.load_embeddings(args.embeddings, expected_count=corpus.n)
    request = SweepRequest(
        **_present(
            article=article,
            reference=storage.read_text(args.reference),
            m=args.m,
            lambda_grid=args.lambda_grid,
            embeddings=None if embeddings is None else embeddings.vectors.tolist(),
            idf_n=args.idf_n,
            workers=args.workers,
        )
    )
    report = SweepUseCase().execute(request)
    storage.write_csv(args.csv, sweep_frame(report.entries))
    if args.out:
        storage.write_model(args.out, report)


def cmd_serve(args: argparse.Namespace, storage: Storage) -> None:
    import uvicorn

    uvicorn.run("app:app", host=args.host, port=args.port)


def _add_grid_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grid-gamma", help="grade de gamma 'a:b:k'")
    parser.add_argument("--grid-beta", help="grade de beta 'a:b:k'")
    parser.add_argument("--grid-shots", type=int, help="shots por ponto da grade")
    parser.add_argument(
        "--grid-exact", action="store_true", default=None, help="grade pelo statevector, sem amostrar"
    )
    parser.add_argument("--icp-threshold", type=float, help="limiar de ICP para selecionar parâmetros")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsumm", description="Sumarização extrativa por otimização quântica simulada."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="artigo -> arquivo de problema")
    ingest.add_argument("article", help="artigo em texto plano")
    ingest.add_argument("--embeddings", help="um embedding por linha, separado por vírgulas")
    ingest.add_argument("--lambda", dest="lambda_", type=float, help="peso de redundância")
    ingest.add_argument("--m", type=int, required=True, help="sentenças no resumo")
    ingest.add_argument("--idf-n", choices=["words", "sentences"])
    ingest.add_argument("--out", help="arquivo de saída (padrão: stdout)")
    ingest.set_defaults(handler=cmd_ingest)

    solve = sub.add_parser("solve", help="otimiza e avalia um ansatz")
    solve.add_argument("problem", help="arquivo de problema (JSON)")
    solve.add_argument("--algorithm", choices=[a.value for a in Algorithm], required=True)
    solve.add_argument("--p", type=int, help="número de camadas")
    solve.add_argument("--shots", type=int)
    solve.add_argument("--seed", type=int)
    solve.add_argument("--noise", choices=["none", "h1", "custom"])
    solve.add_argument("--p1", type=float)
    solve.add_argument("--p2", type=float)
    solve.add_argument("--pspam", type=float)
    solve.add_argument("--mixer-topology", choices=["path", "ring"])
    _add_grid_flags(solve)
    solve.add_argument("--objective", choices=["penalized", "raw"])
    solve.add_argument("--opt-mode", choices=["expectation", "ar"])
    solve.add_argument("--starts", type=int, help="pontos iniciais do multistart")
    solve.add_argument("--budget", type=int, help="avaliações por ponto inicial")
    solve.add_argument("--exact", action="store_true", default=None, help="métricas pelo statevector")
    solve.add_argument("--params", help="parâmetros explícitos (JSON)")
    solve.add_argument(
        "--initial-state-only", action="store_true", default=None, help="somente o estado de Dicke"
    )
    solve.add_argument("--reference", help="resumo de referência para ROUGE")
    solve.add_argument("--workers", type=int)
    solve.add_argument("--dump-circuit", help="grava o circuito em formato textual")
    solve.add_argument("--out")
    solve.set_defaults(handler=cmd_solve)

    pareto = sub.add_parser("pareto", help="grade do QAOA e fronteira de Pareto")
    pareto.add_argument("problem")
    _add_grid_flags(pareto)
    pareto.add_argument("--seed", type=int)
    pareto.add_argument("--objective", choices=["penalized", "raw"])
    pareto.add_argument("--workers", type=int)
    pareto.add_argument("--csv", help="grade completa em CSV")
    pareto.add_argument("--out")
    pareto.set_defaults(handler=cmd_pareto)

    rouge = sub.add_parser("rouge", help="ROUGE ponderado de um relatório")
    rouge.add_argument("report", help="relatório do solve (JSON)")
    rouge.add_argument("--article")
    rouge.add_argument("--reference", required=True)
    rouge.add_argument("--problem", help="arquivo de problema (sentenças e ótimo)")
    rouge.add_argument("--baselines", action="store_true", default=None)
    rouge.add_argument("--out")
    rouge.set_defaults(handler=cmd_rouge)

    sweep = sub.add_parser("sweep-lambda", help="ROUGE do ótimo para cada lambda")
    sweep.add_argument("article")
    sweep.add_argument("--reference", required=True)
    sweep.add_argument("--m", type=int, required=True)
    sweep.add_argument("--lambda-grid", help="grade 'a:b:k' (padrão 0:0.25:26)")
    sweep.add_argument("--embeddings")
    sweep.add_argument("--idf-n", choices=["words", "sentences"])
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--csv", help="CSV de saída (padrão: stdout)")
    sweep.add_argument("--out", help="relatório JSON opcional")
    sweep.set_defaults(handler=cmd_sweep_lambda)

    serve = sub.add_parser("serve", help="sobe a API HTTP")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(message)s",
    )
    try:
        args.handler(args, Storage())
    except QSummError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except ValidationError as e:
        logger.error(f"Entrada inválida: {e}")
        return InvalidInput.exit_code
    except OSError as e:
        logger.error(f"Erro de arquivo: {e}")
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
