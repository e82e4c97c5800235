class QSummError(Exception):
    """
    Erro base do pipeline.

    Cada subclasse carrega um código de saída distinto para a CLI e o status HTTP
    usado pelas rotas.
    """

    exit_code: int = 1
    status_code: int = 500


class EmptyDocument(QSummError):
    exit_code = 10
    status_code = 422


class WordNotInSentence(QSummError):
    exit_code = 11
    status_code = 422


class DimensionMismatch(QSummError):
    exit_code = 12
    status_code = 422


class InvalidMatrix(DimensionMismatch):
    """Matriz de similaridade assimétrica ou com diagonal não nula."""

    exit_code = 13


class ZeroVector(QSummError):
    exit_code = 14
    status_code = 422


class ParseError(QSummError):
    exit_code = 15
    status_code = 422


class CountMismatch(QSummError):
    exit_code = 16
    status_code = 422


class InfeasibleConstraint(QSummError):
    exit_code = 17
    status_code = 422


class LengthMismatch(QSummError):
    exit_code = 18
    status_code = 422


class TooLarge(QSummError):
    exit_code = 19
    status_code = 413


class TooManyQubits(TooLarge):
    exit_code = 20


class IndexOutOfRange(QSummError):
    exit_code = 21
    status_code = 422


class ParamMismatch(QSummError):
    exit_code = 22
    status_code = 422


class EmptyInput(QSummError):
    exit_code = 23
    status_code = 422


class NoFeasiblePoint(QSummError):
    exit_code = 24
    status_code = 422


class DegenerateRange(QSummError):
    exit_code = 25
    status_code = 422


class EmptyReference(QSummError):
    exit_code = 26
    status_code = 422


class NoInConstraintMass(QSummError):
    exit_code = 27
    status_code = 422


class InvalidInput(QSummError):
    """Parâmetros de linha de comando ou de requisição rejeitados na validação."""

    exit_code = 28
    status_code = 422
