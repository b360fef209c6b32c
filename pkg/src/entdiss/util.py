import sys


class UserError(Exception):
    pass


class VerificationFailed(Exception):
    pass


class SolverGaveUp(Exception):
    pass


class InternalError(Exception):
    pass


quiet = False


def log_step(message: str) -> None:
    if quiet:
        return
    print("+", message, file=sys.stderr)
    sys.stderr.flush()
