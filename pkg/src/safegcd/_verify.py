"""Runtime counterpart of the C debug-build VERIFY_CHECK assertions."""


class VerifyError(AssertionError):
    """A debug-mode invariant check failed."""


def verify_check(cond: bool, msg: str) -> None:
    if not cond:
        raise VerifyError(msg)
