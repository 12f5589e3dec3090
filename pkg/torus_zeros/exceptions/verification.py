from torus_zeros.exceptions.base import TorusZerosException


class VerificationException(TorusZerosException):
    """
    Base for verification errors.

    Use when the numbers are fine but contradict a statement the run is
    supposed to certify. A failed tolerance check is NOT an exception (it
    becomes pass=false in the report); these are the cases where a result
    cannot be produced at all.
    """

    default_exit_code = 1
    default_user_message = "Verification could not be completed"
    default_technical_message = "Verification failed"


class DisjointnessViolationException(VerificationException):
    """
    Raised when a traced curve comes closer to an orbit point than allowed.

    Usage:
        if margin <= required:
            raise DisjointnessViolationException(margin=margin, required=required, tau=nearest)
    """

    default_user_message = "Traced curve touches the orbit of rho"
    default_technical_message = "Disjointness margin violated"

    def __init__(self, margin: float = None, required: float = None, **kwargs):
        super().__init__(**kwargs)
        self.technical_message = (
            f"Curve-to-orbit distance {margin!r} not above required {required!r}"
        )
        self.extras["margin"] = margin
        self.extras["required"] = required


class AllPointsSkippedException(VerificationException):
    default_user_message = "Every point of the path was skipped"
    default_technical_message = "All path points skipped"

    def __init__(self, path_len: int = None, family: str = None, **kwargs):
        super().__init__(**kwargs)
        self.technical_message = (
            f"All {path_len} path points skipped for family {family}"
        )
        self.extras["path_len"] = path_len
        self.extras["family"] = family
