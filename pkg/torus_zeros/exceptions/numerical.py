from torus_zeros.exceptions.base import TorusZerosException


class NumericalException(TorusZerosException):
    """
    Base for numerical evaluation errors.

    Use for ANY failure of the numerical layer on a valid input:
      - Series evaluation below the precision floor
      - Evaluation at or next to a lattice point
      - Iterations that do not converge
      - Contour integrals that do not settle

    """

    default_exit_code = 3
    default_user_message = "A numerical evaluation failed"
    default_technical_message = "Numerical evaluation failed"


class PrecisionException(NumericalException):
    """
    Raised when an evaluation would silently lose precision.

    Examples:
      - Im tau below the configured floor
      - theta series would need more terms than the configured depth
    """

    default_user_message = "Evaluation outside the double precision window"
    default_technical_message = "Precision floor violated"

    def __init__(self, im: float = None, floor: float = None, reason: str = None, **kwargs):
        super().__init__(**kwargs)
        if im is not None and floor is not None:
            self.user_message = (
                f"Im tau = {im:g} is below the precision floor {floor:g}"
            )
            self.technical_message = f"Im tau {im!r} < min_im {floor!r}"
            self.extras["im"] = im
            self.extras["floor"] = floor
        if reason:
            self.technical_message = f"Precision floor violated: {reason}"
            self.extras["reason"] = reason


class DomainException(NumericalException):
    default_user_message = "Argument outside the evaluation domain"
    default_technical_message = "Domain error"

    def __init__(self, reason: str = None, **kwargs):
        super().__init__(**kwargs)
        if reason:
            self.user_message = f"Argument outside the evaluation domain: {reason}"
            self.technical_message = f"Domain error: {reason}"
            self.extras["reason"] = reason


class LatticePointException(DomainException):
    """
    Raised when z is within lattice_eps of a lattice point.

    Usage:
        if distance < eps:
            raise LatticePointException(z=z, tau=tau, distance=distance, eps=eps)
    """

    def __init__(self, distance: float = None, eps: float = None, **kwargs):
        super().__init__(**kwargs)
        self.user_message = "z is (numerically) a lattice point; the function has a pole there"
        self.technical_message = (
            f"Distance to lattice {distance!r} below lattice_eps {eps!r}"
        )
        self.extras["distance"] = distance
        self.extras["eps"] = eps


class ConvergenceException(NumericalException):
    """
    Raised when an iteration stops without meeting its tolerance.

    The best candidate seen is attached so callers can decide whether to
    retry from it.
    """

    default_user_message = "Iteration did not converge"
    default_technical_message = "No root found"

    def __init__(
        self,
        iterations: int = None,
        best_candidate: complex = None,
        residual: float = None,
        **kwargs,
    ):
        super().__init__(**kwargs)
        self.best_candidate = best_candidate
        self.residual = residual
        self.technical_message = (
            f"No root after {iterations} iterations "
            f"(best={best_candidate!r}, residual={residual!r})"
        )
        self.extras["iterations"] = iterations
        self.extras["best_candidate"] = best_candidate
        self.extras["residual"] = residual


class BoundaryTooCloseException(NumericalException):
    default_user_message = "A zero lies on the contour; nudging the rectangle did not help"
    default_technical_message = "Boundary too close to a zero"

    def __init__(self, rect=None, nudges: int = None, **kwargs):
        super().__init__(**kwargs)
        self.technical_message = f"|f| dipped on the boundary of {rect} after {nudges} nudges"
        self.extras["rect"] = rect
        self.extras["nudges"] = nudges


class NonIntegerWindingException(NumericalException):
    default_user_message = "The argument-principle integral did not settle on an integer"
    default_technical_message = "Non-integer winding"

    def __init__(self, value: complex = None, rect=None, **kwargs):
        super().__init__(**kwargs)
        self.technical_message = f"Winding integral {value!r} on {rect} not within 0.25 of an integer"
        self.extras["value"] = value
        self.extras["rect"] = rect


class MaxDepthException(NumericalException):
    default_user_message = "Zero isolation exceeded the maximum subdivision depth"
    default_technical_message = "Max depth reached"

    def __init__(self, depth: int = None, rect=None, winding: int = None, **kwargs):
        super().__init__(**kwargs)
        self.technical_message = (
            f"Cell {rect} still has winding {winding} at depth {depth}"
        )
        self.extras["depth"] = depth
        self.extras["rect"] = rect
        self.extras["winding"] = winding


class SingularInputException(NumericalException):
    default_user_message = "Input is singular for this transformation"
    default_technical_message = "Singular input"

    def __init__(self, reason: str = None, **kwargs):
        super().__init__(**kwargs)
        if reason:
            self.user_message = f"Input is singular: {reason}"
            self.technical_message = f"Singular input: {reason}"
            self.extras["reason"] = reason
