"""
Exception hierarchy for the fibration toolkit
"""


class DblcatError(Exception):
    """Base class for every error raised by the package"""


class ResourceLimitExceeded(DblcatError):
    """An enumeration produced more cells than the configured cap"""

    def __init__(self, what: str, limit: int):
        super().__init__(f"{what}: enumeration exceeded the cap of {limit} cells "
                         f"(raise DBLCAT_MAX_CELLS or --max-cells)")
        self.what = what
        self.limit = limit


class NotCertifiedError(DblcatError):
    """A functor does not satisfy the fibration condition an operation needs"""

    def __init__(self, message: str, failures=None):
        super().__init__(message)
        self.failures = list(failures or [])


class LiftUniquenessError(DblcatError):
    """A lift that must exist uniquely is missing or ambiguous"""

    def __init__(self, problem, found):
        super().__init__(f"expected a unique lift for {problem!r}, found {len(found)}")
        self.problem = problem
        self.found = list(found)


class CleavageError(DblcatError):
    """A cleavage is missing an entry or fails to compose strictly"""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class SchemaError(DblcatError):
    """An instance file does not match the dblcat/1 schema"""


class CellNotFound(DblcatError, KeyError):
    """A named cell is not part of the structure it was looked up in"""

    def __init__(self, kind: str, cell):
        super().__init__(f"{kind} {cell!r} not found")
        self.kind = kind
        self.cell = cell

    def __str__(self):
        return self.args[0]


class OutsideWindowError(DblcatError, ValueError):
    """A kernel was asked for a degree beyond its window"""

    def __init__(self, degree, window):
        super().__init__(f"degree {degree} is outside the kernel window {window}")
        self.degree = degree
        self.window = window


class InvalidStructureError(DblcatError, ValueError):
    """Input tables violate a law the operation relies on"""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
