"""Error types shared across the package.

Plain ValueError/KeyError are used for malformed arguments (unknown vertex
ids, bad shapes); the classes here mark failure modes callers may want to
catch and handle separately.
"""


class TreeAmalgError(Exception):
    pass


class CertificationError(TreeAmalgError):
    """A metric query touched a pair whose true distance is not certified."""

    def __init__(self, msg, pairs=None):
        super().__init__(msg)
        self.pairs = pairs or []


class CapacityError(TreeAmalgError):
    """An enumeration exceeded its configured cap."""

    def __init__(self, msg, count=None, cap=None):
        super().__init__(msg)
        self.count = count
        self.cap = cap


class GenerationError(TreeAmalgError):
    """A generator could not produce a graph it can vouch for."""


class ValidationError(TreeAmalgError):
    """An amalgamation spec failed validation; carries the full report."""

    def __init__(self, violations):
        super().__init__("invalid amalgamation spec: " + "; ".join(violations))
        self.violations = list(violations)


class PreconditionError(TreeAmalgError):
    """An operation was called outside its stated preconditions."""


class PartialResultError(TreeAmalgError):
    """Not enough of the input is certified to answer exactly.

    coverage is the fraction of required pairs that could be decided.
    """

    def __init__(self, msg, coverage):
        super().__init__(f"{msg} (coverage {coverage:.3f})")
        self.coverage = coverage


class SchemaError(TreeAmalgError):
    """A JSON document does not match its declared schema."""

    def __init__(self, msg, field=None):
        super().__init__(msg if field is None else f"{msg} (field: {field})")
        self.field = field
