"""Exception types shared across the package."""


class SchemaError(ValueError):
    """A document does not match the expected file schema.

    The message is path-qualified, e.g. ``"points[2].d1: expected a number"``.
    """


class InvalidInstanceError(ValueError):
    """An instance failed semantic validation.

    Carries the full :class:`~emsopt.instance.ValidationReport` in
    ``report`` so callers can show every violation, not just the first.
    """

    def __init__(self, report):
        self.report = report
        super().__init__("invalid instance: " + "; ".join(report.errors))


class EnumerationLimitError(RuntimeError):
    """Exhaustive enumeration would exceed the hard size guard."""
