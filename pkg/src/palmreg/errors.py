"""Exception hierarchy.

Every pipeline failure carries a short ``reason`` slug, which the batch
runner writes into the report as ``skipped:<reason>``.
"""


class PalmRegError(Exception):
    reason = "error"


class FormatError(PalmRegError, ValueError):
    reason = "format-error"


class EmptyInputError(PalmRegError, ValueError):
    reason = "empty-mask"


class DegenerateShapeError(PalmRegError, ValueError):
    reason = "degenerate-shape"


class InsufficientStructureError(PalmRegError, ValueError):
    reason = "insufficient-structure"


class DegenerateGeometryError(PalmRegError, ValueError):
    reason = "degenerate-geometry"


class AnnotationError(PalmRegError, ValueError):
    reason = "bad-annotation"


class SpecError(PalmRegError, ValueError):
    reason = "bad-spec"


class ConfigError(PalmRegError, ValueError):
    reason = "bad-config"
