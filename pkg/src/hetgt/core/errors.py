"""Exception hierarchy shared by every hetgt package.

Each error carries the process exit code the CLI maps it to.
"""

from __future__ import annotations

# Exit codes ---------------------------------------------------------------

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4
EXIT_GRADCHECK = 5


class HetGTError(Exception):
    """Base class for all hetgt errors."""

    exit_code: int = EXIT_FAILURE


# ---------------------------------------------------------------------------
# Contract family (raised by kernels and layers)
# ---------------------------------------------------------------------------


class DimensionError(HetGTError, ValueError):
    """Operand shapes do not line up."""


class ContractError(HetGTError, ValueError):
    """A documented precondition was violated by the caller."""


class StructuralError(HetGTError, ValueError):
    """A graph or index structure is malformed (e.g. an empty segment)."""


class RangeError(HetGTError, IndexError):
    """An id or index is outside the valid range."""


# ---------------------------------------------------------------------------
# Configuration / data / numerics
# ---------------------------------------------------------------------------


class ConfigError(HetGTError, ValueError):
    """Invalid configuration (file, flag, or spec object)."""

    exit_code = EXIT_CONFIG

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None) -> None:
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{where}{message}")
        self.path = path
        self.line = line


class DataError(HetGTError, ValueError):
    """Dataset directory content is missing or inconsistent."""

    exit_code = EXIT_DATA

    def __init__(self, message: str, *, file: str | None = None, row: int | None = None) -> None:
        where = ""
        if file is not None:
            where = f"{file} (row {row}): " if row is not None else f"{file}: "
        super().__init__(f"{where}{message}")
        self.file = file
        self.row = row


class NumericalError(HetGTError, ArithmeticError):
    """A non-finite value appeared in a forward or backward computation."""

    exit_code = EXIT_NUMERICAL

    def __init__(
        self,
        message: str,
        *,
        op: str | None = None,
        layer: int | None = None,
        edge_type: str | None = None,
    ) -> None:
        parts = [f"{k}={v}" for k, v in (("op", op), ("layer", layer), ("edge_type", edge_type)) if v is not None]
        suffix = f" [{' '.join(parts)}]" if parts else ""
        super().__init__(f"{message}{suffix}")
        self.op = op
        self.layer = layer
        self.edge_type = edge_type

    def locate(self, *, layer: int | None = None, edge_type: str | None = None) -> NumericalError:
        """Return a copy of this error annotated with model position."""
        base = str(self.args[0]).split(" [", 1)[0]
        return NumericalError(
            base,
            op=self.op,
            layer=self.layer if layer is None else layer,
            edge_type=self.edge_type if edge_type is None else edge_type,
        )


class GradCheckError(HetGTError):
    """A gradient check exceeded its tolerance."""

    exit_code = EXIT_GRADCHECK
