"""gentwist types library."""

__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"


from enum import Enum, unique
from typing import Any, Dict, List, Union

import numpy as np
import numpy.typing as npt

JSONValue = Union[str, int, float, bool, None, Dict[str, Any], List[Any]]

JSONDict = Dict[str, JSONValue]

Matrix = npt.NDArray[np.float64]

Point = npt.NDArray[np.float64]


@unique
class Suite(str, Enum):
    """Check suites."""

    LINALG = "linalg"
    COURANT = "courant"
    CONNECTION = "connection"
    CURVATURE = "curvature"
    TWISTOR = "twistor"
    THEOREMS = "theorems"
    EQUIVALENCE = "equivalence"


@unique
class Component(str, Enum):
    """Connected components of the generalized twistor space, by the orientations of (J1, J2)."""

    PP = "++"
    PM = "+-"
    MP = "-+"
    MM = "--"

    @classmethod
    def from_signs(cls, first: int, second: int) -> "Component":
        """Return component for a pair of orientation signs."""
        return cls(("+" if first > 0 else "-") + ("+" if second > 0 else "-"))

    @property
    def signs(self) -> tuple[int, int]:
        """Return orientation signs of J1 and J2."""
        return tuple(1 if char == "+" else -1 for char in self.value)  # type: ignore[return-value]

    @property
    def mixed(self) -> bool:
        """Return whether J1 and J2 induce opposite orientations."""
        return self.value[0] != self.value[1]


@unique
class Side(str, Enum):
    """Generalized metric eigenbundles."""

    PLUS = "+"
    MINUS = "-"


@unique
class ConnectionKind(str, Enum):
    """Connections handled by the connection coefficient container."""

    LEVI_CIVITA = "levi-civita"
    TORSION = "torsion"
    TORSION_OPPOSITE = "torsion-opposite"
    GENERALIZED = "generalized"


@unique
class ReportFormat(str, Enum):
    """Report output formats."""

    TEXT = "text"
    JSON = "json"


@unique
class Expectation(str, Enum):
    """Expected verdict outcome."""

    PASS = "pass"
    FAIL = "fail"


@unique
class RenderTarget(str, Enum):
    """Render target."""

    JSON = "json"
    TREE = "tree"
