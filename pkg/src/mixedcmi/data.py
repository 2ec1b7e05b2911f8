"""Typed tabular samples and the X/Y/Z role split consumed by every estimator.

A :class:`Dataset` stores its cells in one read-only ``float64`` matrix.
Numeric columns (continuous or discrete) hold their values directly;
categorical columns hold integer codes into a per-column alphabet, recorded
in order of first appearance. The metric only distinguishes categorical
columns (0/1 distance) from numeric ones (absolute difference).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np


class DataValidationError(ValueError):
    """Raised when raw cells cannot form a valid :class:`Dataset`."""


class ColumnKind(enum.Enum):
    CONTINUOUS = "cont"
    DISCRETE = "disc"
    CATEGORICAL = "cat"

    @property
    def is_numeric(self) -> bool:
        return self is not ColumnKind.CATEGORICAL

    @classmethod
    def parse(cls, token: str) -> "ColumnKind":
        aliases = {
            "cont": cls.CONTINUOUS,
            "continuous": cls.CONTINUOUS,
            "disc": cls.DISCRETE,
            "discrete": cls.DISCRETE,
            "cat": cls.CATEGORICAL,
            "categorical": cls.CATEGORICAL,
        }
        try:
            return aliases[token.strip().lower()]
        except KeyError:
            raise DataValidationError(f"unknown column kind {token!r}") from None


# A cell is a float for numeric columns and a str for categorical ones.
MixedValue = Union[float, str]


@dataclass(frozen=True)
class Column:
    name: str
    kind: ColumnKind
    alphabet: tuple[str, ...] = ()


def _parse_numeric(raw, row: int, col: int) -> float:
    if isinstance(raw, bool):
        raise DataValidationError(f"row {row}, column {col}: boolean in numeric column")
    if isinstance(raw, (int, float, np.integer, np.floating)):
        value = float(raw)
    else:
        text = str(raw).strip()
        try:
            value = float(text)
        except ValueError:
            raise DataValidationError(
                f"row {row}, column {col}: {raw!r} is not a number"
            ) from None
    if not math.isfinite(value):
        raise DataValidationError(f"row {row}, column {col}: non-finite value {raw!r}")
    return value


class Dataset:
    """Immutable n x d sample with typed columns.

    Build instances with :func:`build_dataset` (raw cells) or
    :meth:`Dataset.from_arrays` (already-numeric columns).
    """

    __slots__ = ("_columns", "_values")

    def __init__(self, columns: Sequence[Column], values: np.ndarray):
        values = np.array(values, dtype=float, copy=True)
        if values.ndim != 2 or values.shape[1] != len(columns):
            raise DataValidationError("value matrix does not match the column list")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise DataValidationError("a dataset needs at least one row and one column")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise DataValidationError(f"row {bad[0]}, column {bad[1]}: non-finite value")
        for j, col in enumerate(columns):
            if col.kind is ColumnKind.CATEGORICAL:
                codes = values[:, j]
                if np.any(codes != np.round(codes)) or np.any(codes < 0) or np.any(
                    codes >= len(col.alphabet)
                ):
                    raise DataValidationError(
                        f"column {j} ({col.name}): categorical code outside its alphabet"
                    )
        values.setflags(write=False)
        self._columns = tuple(columns)
        self._values = values

    @classmethod
    def from_arrays(cls, names: Sequence[str], kinds: Sequence[ColumnKind], arrays):
        """Build from per-column arrays; categorical arrays may hold any hashable labels."""
        if not (len(names) == len(kinds) == len(arrays)):
            raise DataValidationError("names, kinds and arrays differ in length")
        columns = []
        mat = []
        for j, (name, kind, arr) in enumerate(zip(names, kinds, arrays)):
            arr = np.asarray(arr)
            if kind is ColumnKind.CATEGORICAL:
                labels = [str(v) for v in arr.tolist()]
                alphabet = tuple(dict.fromkeys(labels))
                index = {s: c for c, s in enumerate(alphabet)}
                mat.append(np.array([index[s] for s in labels], dtype=float))
                columns.append(Column(name, kind, alphabet))
            else:
                mat.append(np.asarray(arr, dtype=float))
                columns.append(Column(name, kind))
        lengths = {len(a) for a in mat}
        if len(lengths) != 1:
            raise DataValidationError("columns have different lengths")
        return cls(columns, np.column_stack(mat))

    @property
    def columns(self) -> tuple[Column, ...]:
        return self._columns

    @property
    def names(self) -> list[str]:
        return [c.name for c in self._columns]

    @property
    def kinds(self) -> list[ColumnKind]:
        return [c.kind for c in self._columns]

    @property
    def n(self) -> int:
        return self._values.shape[0]

    @property
    def d(self) -> int:
        return self._values.shape[1]

    @property
    def values(self) -> np.ndarray:
        """Read-only encoded matrix (categorical columns as codes)."""
        return self._values

    @property
    def categorical_mask(self) -> np.ndarray:
        return np.array([c.kind is ColumnKind.CATEGORICAL for c in self._columns])

    @property
    def all_numeric(self) -> bool:
        return not self.categorical_mask.any()

    def cell(self, i: int, j: int):
        value = self._values[i, j]
        col = self._columns[j]
        if col.kind is ColumnKind.CATEGORICAL:
            return col.alphabet[int(value)]
        return float(value)

    def row(self, i: int) -> list:
        return [self.cell(i, j) for j in range(self.d)]

    def rows(self) -> list[list]:
        return [self.row(i) for i in range(self.n)]

    def index_of(self, name: str) -> int:
        for j, col in enumerate(self._columns):
            if col.name == name:
                return j
        raise KeyError(f"no column named {name!r}")

    def project(self, cols: Iterable[int]) -> "Dataset":
        return project(self, cols)

    def take_rows(self, order: Sequence[int]) -> "Dataset":
        """Dataset with rows reordered or subset by ``order``."""
        return Dataset(self._columns, self._values[np.asarray(order, dtype=int)])

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self._columns == other._columns and np.array_equal(
            self._values, other._values
        )

    def __hash__(self):
        return hash((self._columns, self._values.tobytes()))

    def __repr__(self):
        kinds = ",".join(k.value for k in self.kinds)
        return f"Dataset(n={self.n}, d={self.d}, kinds={kinds})"


def build_dataset(columns: Sequence[tuple[str, ColumnKind]], rows: Sequence[Sequence]) -> Dataset:
    """Validate raw cells and build a :class:`Dataset`.

    Numeric cells may be numbers or numeral strings (scientific notation
    allowed). Categorical cells are taken verbatim as strings. Errors name
    the offending row and column.
    """
    columns = [(name, ColumnKind(kind) if not isinstance(kind, ColumnKind) else kind)
               for name, kind in columns]
    d = len(columns)
    if d == 0:
        raise DataValidationError("no columns declared")
    if len(rows) == 0:
        raise DataValidationError("no rows")
    alphabets: list[dict[str, int]] = [{} for _ in range(d)]
    mat = np.empty((len(rows), d), dtype=float)
    for i, raw_row in enumerate(rows):
        if len(raw_row) != d:
            raise DataValidationError(f"row {i}: expected {d} cells, found {len(raw_row)}")
        for j, raw in enumerate(raw_row):
            kind = columns[j][1]
            if kind is ColumnKind.CATEGORICAL:
                if raw is None:
                    raise DataValidationError(f"row {i}, column {j}: missing categorical value")
                symbol = raw if isinstance(raw, str) else str(raw)
                code = alphabets[j].setdefault(symbol, len(alphabets[j]))
                mat[i, j] = code
            else:
                if raw is None:
                    raise DataValidationError(f"row {i}, column {j}: missing value")
                mat[i, j] = _parse_numeric(raw, i, j)
    cols = [
        Column(name, kind, tuple(alphabets[j]) if kind is ColumnKind.CATEGORICAL else ())
        for j, (name, kind) in enumerate(columns)
    ]
    return Dataset(cols, mat)


def project(ds: Dataset, cols: Iterable[int]) -> Dataset:
    """Dataset restricted to ``cols`` (in the given order), rows unchanged."""
    cols = list(cols)
    if not cols:
        raise DataValidationError("projection needs at least one column")
    for c in cols:
        if not (0 <= c < ds.d):
            raise DataValidationError(f"column index {c} out of range for d={ds.d}")
    if len(set(cols)) != len(cols):
        raise DataValidationError("projection repeats a column")
    return Dataset([ds.columns[c] for c in cols], ds.values[:, cols])


@dataclass(frozen=True)
class RoleAssignment:
    """Partition of column indices into X, Y and (possibly empty) Z groups."""

    x_cols: tuple[int, ...]
    y_cols: tuple[int, ...]
    z_cols: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "x_cols", tuple(int(c) for c in self.x_cols))
        object.__setattr__(self, "y_cols", tuple(int(c) for c in self.y_cols))
        object.__setattr__(self, "z_cols", tuple(int(c) for c in self.z_cols))
        if not self.x_cols or not self.y_cols:
            raise DataValidationError("X and Y must each name at least one column")
        groups = [set(self.x_cols), set(self.y_cols), set(self.z_cols)]
        if sum(map(len, groups)) != len(groups[0] | groups[1] | groups[2]):
            raise DataValidationError("X, Y and Z columns must be pairwise disjoint")
        if any(len(g) != len(t) for g, t in zip(groups, (self.x_cols, self.y_cols, self.z_cols))):
            raise DataValidationError("a role lists the same column twice")

    @property
    def is_mi(self) -> bool:
        return not self.z_cols

    @property
    def xz(self) -> tuple[int, ...]:
        return self.x_cols + self.z_cols

    @property
    def yz(self) -> tuple[int, ...]:
        return self.y_cols + self.z_cols

    @property
    def joint(self) -> tuple[int, ...]:
        return self.x_cols + self.y_cols + self.z_cols

    def swapped(self) -> "RoleAssignment":
        return RoleAssignment(self.y_cols, self.x_cols, self.z_cols)

    def validate(self, ds: Dataset) -> None:
        for c in self.joint:
            if not (0 <= c < ds.d):
                raise DataValidationError(f"role column {c} out of range for d={ds.d}")

    @classmethod
    def from_names(cls, ds: Dataset, x: Sequence[str], y: Sequence[str], z: Sequence[str] = ()):
        try:
            return cls(
                tuple(ds.index_of(s) for s in x),
                tuple(ds.index_of(s) for s in y),
                tuple(ds.index_of(s) for s in z),
            )
        except KeyError as exc:
            raise DataValidationError(str(exc.args[0])) from None
