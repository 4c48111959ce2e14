"""Dense nonnegative matrices and the dataset wrapper used by every solver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, DomainError, NumericError, ShapeError


class NonNegMatrix:
    """Immutable dense row-major float64 matrix with every entry >= 0.

    Negative or non-finite input is rejected at construction; nothing is
    clamped here. ``np.asarray(m)`` returns a read-only view of the data.
    """

    __slots__ = ("_data",)

    def __init__(self, data, *, copy: bool = True):
        if copy:
            arr = np.array(data, dtype=np.float64, order="C")
        else:
            arr = np.ascontiguousarray(data, dtype=np.float64)
        if arr.ndim != 2:
            raise ShapeError(f"expected a 2-D matrix, got {arr.ndim}-D input")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"matrix dimensions must be positive, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NumericError("matrix contains NaN or Inf")
        if np.any(arr < 0):
            i, j = np.argwhere(arr < 0)[0]
            raise DomainError(f"negative entry {arr[i, j]!r} at ({i}, {j})")
        arr.flags.writeable = False
        self._data = arr

    @classmethod
    def from_rows(cls, rows: int, cols: int, data) -> NonNegMatrix:
        """Build from a flat row-major sequence of ``rows * cols`` values."""
        flat = np.asarray(data, dtype=np.float64).ravel()
        if rows * cols != flat.size:
            raise ShapeError(f"{rows}x{cols} needs {rows * cols} values, got {flat.size}")
        return cls(flat.reshape(rows, cols))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> NonNegMatrix:
        return cls(np.zeros((rows, cols)), copy=False)

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape

    @property
    def data(self) -> np.ndarray:
        """Flat row-major values (a copy)."""
        return self._data.ravel().copy()

    def to_numpy(self) -> np.ndarray:
        """Writable copy of the matrix."""
        return self._data.copy()

    def __array__(self, dtype=None, copy=None):
        if dtype is None or np.dtype(dtype) == self._data.dtype:
            return self._data.copy() if copy else self._data
        return self._data.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, NonNegMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._data, other._data))

    __hash__ = None

    def __repr__(self):
        return f"NonNegMatrix({self.rows}x{self.cols})"


def as_array(m) -> np.ndarray:
    """2-D float64 view of a NonNegMatrix, Dataset or array-like."""
    if isinstance(m, Dataset):
        m = m.x
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class Dataset:
    """Data matrix of ``L`` bands by ``T`` samples, optionally image-shaped."""

    x: NonNegMatrix
    grid: tuple[int, int] | None = None

    def __post_init__(self):
        if not isinstance(self.x, NonNegMatrix):
            object.__setattr__(self, "x", NonNegMatrix(self.x))
        if self.grid is not None:
            h, w = self.grid
            if h < 1 or w < 1 or h * w != self.sample_count:
                raise ShapeError(
                    f"grid {h}x{w} inconsistent with {self.sample_count} samples")

    @property
    def band_count(self) -> int:
        return self.x.rows

    @property
    def sample_count(self) -> int:
        return self.x.cols

    @classmethod
    def from_cube(cls, cube) -> Dataset:
        """Flatten a (height, width, bands) cube into bands x pixels, row-major over pixels."""
        cube = np.asarray(cube, dtype=np.float64)
        if cube.ndim != 3:
            raise ShapeError(f"expected a (height, width, bands) cube, got shape {cube.shape}")
        h, w, bands = cube.shape
        return cls(NonNegMatrix(cube.reshape(h * w, bands).T), grid=(h, w))


def column(m, j: int) -> np.ndarray:
    arr = as_array(m)
    cols = arr.shape[1]
    if not 0 <= j < cols:
        raise BoundsError(f"column index {j} out of range for {cols} columns")
    return arr[:, j].copy()


def matmul(a, b) -> NonNegMatrix:
    a_arr, b_arr = as_array(a), as_array(b)
    if a_arr.shape[1] != b_arr.shape[0]:
        raise ShapeError(f"cannot multiply {a_arr.shape} by {b_arr.shape}")
    return NonNegMatrix(a_arr @ b_arr, copy=False)


def frobenius_sq_diff(a, b) -> float:
    a_arr, b_arr = as_array(a), as_array(b)
    if a_arr.shape != b_arr.shape:
        raise ShapeError(f"shape mismatch: {a_arr.shape} vs {b_arr.shape}")
    diff = a_arr - b_arr
    return float(np.sum(diff * diff))
