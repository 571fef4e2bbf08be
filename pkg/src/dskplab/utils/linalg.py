"""Exact linear algebra over fields of Python numbers (Fraction, GaussianRational, series).

Matrices are numpy object arrays so that row operations stay exact.
"""

from fractions import Fraction
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np

from dskplab.errors import SingularError
from dskplab.projective import is_zero


def as_matrix(rows: Sequence[Sequence[Any]]) -> np.ndarray:
    """Copy nested rows into a 2-D object array (0x0 for empty input); ints become Fractions."""
    rows = [list(r) for r in rows]
    if not rows:
        return np.empty((0, 0), dtype=object)
    matrix = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            matrix[i, j] = Fraction(entry) if isinstance(entry, int) else entry
    return matrix


def identity_matrix(n: int, one: Any = Fraction(1)) -> np.ndarray:
    matrix = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            matrix[i, j] = one if i == j else one * 0
    return matrix


def _swap_rows(matrix: np.ndarray, i: int, j: int) -> None:
    if i != j:
        matrix[[i, j]] = matrix[[j, i]]


def _find_pivot(
    matrix: np.ndarray, col: int, start: int, pivot_key: Optional[Callable[[Any], Any]]
) -> Optional[int]:
    candidates = [r for r in range(start, matrix.shape[0]) if not is_zero(matrix[r, col])]
    if not candidates:
        return None
    if pivot_key is None:
        return candidates[0]
    return min(candidates, key=lambda r: pivot_key(matrix[r, col]))


def determinant(rows, pivot_key: Optional[Callable[[Any], Any]] = None):
    """Determinant by Gaussian elimination.

    Args:
        rows: Square matrix (nested sequences or object array)
        pivot_key: Optional ranking of pivot candidates (smallest wins); the leftmost
            nonzero entry is used otherwise

    Returns:
        The determinant, in the entries' field
    """
    X = as_matrix(rows) if not isinstance(rows, np.ndarray) else rows.copy()
    n = X.shape[0]
    if n == 0:
        return 1
    det = 1
    for i in range(n):
        r = _find_pivot(X, i, i, pivot_key)
        if r is None:
            return X[i, i] * 0
        if r != i:
            _swap_rows(X, i, r)
            det = -det
        pivot = X[i, i]
        det = det * pivot
        for j in range(i + 1, n):
            if not is_zero(X[j, i]):
                factor = X[j, i] / pivot
                X[j, i:] = X[j, i:] - factor * X[i, i:]
    return det


def bareiss_determinant(rows: Sequence[Sequence[Any]]):
    """Fraction-free determinant for integral domains (e.g. MultiPoly entries).

    Entries must support exact division through ``/``.
    """
    M = [list(r) for r in rows]
    n = len(M)
    if n == 0:
        return 1
    sign = 1
    previous = 1
    for k in range(n - 1):
        if not M[k][k]:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return M[k][k] * 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                element = M[k][k] * M[i][j] - M[i][k] * M[k][j]
                if k != 0:
                    element = element / previous
                M[i][j] = element
        previous = M[k][k]
    return M[n - 1][n - 1] if sign > 0 else -M[n - 1][n - 1]


def inverse_matrix(rows) -> np.ndarray:
    """Gauss-Jordan inverse.

    Raises:
        SingularError: If the matrix is not invertible
    """
    X = as_matrix(rows) if not isinstance(rows, np.ndarray) else rows.copy()
    n = X.shape[0]
    if X.shape != (n, n):
        raise ValueError(f"Square matrix expected, got shape {X.shape}")
    Y = identity_matrix(n)

    # downward elimination: make lower triangle zero and main diagonal 1.
    for i in range(n):
        r = _find_pivot(X, i, i, None)
        if r is None:
            raise SingularError("matrix is not invertible")
        _swap_rows(X, i, r)
        _swap_rows(Y, i, r)
        pivot = X[i, i]
        Y[i, :] = Y[i, :] / pivot
        X[i, :] = X[i, :] / pivot
        for j in range(i + 1, n):
            if not is_zero(X[j, i]):
                factor = X[j, i]
                Y[j, :] = Y[j, :] - factor * Y[i, :]
                X[j, :] = X[j, :] - factor * X[i, :]

    # upward elimination: zero the upper triangle.
    for j in range(n - 2, -1, -1):
        for i in range(j + 1, n):
            if not is_zero(X[j, i]):
                factor = X[j, i]
                Y[j, :] = Y[j, :] - factor * Y[i, :]
                X[j, :] = X[j, :] - factor * X[i, :]
    return Y


def row_echelon(rows) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form and pivot columns, leftmost pivots first."""
    X = as_matrix(rows) if not isinstance(rows, np.ndarray) else rows.copy()
    n_rows, n_cols = X.shape
    pivots: List[int] = []
    row = 0
    for col in range(n_cols):
        if row >= n_rows:
            break
        r = _find_pivot(X, col, row, None)
        if r is None:
            continue
        _swap_rows(X, row, r)
        X[row, :] = X[row, :] / X[row, col]
        for other in range(n_rows):
            if other != row and not is_zero(X[other, col]):
                X[other, :] = X[other, :] - X[other, col] * X[row, :]
        pivots.append(col)
        row += 1
    return X, pivots


def nullspace(rows) -> List[List[Any]]:
    """Basis of the right kernel {v : M v = 0}, one vector per free column."""
    R, pivots = row_echelon(rows)
    n_cols = R.shape[1]
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v: List[Any] = [0] * n_cols
        v[f] = 1
        for r, p in enumerate(pivots):
            v[p] = -R[r, f]
        basis.append(v)
    return basis


def rank(rows) -> int:
    return len(row_echelon(rows)[1])


def matrix_product(left, right) -> np.ndarray:
    """Exact product of two object matrices."""
    L = as_matrix(left) if not isinstance(left, np.ndarray) else left
    R = as_matrix(right) if not isinstance(right, np.ndarray) else right
    result = np.empty((L.shape[0], R.shape[1]), dtype=object)
    for i in range(L.shape[0]):
        for j in range(R.shape[1]):
            total = 0
            for t in range(L.shape[1]):
                total = total + L[i, t] * R[t, j]
            result[i, j] = total
    return result
