"""Minimal dense linear algebra for the collocation system.

System sizes never exceed 3*(N+1) <= 63, so a textbook O(n^3) elimination
with partial pivoting is ample and keeps the pivot-failure diagnostics
under our control.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SINGULAR_PIVOT_FACTOR = 1e-13


class SingularSystemError(Exception):
    """Raised when elimination finds no usable pivot.

    Attributes
    ----------
    column : int
        Elimination column at which the pivot search failed.
    pivot : float
        Magnitude of the best available pivot.
    """

    def __init__(self, column: int, pivot: float):
        self.column = column
        self.pivot = pivot
        super().__init__(
            f"singular system: pivot magnitude {pivot:.3e} in column {column}"
        )


@dataclass
class AugmentedSystem:
    """Square system W @ A = G."""

    W: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=float)
        self.G = np.asarray(self.G, dtype=float)
        if self.W.ndim != 2 or self.W.shape[0] != self.W.shape[1]:
            raise ValueError(f"W must be square, got shape {self.W.shape}")
        if self.G.shape != (self.W.shape[0],):
            raise ValueError(
                f"G length {self.G.shape} does not match W size {self.W.shape[0]}"
            )

    @property
    def size(self) -> int:
        return self.W.shape[0]


def block_diagonal(blocks: list[np.ndarray]) -> np.ndarray:
    """Block-diagonal composition of square blocks; off-block entries exactly zero."""
    if not blocks:
        raise ValueError("block list must be non-empty")
    blocks = [np.asarray(b, dtype=float) for b in blocks]
    for b in blocks:
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ValueError(f"blocks must be square, got shape {b.shape}")
    size = sum(b.shape[0] for b in blocks)
    out = np.zeros((size, size))
    offset = 0
    for b in blocks:
        n = b.shape[0]
        out[offset:offset + n, offset:offset + n] = b
        offset += n
    return out


def gauss_solve(system: AugmentedSystem) -> np.ndarray:
    """Solve W @ A = G by Gauss elimination with partial (row) pivoting.

    A pivot whose magnitude falls below SINGULAR_PIVOT_FACTOR times the
    largest entry of the initial matrix signals rank deficiency.
    """
    W = np.array(system.W, dtype=float)
    G = np.array(system.G, dtype=float)
    n = W.shape[0]
    threshold = SINGULAR_PIVOT_FACTOR * np.abs(W).max()
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(W[col:, col])))
        pivot = abs(W[pivot_row, col])
        if pivot <= threshold:
            raise SingularSystemError(col, pivot)
        if pivot_row != col:
            W[[col, pivot_row]] = W[[pivot_row, col]]
            G[[col, pivot_row]] = G[[pivot_row, col]]
        factors = W[col + 1:, col] / W[col, col]
        W[col + 1:, col:] -= np.outer(factors, W[col, col:])
        G[col + 1:] -= factors * G[col]
    # back substitution
    A = np.zeros(n)
    for row in range(n - 1, -1, -1):
        A[row] = (G[row] - W[row, row + 1:] @ A[row + 1:]) / W[row, row]
    return A


def condition_estimate(W: np.ndarray) -> float:
    """Infinity-norm condition estimate ||W||_inf * ||W^{-1}||_inf.

    The inverse norm is obtained by solving against the unit basis vectors;
    exact for these small dense systems.
    """
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    inv_cols = np.column_stack(
        [gauss_solve(AugmentedSystem(W, np.eye(n)[:, j])) for j in range(n)]
    )
    norm = np.abs(W).sum(axis=1).max()
    inv_norm = np.abs(inv_cols).sum(axis=1).max()
    return float(norm * inv_norm)
