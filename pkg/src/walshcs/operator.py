"""Matrix-free change-of-basis operator between Walsh samples and wavelets.

Entries are u[i, j] = <Wal(i, .), basis function j>, evaluated on a fine
dyadic grid of cell averages: synthesis tabulates the wavelet side as a
piecewise-constant surrogate at scale Q, and because Wal(i, .) with
i < 2^Q is constant on the grid cells, the sequency transform of that
surrogate gives the inner products exactly (the only error is the
surrogate itself, O(2^-(Q-R)) for order p >= 3 and zero for Haar).
Forward and adjoint applications are exact transposes of each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .walsh import fwht_sequency, ifwht_sequency
from .wavelets import LevelStructure, SignalExpansion, dwt_forward, dwt_inverse

SECTION_GUARD = 1 << 12


class SizeGuardError(ValueError):
    """Raised when a dense request exceeds the configured size guard."""


@dataclass
class MeasurementVector:
    """Walsh samples at an ordered index set, with a noise radius."""

    indices: np.ndarray
    values: np.ndarray
    delta: float = 0.0

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=float)
        if self.indices.shape != self.values.shape or self.indices.ndim != 1:
            raise ValueError("indices and values must be 1-D and equally long")
        if self.delta < 0:
            raise ValueError("noise radius must be non-negative")


def default_grid_exponent(levels):
    """Q large enough for all samples plus three octaves of margin on the
    reconstruction side."""
    return max(
        levels.N_r.bit_length() - 1,
        (levels.M_r.bit_length() - 1) + 3,
    )


class CobOperator:
    """Finite sections of the Walsh-by-wavelet change-of-basis operator.

    Rows are 0-based sequency indices (row 0 is the constant function);
    columns follow the level ordering: scaling block at J0 first, then
    wavelet levels.  Column count is levels.M_r; rows live below 2^Q.
    """

    def __init__(self, basis, levels, Q=None):
        if levels.J0 != basis.J0:
            raise ValueError("level structure and basis must share J0")
        self.basis = basis
        self.levels = levels
        q_min = default_grid_exponent(levels)
        self.Q = q_min if Q is None else int(Q)
        if self.Q < q_min:
            raise ValueError(f"grid exponent {self.Q} below required {q_min}")
        self.n_grid = 1 << self.Q
        self._column_cache = {}

    # -- fast paths ---------------------------------------------------------

    def synthesize(self, coeffs):
        """Grid cell averages of the expansion (length <= M_r, zero-padded)."""
        if isinstance(coeffs, SignalExpansion):
            coeffs = coeffs.coeffs
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.size > self.levels.M_r:
            raise ValueError("coefficient vector longer than the level structure")
        full = np.zeros(self.n_grid)
        full[: coeffs.size] = coeffs
        exp = SignalExpansion(
            levels=LevelStructure(self.levels.J0, self.Q - self.levels.J0),
            coeffs=full,
        )
        return dwt_inverse(exp, self.basis, self.Q)

    def apply(self, coeffs, omega):
        """Walsh samples of the synthesized expansion at the indices omega."""
        omega = self._check_omega(omega)
        return fwht_sequency(self.synthesize(coeffs))[omega]

    def apply_adjoint(self, values, omega, L=None):
        """Exact transpose of apply, truncated to the first L coefficients."""
        omega = self._check_omega(omega)
        values = np.asarray(values, dtype=float)
        if values.shape != omega.shape:
            raise ValueError("values and omega must have matching shapes")
        if L is None:
            L = self.levels.M_r
        grid = np.zeros(self.n_grid)
        grid[omega] = values
        exp = dwt_forward(ifwht_sequency(grid), self.basis)
        return exp.coeffs[:L]

    def _check_omega(self, omega):
        omega = np.asarray(omega, dtype=np.int64)
        if omega.ndim != 1:
            raise ValueError("omega must be a 1-D index set")
        if omega.size and (omega.min() < 0 or omega.max() >= self.n_grid):
            raise ValueError(f"omega indices must lie in [0, 2^{self.Q})")
        return omega

    # -- dense access -------------------------------------------------------

    def column(self, j):
        """Full column j over all 2^Q rows (cached)."""
        if not 0 <= j < self.levels.M_r:
            raise ValueError(f"column {j} outside the level structure")
        if j not in self._column_cache:
            if len(self._column_cache) * self.n_grid > (1 << 24):
                self._column_cache.clear()
            e = np.zeros(j + 1)
            e[j] = 1.0
            self._column_cache[j] = fwht_sequency(self.synthesize(e))
        return self._column_cache[j]

    def entry(self, i, j):
        """Single entry u[i, j] = <Wal(i,.), basis function j>."""
        if not 0 <= i < self.n_grid:
            raise ValueError(f"row {i} outside the tabulated range [0, 2^{self.Q})")
        return float(self.column(j)[i])

    def section_dense(self, N, M, row_offset=0):
        """Dense section of rows [row_offset, row_offset + N) and columns < M."""
        if N > SECTION_GUARD or M > SECTION_GUARD:
            raise SizeGuardError(
                f"requested {N} x {M} section exceeds the {SECTION_GUARD} guard"
            )
        if row_offset + N > self.n_grid or M > self.levels.M_r:
            raise ValueError("section outside the tabulated operator range")
        out = np.empty((N, M))
        for j in range(M):
            out[:, j] = self.column(j)[row_offset : row_offset + N]
        return out

    def rows_dense(self, row_indices, M):
        """Dense rows over the first M columns, via the adjoint path."""
        row_indices = np.asarray(row_indices, dtype=np.int64)
        if row_indices.size * M > SECTION_GUARD * SECTION_GUARD:
            raise SizeGuardError("requested row block exceeds the size guard")
        out = np.empty((row_indices.size, M))
        for a, i in enumerate(row_indices):
            out[a] = self.apply_adjoint(np.ones(1), np.array([i]), L=M)
        return out

    def column_norms_partial(self, N, M):
        """Norms of the first-N-row restriction of every column j < M,
        computed rowwise so M may exceed the dense-section guard."""
        if M > self.n_grid:
            raise ValueError("column range beyond the tabulated band")
        acc = np.zeros(M)
        for i in range(N):
            row = self.apply_adjoint(np.ones(1), np.array([i]), L=M)
            acc += row**2
        return np.sqrt(acc)


def write_matrix_csv(matrix, path):
    """RFC-4180-style CSV with '.' decimal separator, 17 significant digits."""
    matrix = np.asarray(matrix)
    with open(path, "w") as fh:
        for row in np.atleast_2d(matrix):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def write_pgm(matrix, path, clip_percentile=99.0):
    """8-bit binary PGM of |matrix|, dark = large magnitude.

    Magnitudes are clipped at the given percentile before scaling, which
    keeps a few dominant entries from washing out the block structure.
    """
    mags = np.abs(np.asarray(matrix, dtype=float))
    cap = np.percentile(mags, clip_percentile)
    if cap <= 0:
        cap = mags.max() if mags.max() > 0 else 1.0
    scaled = np.minimum(mags / cap, 1.0)
    pixels = (255 - np.round(255 * scaled)).astype(np.uint8)
    h, w = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())
