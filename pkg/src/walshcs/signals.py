"""Test signals rasterized as exact cell averages on dyadic grids.

Averaging each trigonometric piece in closed form keeps the Walsh samples of
the rasterized signal equal to the true integrals ``<f, Wal(n,.)>`` for every
sequency n below the grid size, and avoids aliasing the jump of the
discontinuous signal (which sits on a cell boundary for every Q >= 1).
"""

from __future__ import annotations

import numpy as np


def _cos_cell_averages(freq, Q):
    # average of cos(2*pi*freq*x) over cells [k/2^Q, (k+1)/2^Q)
    n = 1 << Q
    edges = np.arange(n + 1) / n
    s = np.sin(2.0 * np.pi * freq * edges)
    return (s[1:] - s[:-1]) * n / (2.0 * np.pi * freq)


def signal_smooth(Q):
    """cos(2 pi x) + 0.2 cos(10 pi x) as cell averages at scale Q."""
    return _cos_cell_averages(1.0, Q) + 0.2 * _cos_cell_averages(5.0, Q)


def signal_jump(Q):
    """cos(2 pi x) plus cos(10 pi x) switched on at x = 0.5, cell averages."""
    if Q < 1:
        raise ValueError("need Q >= 1 so the jump lies on a cell boundary")
    n = 1 << Q
    out = _cos_cell_averages(1.0, Q)
    high = _cos_cell_averages(5.0, Q)
    out[n // 2 :] += high[n // 2 :]
    return out


_BUILTIN = {"f": signal_smooth, "g": signal_jump}


def make_signal(name, Q):
    """Rasterize a built-in signal ('f' or 'g') or load one from a CSV file."""
    if name in _BUILTIN:
        return _BUILTIN[name](Q)
    values = np.loadtxt(name, delimiter=",", ndmin=1, dtype=float)
    if values.ndim != 1 or values.size != (1 << Q):
        raise ValueError(
            f"signal file {name!r} must hold one column of 2^{Q} values"
        )
    return values
