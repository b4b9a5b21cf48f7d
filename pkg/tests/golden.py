"""Published coefficients of the four-state reduction of the benchmark chain.

Each entry is ``(m^0, m^1, m^2)``, as printed (three significant figures).
"""

import numpy as np

A4 = np.array([
    [(-0.218, 0.255, -0.28), (2.06, -0.84, 0.504),
     (0.181, -0.193, 0.198), (-0.862, 0.745, -0.648)],
    [(-2.06, 0.84, -0.504), (-0.0799, 0.0548, -0.0393),
     (-1.07, 1.05, -1.01), (0.103, -0.0808, 0.0653)],
    [(0.181, -0.193, 0.198), (1.07, -1.05, 1.01),
     (-0.155, 0.149, -0.143), (4.91, -2.14, 1.39)],
    [(0.862, -0.745, 0.648), (0.103, -0.0808, 0.0653),
     (-4.91, 2.14, -1.39), (-0.134, 0.119, -0.106)],
])

B4 = np.array([
    [(-0.143, 0.0505, -0.0362)],
    [(-0.0813, 0.00639, 3.95e-4)],
    [(0.102, -0.0239, 0.0135)],
    [(0.0922, -0.0167, 0.00731)],
])

C4 = np.array([
    [(-0.143, 0.0505, -0.0362), (0.0813, -0.00639, -3.95e-4),
     (0.102, -0.0239, 0.0135), (-0.0922, 0.0167, -0.00731)],
])


def coefficient_stack(series):
    """``(rows, cols, order+1)`` array from a :class:`MatrixSeries`."""
    return np.stack([np.asarray(c) for c in series], axis=-1)


def round_sig(x, digits=3):
    x = np.asarray(x, dtype=float)
    mag = np.floor(np.log10(np.where(x == 0, 1.0, np.abs(x))))
    scale = 10.0 ** (digits - 1 - mag)
    return np.round(x * scale) / scale


def sign_flips(B):
    """State signs ``d`` that bring the constant terms of ``B`` onto the
    published ones."""
    return np.where(np.asarray(B)[:, 0, 0] * B4[:, 0, 0] < 0, -1.0, 1.0)


def aligned(reduced):
    """Coefficient stacks of ``reduced`` after the state change ``diag(d)``."""
    d = sign_flips(coefficient_stack(reduced.B))
    A = coefficient_stack(reduced.A) * d[:, None, None] * d[None, :, None]
    B = coefficient_stack(reduced.B) * d[:, None, None]
    C = coefficient_stack(reduced.C) * d[None, :, None]
    return A, B, C, d


def sig_fig_mismatches(ours, published, digits=3):
    """Entries whose value does not round to the published one.

    A half-unit slack in the last printed digit absorbs ties.
    """
    unit = 10.0 ** (np.floor(np.log10(np.abs(published))) - (digits - 1))
    bad = np.abs(ours - published) > 0.5 * unit * (1 + 1e-9)
    return np.argwhere(bad)
