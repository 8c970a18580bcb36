"""NumPy implementation of the delay-recursion kernel.

Selected automatically when the compiled extension is unavailable. The
recursion couples sample i only to sample i - delay, so each contiguous
block of ``delay`` samples depends solely on the previous block and can be
computed with one vectorized step per block. The arithmetic per element is
identical to the compiled loop.
"""
from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def delay_recursion(drive, phase, t1, mu, delay):
    """Solve out[i] = t1 * drive[i] + mu * phase[i] * out[i - delay].

    Samples with i < delay see an empty cavity (out[i - delay] = 0).

    Parameters
    ----------
    drive : complex ndarray
        Input field samples, contiguous.
    phase : complex ndarray
        Per-sample round-trip phase factors exp(-i Phi(t_i)), same length.
    t1 : complex
        Input coupling.
    mu : complex
        Static round-trip factor.
    delay : int
        Round-trip delay in samples, >= 1.

    Returns
    -------
    complex ndarray
    """
    n = drive.shape[0]
    out = np.empty(n, dtype=np.complex128)
    base = t1 * drive
    loop = mu * phase
    out[: min(delay, n)] = base[: min(delay, n)]
    for start in range(delay, n, delay):
        stop = min(start + delay, n)
        out[start:stop] = base[start:stop] + loop[start:stop] * out[start - delay : stop - delay]
    return out
