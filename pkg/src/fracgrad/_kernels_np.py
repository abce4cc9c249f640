"""Pure-numpy fallback for the hot summation kernels.

The direct singular-integral quadratures reduce to circular convolutions of
a field with a precomputed displacement-kernel table, so the fallback
evaluates the same sums through real FFTs.  The compiled extension in
``_kernels.pyx`` performs the identical sums with explicit loops; the two
implementations agree to rounding error and are interchangeable.
"""

import numpy as np


def circular_convolve(u, kernel):
    """sum_k kernel[k] * u[(x - k) mod N] for every multi-index x."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    kernel = np.ascontiguousarray(kernel, dtype=np.float64)
    if u.shape != kernel.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {kernel.shape}")
    out = np.fft.irfftn(np.fft.rfftn(u) * np.fft.rfftn(kernel), s=u.shape)
    return np.ascontiguousarray(out)


def weighted_abs_diff_sum(u, weight):
    """sum over displacements k of weight[k] * sum_x |u(x) - u(x + k)|."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    weight = np.ascontiguousarray(weight, dtype=np.float64)
    if u.shape != weight.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {weight.shape}")
    total = 0.0
    wflat = weight.ravel()
    for flat in np.flatnonzero(wflat):
        k = np.unravel_index(flat, weight.shape)
        shifted = np.roll(u, shift=tuple(-ki for ki in k), axis=tuple(range(u.ndim)))
        total += wflat[flat] * float(np.abs(u - shifted).sum())
    return total
