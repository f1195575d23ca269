"""Pure-numpy reference implementations of the hot kernels.

These are the fallback used when the compiled extension is unavailable and
the ground truth the extension is tested against.
"""

import numpy as np

BACKEND = "numpy"

# Gray-coded 4-PAM rail: symbol index 0..3 -> level, and index -> 2-bit Gray
# label (b1 b0).  Unit average symbol energy for the resulting 16-QAM grid.
_LEVELS = np.array([-3.0, -1.0, 1.0, 3.0]) / np.sqrt(10.0)
_GRAY = np.array([0, 1, 3, 2], dtype=np.uint8)
# popcount of a ^ b for 2-bit labels
_BITERR = np.array([[bin(a ^ b).count("1") for b in _GRAY] for a in _GRAY],
                   dtype=np.uint8)


def qam16_map(i_idx, q_idx):
    """Map per-axis level indices (0..3) to unit-energy 16-QAM symbols."""
    return _LEVELS[i_idx] + 1j * _LEVELS[q_idx]


def qam16_bit_errors(z, i_idx, q_idx):
    """Hard-decide noisy symbols and count Gray-label bit errors.

    z is the equalized complex observation; i_idx/q_idx are the transmitted
    level indices.  Returns the total number of wrong bits (0..4 per symbol).
    """
    zi = np.clip(np.rint((z.real * np.sqrt(10.0) + 3.0) / 2.0), 0, 3).astype(np.intp)
    zq = np.clip(np.rint((z.imag * np.sqrt(10.0) + 3.0) / 2.0), 0, 3).astype(np.intp)
    return int(_BITERR[zi, i_idx].sum() + _BITERR[zq, q_idx].sum())


def qam16_bit_errors_per_bin(z, i_idx, q_idx, out):
    """Like qam16_bit_errors for a (symbols, bins) block, accumulated per bin."""
    zi = np.clip(np.rint((z.real * np.sqrt(10.0) + 3.0) / 2.0), 0, 3).astype(np.intp)
    zq = np.clip(np.rint((z.imag * np.sqrt(10.0) + 3.0) / 2.0), 0, 3).astype(np.intp)
    errs = _BITERR[zi, i_idx].astype(np.int64) + _BITERR[zq, q_idx].astype(np.int64)
    out += errs.sum(axis=0)
    return int(errs.sum())


def render_gauss_pairs(n_samples, sample_rate, start_times, beta, delta_t):
    """Superpose Gaussian pulse pairs (unit peak) onto a zeroed envelope.

    Each pair occupies [t0, t0 + 2*delta_t]; the two humps sit at
    t0 + delta_t/2 and t0 + 3*delta_t/2 with exp(-beta*u^2/2) shape.
    """
    env = np.zeros(n_samples)
    span = int(np.ceil(2.0 * delta_t * sample_rate)) + 1
    for t0 in start_times:
        i0 = max(0, int(np.ceil(t0 * sample_rate)))
        i1 = min(n_samples, int(np.floor((t0 + 2.0 * delta_t) * sample_rate)) + 1)
        if i1 <= i0:
            continue
        t = np.arange(i0, i1) / sample_rate - t0
        env[i0:i1] += (np.exp(-beta * (t - delta_t / 2.0) ** 2 / 2.0)
                       + np.exp(-beta * (t - 3.0 * delta_t / 2.0) ** 2 / 2.0))
    del span
    return env


def render_rects(n_samples, sample_rate, start_times, width):
    """Superpose unit-amplitude rectangular pulses of the given width."""
    env = np.zeros(n_samples)
    for t0 in start_times:
        i0 = max(0, int(np.ceil(t0 * sample_rate)))
        i1 = min(n_samples, int(np.floor((t0 + width) * sample_rate)) + 1)
        if i1 > i0:
            env[i0:i1] += 1.0
    return env
