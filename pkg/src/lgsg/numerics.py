"""Small numerical helpers used by the training code."""

import numpy as np


def sigmoid(x):
    """Numerically stable logistic function."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def log_sigmoid(x, floor=1e-12):
    """log(sigmoid(x)) with the argument clamped below by ``floor``."""
    return np.log(np.maximum(sigmoid(x), floor))


def sinusoidal_embedding(t, width):
    """Sin/cos positional features for an integer timestep.

    Even slots carry sines, odd slots cosines, with geometrically spaced
    frequencies, so nearby timesteps get nearby vectors.
    """
    half = width // 2
    freqs = np.exp(-np.log(10000.0) * np.arange(half) / max(half, 1))
    angles = float(t) * freqs
    emb = np.zeros(width, dtype=np.float64)
    emb[0 : 2 * half : 2] = np.sin(angles)
    emb[1 : 2 * half : 2] = np.cos(angles)
    return emb
