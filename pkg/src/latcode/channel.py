"""Seeded channel simulators: real/complex AWGN and fast Rayleigh fading.

Reproducibility contract: a (master_seed, trial_index) pair fully determines
one channel realization via a counter-based Philox generator keyed by
(master_seed, 4*trial_index + stream), with stream 0 for fading, stream 1
for noise, and stream 2 reserved for message selection in simulation
drivers.  Realizations are independent of execution order or thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

AWGN_REAL = "awgn_real"
AWGN_COMPLEX = "awgn_complex"
RAYLEIGH_REAL = "rayleigh_real"
RAYLEIGH_COMPLEX = "rayleigh_complex"
MODELS = (AWGN_REAL, AWGN_COMPLEX, RAYLEIGH_REAL, RAYLEIGH_COMPLEX)

_STREAM_FADING = 0
_STREAM_NOISE = 1
STREAM_MESSAGE = 2  # reserved for codeword selection in simulation drivers


@dataclass(frozen=True)
class ChannelRealization:
    fading: np.ndarray
    noise: np.ndarray
    model: str
    seed_path: tuple[int, int]

    @property
    def is_fading(self) -> bool:
        return self.model in (RAYLEIGH_REAL, RAYLEIGH_COMPLEX)


def stream_rng(master_seed: int, trial_index: int, stream: int) -> np.random.Generator:
    """Counter-based generator for one (seed, trial, stream) triple."""
    return np.random.Generator(
        np.random.Philox(key=(master_seed, 4 * trial_index + stream)))


_rng = stream_rng


def _complex_std_normal(rng: np.random.Generator, n: int) -> np.ndarray:
    # variance 1/2 per real dimension, so E|z|^2 = 1
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)


def sample_realization(model: str, n: int, master_seed: int,
                       trial_index: int, noise_scale: float = 1.0) -> ChannelRealization:
    """Draw the fading and noise vectors for one block of length n."""
    if model not in MODELS:
        raise ValueError(f"unknown channel model {model!r}")
    frng = _rng(master_seed, trial_index, _STREAM_FADING)
    nrng = _rng(master_seed, trial_index, _STREAM_NOISE)
    if model == AWGN_REAL:
        fading = np.ones(n)
        noise = nrng.standard_normal(n)
    elif model == AWGN_COMPLEX:
        fading = np.ones(n, dtype=complex)
        noise = _complex_std_normal(nrng, n)
    elif model == RAYLEIGH_COMPLEX:
        fading = _complex_std_normal(frng, n)
        noise = _complex_std_normal(nrng, n)
    else:  # RAYLEIGH_REAL
        fading = np.abs(_complex_std_normal(frng, n))
        noise = nrng.standard_normal(n)
    return ChannelRealization(fading=fading, noise=noise * noise_scale,
                              model=model, seed_path=(master_seed, trial_index))


def transmit(s, model: str, master_seed: int, trial_index: int,
             noise_scale: float = 1.0):
    """Send codeword s through the channel: y_i = fading_i * s_i + w_i.

    ``noise_scale`` is a test hook (0.0 disables noise); the production noise
    variance conventions are fixed by the model.
    """
    s = np.asarray(s)
    real = model in (AWGN_REAL, RAYLEIGH_REAL)
    if real and np.iscomplexobj(s) and np.max(np.abs(s.imag)) > 0:
        raise ValueError(f"real model {model} needs a real codeword")
    if not real:
        s = s.astype(complex)
    realization = sample_realization(model, len(s), master_seed, trial_index,
                                     noise_scale=noise_scale)
    y = realization.fading * s + realization.noise
    return y, realization


def geometric_mean_statistic(realization: ChannelRealization) -> float:
    """V_n = (prod X_i)^(1/n) with X_i = |fading_i|^2."""
    x = np.abs(realization.fading) ** 2
    return float(np.exp(np.mean(np.log(x))))


def geometric_mean_samples(model: str, n: int, trials: int,
                           master_seed: int) -> np.ndarray:
    """V_n over ``trials`` seeded realizations (fading stream only)."""
    out = np.empty(trials)
    for t in range(trials):
        r = sample_realization(model, n, master_seed, t, noise_scale=0.0)
        out[t] = geometric_mean_statistic(r)
    return out
