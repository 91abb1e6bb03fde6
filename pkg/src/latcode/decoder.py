"""Naive lattice decoding and ML decoding with receiver-side channel knowledge.

Fading is folded into the lattice basis (never divided out), so zero or tiny
coefficients cannot blow up numerically; the closest-point kernel receives
the faded basis directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lattice
from .channel import ChannelRealization
from .codebook import Codebook

_MATCH_TOL = 1e-8


@dataclass(frozen=True)
class DecodeOutcome:
    decoded: np.ndarray
    is_codeword: bool
    correct: bool
    metric: float


def _matches(a, b) -> bool:
    return bool(np.max(np.abs(np.asarray(a) - np.asarray(b))) <= _MATCH_TOL)


def _in_codebook(point, codebook: Codebook) -> bool:
    d = np.max(np.abs(codebook.points - point), axis=1)
    return bool(d.min() <= _MATCH_TOL)


def nld_decode(y, realization: ChannelRealization, codebook: Codebook,
               transmitted) -> DecodeOutcome:
    """Closest point in the infinite shifted faded lattice.

    Decoding lands on shift + alpha*psi(x) for some algebraic integer x; a
    result outside the finite codebook counts as an error.
    """
    fading = realization.fading
    faded_basis = lattice.LatticeBasis(
        codebook.basis.ambient, codebook.basis.vectors * fading)
    target = np.asarray(y) - fading * codebook.shift
    _, coords = lattice.closest_vector_coords(faded_basis, target)
    decoded = codebook.shift + coords.astype(float) @ codebook.basis.vectors
    metric = float(np.sum(np.abs(np.asarray(y) - fading * decoded) ** 2))
    correct = _matches(decoded, transmitted)
    return DecodeOutcome(decoded=decoded,
                         is_codeword=_in_codebook(decoded, codebook),
                         correct=correct, metric=metric)


def ml_decode(y, realization: ChannelRealization, codebook: Codebook,
              transmitted) -> DecodeOutcome:
    """Exhaustive minimum-distance search over the finite codebook."""
    fading = realization.fading
    diffs = np.asarray(y)[None, :] - fading[None, :] * codebook.points
    metrics = np.sum(np.abs(diffs) ** 2, axis=1)
    idx = int(np.argmin(metrics))  # first index wins ties
    decoded = codebook.points[idx]
    return DecodeOutcome(decoded=decoded, is_codeword=True,
                         correct=_matches(decoded, transmitted),
                         metric=float(metrics[idx]))
