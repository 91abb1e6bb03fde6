"""Carving finite power-constrained codes from shifted, scaled field lattices.

A code is the intersection of a ball of radius sqrt(n*P) with a shifted copy
of alpha * psi(O_K); the shift is found by seeded random search over the
fundamental parallelotope and certified by exact point counting.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import lattice
from .lattice import COMPLEX, LatticeBasis
from .numberfield import FieldSpec, embedding_matrix
from .specfun import ln_gamma

_SHIFT_TRY_CAP = 10_000


class RateInfeasibleError(RuntimeError):
    pass


class ShiftSearchError(RuntimeError):
    def __init__(self, best_count: int, required: float):
        self.best_count = best_count
        self.required = required
        super().__init__(
            f"shift search cap exceeded: best count {best_count} "
            f"< required {required:.3f}")


@dataclass(frozen=True)
class CodeConfig:
    rate: float
    power: float
    field: FieldSpec
    seed: int

    def __post_init__(self):
        if self.rate <= 0 or self.power <= 0:
            raise ValueError("rate and power must be positive")


@dataclass(frozen=True)
class Codebook:
    points: np.ndarray
    alpha: float
    shift: np.ndarray
    achieved_rate: float
    n: int                    # complex channel uses, or real dimension
    basis: LatticeBasis       # the scaled lattice alpha * psi(O_K)
    power: float

    @property
    def size(self) -> int:
        return len(self.points)

    def min_distance(self) -> float:
        diffs = self.points[:, None, :] - self.points[None, :, :]
        d2 = np.sum(np.abs(diffs) ** 2, axis=-1)
        np.fill_diagonal(d2, np.inf)
        return float(math.sqrt(d2.min()))


def _ln_ball_constant(field: FieldSpec) -> float:
    """ln C_n (complex) or ln C_n^R (real): Vol(B(r)) = C * (r^2/n)^{dim/2}."""
    n = field.ambient_n
    if field.totally_real:
        return 0.5 * n * math.log(math.pi * n) - ln_gamma(n / 2.0 + 1.0)
    return n * math.log(math.pi * n) - ln_gamma(n + 1.0)


def ball_volume(field: FieldSpec, radius: float) -> float:
    """Euclidean ball volume in the field's real ambient dimension."""
    dim = field.degree  # 2n complex, n real
    ln_vol = 0.5 * dim * math.log(math.pi) + dim * math.log(radius) \
        - ln_gamma(dim / 2.0 + 1.0)
    return math.exp(ln_vol)


def energy_normalization(field: FieldSpec, rate: float, power: float) -> float:
    """alpha^2 making B(sqrt(nP)) hold at least 2^{Rn} shifted lattice points.

    Evaluated in log-space with the field's true |d_K| so that desk-scale
    codebooks satisfy the rate/power accounting exactly.
    """
    n = field.ambient_n
    d = abs(field.disc_catalog)
    ln_c = _ln_ball_constant(field)
    if field.totally_real:
        ln_alpha2 = math.log(power) + (2.0 / n) * ln_c \
            - 2.0 * rate * math.log(2.0) - math.log(d) / n
    else:
        ln_alpha2 = math.log(2.0 * power) + ln_c / n \
            - rate * math.log(2.0) - math.log(d) / (2.0 * n)
    return math.exp(ln_alpha2)


def count_points(basis: LatticeBasis, shift, radius: float) -> int:
    """|(L + shift) intersect B(0, radius)| by exact enumeration."""
    center = -np.asarray(shift)
    coords, _ = lattice.points_in_ball(basis, center, radius)
    return len(coords)


def shift_search(basis: LatticeBasis, power: float, target_count: int,
                 seed: int, max_tries: int = _SHIFT_TRY_CAP):
    """Find a shift meeting the averaging-lemma count Vol(B)/Vol(L).

    Shifts are sampled uniformly from the fundamental parallelotope; the
    lemma guarantees a qualifying shift exists, so sampling retries until
    the bound is met.  Ties in count keep the earliest sample.
    """
    n = basis.n
    radius = math.sqrt(n * power)
    dim = basis.rank
    ln_ball = 0.5 * dim * math.log(math.pi) + dim * math.log(radius) \
        - ln_gamma(dim / 2.0 + 1.0)
    required = math.exp(ln_ball) / lattice.volume(basis)
    if target_count > 2.0 * required:
        raise RateInfeasibleError(
            f"target count {target_count} exceeds twice the volume ratio "
            f"{required:.3f}")
    rng = np.random.Generator(np.random.Philox(key=(seed, 0)))
    Breal = basis.real_matrix
    best_count = -1
    best_shift = None
    for _ in range(max_tries):
        frac = rng.random(dim)
        shift_real = frac @ Breal
        shift = basis.to_ambient(shift_real)
        count = count_points(basis, shift, radius)
        if count > best_count:
            best_count = count
            best_shift = shift
        if best_count >= required - 1e-9:
            return best_shift
    raise ShiftSearchError(best_count, required)


def carve(config: CodeConfig) -> Codebook:
    """Build the finite code B(sqrt(nP)) intersect (shift + alpha*psi(O_K))."""
    field = config.field
    n = field.ambient_n
    alpha2 = energy_normalization(field, config.rate, config.power)
    alpha = math.sqrt(alpha2)
    basis = embedding_matrix(field).scaled(alpha)
    target = 2.0 ** (config.rate * n)
    shift = shift_search(basis, config.power, math.ceil(target), config.seed)
    radius = math.sqrt(n * config.power)
    _, vecs = lattice.points_in_ball(basis, -shift, radius)
    points = vecs + shift
    # power constraint must hold by the ball cut; tolerate roundoff only
    sym_power = np.sum(np.abs(points) ** 2, axis=1) / n
    if np.any(sym_power > config.power * (1.0 + 1e-9)):
        raise RuntimeError("carved point violates the power constraint")
    achieved_rate = math.log2(len(points)) / n
    return Codebook(points=points, alpha=alpha, shift=shift,
                    achieved_rate=achieved_rate, n=n, basis=basis,
                    power=config.power)


def export_csv(codebook: Codebook, path: str) -> None:
    """Write the constellation as CSV; complex coordinates as re/im pairs."""
    complex_amb = codebook.basis.ambient == COMPLEX
    with open(path, "w", newline="", encoding="utf-8") as fh:
        shift_txt = ",".join(repr(float(v)) for v in np.ravel(
            lattice._complex_to_real(codebook.shift) if complex_amb
            else codebook.shift))
        fh.write(f"# alpha={codebook.alpha!r} rate={codebook.achieved_rate!r} "
                 f"power={codebook.power!r} shift={shift_txt}\n")
        writer = csv.writer(fh, lineterminator="\n")
        if complex_amb:
            header = ["index"] + [f"coord_{i}_{p}" for i in range(codebook.n)
                                  for p in ("re", "im")]
        else:
            header = ["index"] + [f"coord_{i}" for i in range(codebook.n)]
        writer.writerow(header)
        for idx, p in enumerate(codebook.points):
            if complex_amb:
                row = [idx] + [repr(float(v)) for pair in p
                               for v in (pair.real, pair.imag)]
            else:
                row = [idx] + [repr(float(v)) for v in p]
            writer.writerow(row)
