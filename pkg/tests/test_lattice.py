import math

import numpy as np
import pytest

from latcode import lattice
from latcode import numberfield as nf
from latcode.lattice import (COMPLEX, REAL, LatticeBasis, ZeroProductNormError,
                             closest_vector, invariants, min_product_distance,
                             points_in_ball, shortest_vector, volume)

Z2 = LatticeBasis(REAL, np.eye(2))
ZI = LatticeBasis(COMPLEX, np.array([[1.0 + 0j], [1j]]))
ZSQRT2 = LatticeBasis(REAL, np.array([[1.0, 1.0],
                                      [math.sqrt(2), -math.sqrt(2)]]))


def random_basis(rng, rank):
    """Well-conditioned random full-rank basis."""
    while True:
        B = np.eye(rank) + 0.25 * rng.standard_normal((rank, rank))
        if abs(np.linalg.det(B)) > 0.3:
            return LatticeBasis(REAL, B)


def brute_force_shortest(basis, box=5):
    B = basis.real_matrix
    best = math.inf
    ranges = [range(-box, box + 1)] * basis.rank
    grids = np.meshgrid(*ranges, indexing="ij")
    coords = np.stack([g.ravel() for g in grids], axis=1)
    vecs = coords @ B
    norms = np.linalg.norm(vecs, axis=1)
    norms[np.all(coords == 0, axis=1)] = np.inf
    return norms.min()


def brute_force_closest(basis, target, box=6):
    B = basis.real_matrix
    center = np.rint(np.linalg.solve(B.T, target)).astype(int)
    ranges = [range(c - box, c + box + 1) for c in center]
    grids = np.meshgrid(*ranges, indexing="ij")
    coords = np.stack([g.ravel() for g in grids], axis=1)
    vecs = coords @ B
    d = np.linalg.norm(vecs - target, axis=1)
    return d.min()


class TestVolume:
    def test_gaussian_integers(self):
        assert volume(ZI) == pytest.approx(1.0)

    def test_real_quadratic(self):
        assert volume(ZSQRT2) == pytest.approx(2 * math.sqrt(2), rel=1e-12)

    def test_scaling_homogeneity(self):
        rng = np.random.default_rng(0)
        B = random_basis(rng, 4)
        for c in [0.3, 2.0, 7.5]:
            assert volume(B.scaled(c)) == pytest.approx(
                c ** 4 * volume(B), rel=1e-10)

    def test_rejects_singular(self):
        with pytest.raises(ValueError):
            LatticeBasis(REAL, np.array([[1.0, 0.0], [2.0, 0.0]]))


class TestShortestVector:
    def test_real_quadratic(self):
        vec, norm = shortest_vector(ZSQRT2)
        assert norm == pytest.approx(math.sqrt(2), rel=1e-12)
        assert norm == pytest.approx(brute_force_shortest(ZSQRT2), rel=1e-12)
        assert np.allclose(np.abs(vec), [1.0, 1.0])

    def test_gaussian_integers(self):
        _, norm = shortest_vector(ZI)
        assert norm == pytest.approx(1.0)

    def test_degree4_field_normalized(self):
        B = nf.embedding_matrix(nf.catalog_field("F4-725"))
        _, sv = shortest_vector(B)
        nsv = sv / volume(B) ** 0.25
        assert nsv == pytest.approx(2.0 / 725.0 ** 0.125, rel=1e-10)

    def test_random_lattices_against_brute_force(self):
        rng = np.random.default_rng(123)
        for trial in range(50):
            rank = int(rng.integers(2, 6))
            B = random_basis(rng, rank)
            _, norm = shortest_vector(B)
            assert norm == pytest.approx(brute_force_shortest(B), rel=1e-9)

    def test_dimension_cap(self):
        B = LatticeBasis(REAL, np.eye(30))
        with pytest.raises(lattice.EnumerationCapError):
            shortest_vector(B)
        _, norm = shortest_vector(B, max_rank=32)
        assert norm == pytest.approx(1.0)


class TestClosestVector:
    def test_lattice_point_is_fixed(self):
        target = np.array([3.0, -2.0])
        assert np.allclose(closest_vector(Z2, target), target)

    def test_deep_hole(self):
        v = closest_vector(Z2, np.array([0.5, 0.5]))
        assert np.linalg.norm(v - [0.5, 0.5]) == pytest.approx(
            math.sqrt(0.5), rel=1e-12)
        assert set(np.round(v)) <= {0.0, 1.0}

    def test_random_rank4_against_brute_force(self):
        rng = np.random.default_rng(7)
        for trial in range(50):
            B = random_basis(rng, 4)
            target = 3.0 * rng.standard_normal(4)
            v = closest_vector(B, target)
            d = np.linalg.norm(v - target)
            assert d == pytest.approx(brute_force_closest(B, target),
                                      rel=1e-9, abs=1e-12)

    def test_deterministic_tie_break(self):
        v1 = closest_vector(Z2, np.array([0.5, 0.5]))
        v2 = closest_vector(Z2, np.array([0.5, 0.5]))
        assert np.array_equal(v1, v2)


class TestPointsInBall:
    def test_z2_disc_count(self):
        # Gauss circle: 13 points within radius 2 of the origin
        coords, vecs = points_in_ball(Z2, np.zeros(2), 2.0)
        assert len(coords) == 13

    def test_offcenter(self):
        coords, vecs = points_in_ball(Z2, np.array([0.5, 0.5]), 0.8)
        assert len(coords) == 4


class TestMinProductDistance:
    def test_real_quadratic_exact(self):
        dp, exact = min_product_distance(ZSQRT2, 6.0, exact_hint=1.0)
        assert dp == pytest.approx(1.0, rel=1e-12)
        assert exact

    def test_ring_lattices_attain_one(self):
        for name in ["Qi", "Qzeta5", "F4-725"]:
            B = nf.embedding_matrix(nf.catalog_field(name))
            dp, exact = min_product_distance(
                B, 1.5 * math.sqrt(B.n), exact_hint=1.0)
            assert dp == pytest.approx(1.0, rel=1e-10)
            assert exact

    def test_zero_product_norm_rejected(self):
        with pytest.raises(ZeroProductNormError):
            min_product_distance(Z2, 2.0)

    def test_without_hint_not_certified(self):
        dp, exact = min_product_distance(ZSQRT2, 6.0)
        assert not exact


class TestInvariants:
    def test_real_quadratic_closed_forms(self):
        inv = invariants(ZSQRT2, exact_hint=1.0)
        assert inv.ndp == pytest.approx(1 / math.sqrt(8), rel=1e-10)
        assert inv.nsv == pytest.approx(math.sqrt(2) / 8 ** 0.25, rel=1e-10)

    def test_gaussian_integer_closed_forms(self):
        inv = invariants(ZI, exact_hint=1.0)
        assert inv.ndp == pytest.approx(1.0, rel=1e-10)
        assert inv.nsv == pytest.approx(1.0, rel=1e-10)

    def test_scale_invariance(self):
        rng = np.random.default_rng(42)
        B = nf.embedding_matrix(nf.catalog_field("Qsqrt5"))
        base = invariants(B, exact_hint=1.0)
        for _ in range(5):
            c = float(rng.uniform(0.1, 10.0))
            scaled = invariants(B.scaled(c), radius=c * 3.0)
            assert scaled.nsv == pytest.approx(base.nsv, rel=1e-9)
            assert scaled.ndp == pytest.approx(base.ndp, rel=1e-9)

    @pytest.mark.parametrize("name", ["Qi", "Qsqrt2", "Qsqrt5", "Qsqrt-5",
                                      "Qzeta5", "F4-725", "F8-17"])
    def test_catalog_lemma_closed_forms(self, name):
        f = nf.catalog_field(name)
        inv = invariants(nf.embedding_matrix(f), exact_hint=1.0)
        d = abs(f.disc_catalog)
        if f.totally_real:
            n = f.degree
            assert inv.ndp == pytest.approx(1 / math.sqrt(d), rel=1e-8)
            assert inv.nsv == pytest.approx(math.sqrt(n) / d ** (1 / (2 * n)),
                                            rel=1e-8)
        else:
            n = f.degree // 2
            assert inv.ndp == pytest.approx(2 ** (n / 2) / d ** 0.25, rel=1e-8)
            assert inv.nsv == pytest.approx(
                math.sqrt(2 * n) / d ** (1 / (4 * n)), rel=1e-8)

    @pytest.mark.parametrize("name", ["Qi", "Qsqrt2", "Qsqrt5", "Qsqrt-5",
                                      "Qzeta5", "F4-725", "F8-17"])
    def test_am_gm_bound(self, name):
        f = nf.catalog_field(name)
        inv = invariants(nf.embedding_matrix(f), exact_hint=1.0)
        n = inv.n
        assert inv.ndp <= inv.nsv ** n / n ** (n / 2) + 1e-9

    def test_am_gm_on_random_lattices(self):
        rng = np.random.default_rng(99)
        checked = 0
        while checked < 20:
            rank = int(rng.integers(2, 5))
            B = random_basis(rng, rank)
            try:
                inv = invariants(B)
            except ZeroProductNormError:
                continue
            checked += 1
            assert inv.ndp <= inv.nsv ** rank / rank ** (rank / 2) + 1e-9
