import numpy as np
import pytest

from lungct import metrics
from lungct.errors import BothEmpty, EmptyMask, GeometryMismatch

from conftest import make_mask, random_mask
from oracles import brute_asd, brute_boundary, brute_dice_jaccard


def half_overlap_pair():
    """|A| = |B| = 4, |A intersect B| = 2 inside a 4^3 grid."""
    a = np.zeros((4, 4, 4), dtype=bool)
    b = np.zeros((4, 4, 4), dtype=bool)
    a[0, 0, 0:4] = True
    b[0, 0, 2:4] = True
    b[0, 1, 0:2] = True
    return make_mask(a), make_mask(b)


class TestOverlapMetrics:
    def test_identical_masks(self, rng):
        a = random_mask(rng, (5, 5, 5))
        assert metrics.dice(a, a) == 1.0
        assert metrics.jaccard(a, a) == 1.0

    def test_disjoint_masks(self):
        a = np.zeros((3, 3, 3), dtype=bool)
        b = np.zeros((3, 3, 3), dtype=bool)
        a[0, 0, 0] = True
        b[2, 2, 2] = True
        assert metrics.dice(make_mask(a), make_mask(b)) == 0.0
        assert metrics.jaccard(make_mask(a), make_mask(b)) == 0.0

    def test_hand_built_half_overlap(self):
        a, b = half_overlap_pair()
        assert metrics.dice(a, b) == 0.5
        assert metrics.jaccard(a, b) == pytest.approx(1 / 3)
        bd, bj = brute_dice_jaccard(a.bits, b.bits)
        assert metrics.dice(a, b) == bd
        assert metrics.jaccard(a, b) == bj

    def test_both_empty_is_an_error(self):
        empty = make_mask(np.zeros((3, 3, 3)))
        with pytest.raises(BothEmpty):
            metrics.dice(empty, empty)
        with pytest.raises(BothEmpty):
            metrics.jaccard(empty, empty)

    def test_geometry_mismatch(self, rng):
        with pytest.raises(GeometryMismatch):
            metrics.dice(random_mask(rng, (3, 3, 3)), random_mask(rng, (3, 3, 4)))

    def test_dice_jaccard_identity(self, rng):
        for _ in range(50):
            a = random_mask(rng, (8, 8, 8))
            b = random_mask(rng, (8, 8, 8))
            d, j = metrics.dice(a, b), metrics.jaccard(a, b)
            assert abs(d - 2 * j / (1 + j)) < 1e-12
            assert j <= d


class TestSurfacePoints:
    def test_single_voxel(self):
        bits = np.zeros((3, 3, 3), dtype=bool)
        bits[1, 1, 1] = True
        sp = metrics.surface_points(make_mask(bits))
        assert sp.points.tolist() == [[1.0, 1.0, 1.0]]

    def test_solid_block(self):
        bits = np.zeros((5, 5, 5), dtype=bool)
        bits[1:4, 1:4, 1:4] = True
        sp = metrics.surface_points(make_mask(bits))
        assert len(sp.points) == 26
        assert sp.source_voxels.tolist() == brute_boundary(bits)

    def test_anisotropic_spacing_and_origin(self):
        bits = np.zeros((3, 3, 3), dtype=bool)
        bits[2, 1, 1] = True  # (z, y, x) index
        sp = metrics.surface_points(make_mask(bits, spacing=(0.5, 0.5, 2.0), origin=(10, 0, -5)))
        assert sp.points.tolist() == [[10 + 0.5, 0.5, -5 + 4.0]]

    def test_empty_mask(self):
        with pytest.raises(EmptyMask):
            metrics.surface_points(make_mask(np.zeros((2, 2, 2))))


class TestAsd:
    def test_identity_is_zero(self, rng):
        a = random_mask(rng, (6, 6, 6))
        assert metrics.asd(a, a) == 0.0

    def test_single_voxels_one_apart(self):
        a = np.zeros((3, 3, 3), dtype=bool)
        b = np.zeros((3, 3, 3), dtype=bool)
        a[1, 1, 0] = True
        b[1, 1, 1] = True
        assert metrics.asd(make_mask(a), make_mask(b)) == 1.0

    def test_matches_brute_force(self, rng):
        for _ in range(50):
            a = random_mask(rng, (12, 12, 12), density=0.3)
            b = random_mask(rng, (12, 12, 12), density=0.3)
            if a.empty or b.empty:
                continue
            got = metrics.asd(a, b)
            expected = brute_asd(
                metrics.surface_points(a).points, metrics.surface_points(b).points
            )
            assert got == pytest.approx(expected, abs=1e-9)

    def test_symmetry(self, rng):
        a = random_mask(rng, (8, 8, 8), density=0.4)
        b = random_mask(rng, (8, 8, 8), density=0.4)
        assert metrics.asd(a, b) == metrics.asd(b, a)

    def test_translation_invariance(self, rng):
        bits_a = rng.random((6, 6, 6)) < 0.4
        bits_b = rng.random((6, 6, 6)) < 0.4
        base = metrics.asd(make_mask(bits_a), make_mask(bits_b))
        shifted = metrics.asd(
            make_mask(bits_a, origin=(7.0, -3.0, 11.0)),
            make_mask(bits_b, origin=(7.0, -3.0, 11.0)),
        )
        assert shifted == pytest.approx(base, abs=1e-12)

    def test_spacing_scales_distances(self):
        a = np.zeros((3, 3, 3), dtype=bool)
        b = np.zeros((3, 3, 3), dtype=bool)
        a[1, 1, 0] = True
        b[1, 1, 1] = True
        got = metrics.asd(make_mask(a, spacing=(2.5, 1, 1)), make_mask(b, spacing=(2.5, 1, 1)))
        assert got == 2.5


class TestEvaluate:
    def test_identical(self, rng):
        a = random_mask(rng, (6, 6, 6))
        m = metrics.evaluate(a, a)
        assert (m.dsc, m.ji, m.asd_mm) == (1.0, 1.0, 0.0)
        assert m.n_a == m.n_b == a.count

    def test_half_overlap_bundle(self):
        a, b = half_overlap_pair()
        m = metrics.evaluate(a, b)
        assert m.dsc == 0.5
        assert m.ji == pytest.approx(1 / 3)
        assert m.asd_mm == pytest.approx(
            brute_asd(metrics.surface_points(a).points, metrics.surface_points(b).points),
            abs=1e-12,
        )

    def test_symmetric_under_swap(self, rng):
        for _ in range(50):
            a = random_mask(rng, (7, 7, 7), density=0.4)
            b = random_mask(rng, (7, 7, 7), density=0.4)
            if a.empty or b.empty:
                continue
            ab, ba = metrics.evaluate(a, b), metrics.evaluate(b, a)
            assert (ab.dsc, ab.ji, ab.asd_mm) == (ba.dsc, ba.ji, ba.asd_mm)

    def test_one_empty_mask_rejected(self, rng):
        a = random_mask(rng, (4, 4, 4), density=0.5)
        empty = make_mask(np.zeros((4, 4, 4)))
        with pytest.raises(EmptyMask):
            metrics.evaluate(a, empty)
