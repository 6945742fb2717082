"""Acceptance gate: one test per release criterion, each printing a
PASS/FAIL line with its runtime.  Run with `pytest tests/test_acceptance.py -s`.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from lungct import airmask, maskops, metrics, stats, synth, volume_io
from lungct.core import Geometry, Volume3D

from conftest import make_mask, random_mask
from oracles import brute_asd, brute_dice_jaccard, t_two_sided_p_by_quadrature


@pytest.fixture(autouse=True)
def report(request):
    start = time.perf_counter()
    failed = True
    try:
        yield
        failed = False
    finally:
        elapsed = time.perf_counter() - start
        name = request.node.name.replace("test_criterion_", "")
        print(f"\n[{'FAIL' if failed else 'PASS'}] {name} ({elapsed:.2f}s)")


def test_criterion_metric_oracle_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(100)
    checked = 0
    while checked < 100:
        a = random_mask(rng, (16, 16, 16), density=float(rng.uniform(0.05, 0.6)))
        b = random_mask(rng, (16, 16, 16), density=float(rng.uniform(0.05, 0.6)))
        if a.empty or b.empty:
            continue
        checked += 1
        d, j = metrics.dice(a, b), metrics.jaccard(a, b)
        bd, bj = brute_dice_jaccard(a.bits, b.bits)
        assert d == bd and j == bj
        assert abs(d - 2 * j / (1 + j)) <= 1e-12
        got = metrics.asd(a, b)
        expected = brute_asd(metrics.surface_points(a).points, metrics.surface_points(b).points)
        assert abs(got - expected) <= 1e-9
    assert time.perf_counter() - start < 30.0


def test_criterion_phantom_round_trip_mask_combination():
    start = time.perf_counter()
    ct, lung = synth.make_phantom(synth.PhantomSpec(dims=(128, 128, 128), rng_seed=21))
    assert lung.count == 64**3
    res = synth.synthesize(ct, lung, synth.LesionSynthesisParams(rng_seed=77))

    hist = airmask.lung_histogram(res.synthetic_ct, lung, bin_width=2.0)
    fit = airmask.fit_peak(hist)
    m_a = airmask.compute_air_mask(res.synthetic_ct, lung, fit.threshold)

    # lesion HU floor (-650) sits above the fitted threshold (~ -848), so the
    # three-mask combination must reproduce the lesion set exactly
    assert fit.threshold < -650.0
    m_s = maskops.combine_masks(lung, res.healthy_mask, m_a)
    assert m_s.same_set(res.lesion_mask)
    assert metrics.dice(m_s, res.lesion_mask) == 1.0
    assert time.perf_counter() - start < 10.0


def test_criterion_gaussian_fit_recovery():
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    samples = rng.normal(-900.0, 20.0, size=10**6)
    ct = Volume3D(geometry=Geometry(dims=(100, 100, 100)), values=samples)
    lung = make_mask(np.ones((100, 100, 100)))
    fit = airmask.fit_peak(airmask.lung_histogram(ct, lung, bin_width=2.0))
    assert abs(fit.mu + 900.0) <= 2.0
    assert abs(fit.sigma - 20.0) <= 2.0
    assert abs(fit.threshold + 848.4) <= 5.0

    # exact analytic histogram: closed-form log-parabola recovers both to 0.1
    centers = np.arange(-960.0, -839.0, 2.0)
    counts = 1000.0 * np.exp(-((centers + 900.0) ** 2) / (2 * 20.0**2))
    edges = np.concatenate([centers - 1.0, [centers[-1] + 1.0]])
    analytic = airmask.HuHistogram(
        bin_width=2.0, bin_edges=edges, counts=counts, total=int(counts.sum())
    )
    fit = airmask.fit_peak(analytic)
    assert abs(fit.mu + 900.0) <= 0.1
    assert abs(fit.sigma - 20.0) <= 0.1
    assert time.perf_counter() - start < 5.0


def test_criterion_air_mask_tail_rate():
    ct, lung = synth.make_phantom(synth.PhantomSpec(dims=(128, 128, 128), rng_seed=3))
    res = synth.synthesize(ct, lung, synth.LesionSynthesisParams(rng_seed=11))
    fit = airmask.fit_peak(airmask.lung_histogram(res.synthetic_ct, lung, bin_width=2.0))
    m_a = airmask.compute_air_mask(res.synthetic_ct, lung, fit.threshold)

    air_bits = res.healthy_mask.bits
    n_air = int(air_bits.sum())
    assert n_air >= 10**5
    excluded = float((air_bits & ~m_a.bits).sum()) / n_air
    assert 0.002 <= excluded <= 0.009
    assert not (m_a.bits & res.lesion_mask.bits).any()


def test_criterion_synthesis_invariants():
    z, y, x = np.mgrid[0:10, 0:10, 0:10]
    lung = make_mask((z - 4.5) ** 2 + (y - 4.5) ** 2 + (x - 4.5) ** 2 <= 16)
    rng = np.random.default_rng(8)
    boundary = synth.boundary_voxels(lung)
    for trial in range(1000):
        seed = tuple(int(c) for c in boundary[rng.integers(0, len(boundary))])
        steps = int(rng.integers(0, 200))
        lesion = synth.grow_lesion(lung, seed, steps, "face6", synth.make_rng(trial))
        assert not (lesion.bits & ~lung.bits).any()
        assert lesion.count <= steps + 1
        assert maskops.connected_components(lesion, "face6").component_count == 1

    ct = Volume3D(geometry=lung.geometry, values=np.full(1000, -900.0))
    params = synth.LesionSynthesisParams(num_lesions=(1, 3), steps=(10, 100), rng_seed=4)
    a = synth.synthesize(ct, lung, params)
    b = synth.synthesize(ct, lung, params)
    assert np.array_equal(a.synthetic_ct.values, b.synthetic_ct.values)
    assert a.lesion_mask.same_set(b.lesion_mask)
    assert a.healthy_mask.same_set(b.healthy_mask)
    assert a.seeds == b.seeds


def test_criterion_statistics_oracle():
    x = np.arange(12.0)
    assert stats.pearson(x, 3 * x - 2).r == 1.0
    assert stats.pearson(x, 3 * x - 2).p == 0.0
    assert stats.pearson(x, -x).r == -1.0

    res = stats.pearson([1, 2, 3, 4, 5], [2, 1, 4, 3, 5])
    # rational check: covariance 8, variances 10 and 10 -> r = 8/10 = 4/5
    assert Fraction(8, 10) == Fraction(4, 5)
    assert res.r == 0.8
    t = res.r * np.sqrt(3.0 / (1.0 - res.r**2))
    assert abs(res.p - t_two_sided_p_by_quadrature(t, 3)) <= 1e-8

    rng = np.random.default_rng(9)
    xs = rng.normal(size=30)
    ys = 0.4 * xs + rng.normal(size=30)
    base = stats.pearson(xs, ys)
    for _ in range(100):
        a = float(rng.uniform(0.05, 20.0)) * float(rng.choice([-1.0, 1.0]))
        b = float(rng.uniform(-50.0, 50.0))
        res = stats.pearson(a * xs + b, ys)
        assert abs(res.r - np.sign(a) * base.r) <= 1e-10
        assert abs(res.p - base.p) <= 1e-10


def test_criterion_severity_scores():
    lung_bits = np.zeros((10, 10, 10), dtype=bool)
    lung_bits[:] = True
    lung = make_mask(lung_bits)
    none = make_mask(np.zeros((10, 10, 10)))
    tenth = np.zeros((10, 10, 10), dtype=bool)
    tenth[0] = True
    assert stats.damage_load(none, lung) == 0.0
    assert stats.damage_load(lung, lung) == 1.0
    assert stats.damage_load(make_mask(tenth), lung) == 0.1

    from conftest import make_volume

    odd = make_volume(np.array([[[-600.0, -400.0, -300.0]]]))
    assert stats.damage_score(odd, make_mask(np.ones((1, 1, 3)))) == -400.0
    even = make_volume(np.array([[[-600.0, -400.0]]]))
    assert stats.damage_score(even, make_mask(np.ones((1, 1, 2)))) == -500.0

    rng = np.random.default_rng(14)
    uni = make_volume(rng.uniform(-650.0, -180.0, size=10**4).reshape(10, 10, 100))
    ds = stats.damage_score(uni, make_mask(np.ones((10, 10, 100))))
    assert abs(ds + 415.0) <= 10.0


def test_criterion_io_round_trip(tmp_path):
    rng = np.random.default_rng(31)
    for i in range(50):
        dims = tuple(int(d) for d in rng.integers(1, 12, size=3))
        spacing = tuple(float(s) for s in rng.uniform(0.2, 5.0, size=3))
        origin = tuple(float(o) for o in rng.uniform(-200, 200, size=3))
        geom = Geometry(dims=dims, spacing=spacing, origin=origin)
        values = rng.uniform(-1024, 3071, size=geom.voxel_count).astype(np.float32)
        vol = Volume3D(geometry=geom, values=values.astype(np.float64))
        path = str(tmp_path / f"v{i}.mhd")
        volume_io.write_volume(vol, path, element_type="float")
        back = volume_io.read_volume(path)
        assert back.geometry == geom
        assert back.values.tobytes() == vol.values.tobytes()


def test_criterion_evaluate_performance():
    bits_a = np.zeros((300, 512, 512), dtype=bool)
    bits_b = np.zeros((300, 512, 512), dtype=bool)
    bits_a[50:250, 150:350, 120:240] = True
    bits_b[52:252, 152:352, 122:242] = True
    a, b = make_mask(bits_a), make_mask(bits_b)
    n_surface = len(synth.boundary_voxels(a))
    assert n_surface >= 10**5

    start = time.perf_counter()
    result = metrics.evaluate(a, b)
    elapsed = time.perf_counter() - start
    assert 0.0 < result.dsc < 1.0
    assert result.asd_mm > 0.0
    assert elapsed < 5.0
