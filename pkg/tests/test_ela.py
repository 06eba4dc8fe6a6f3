"""Tests for landscape feature extraction.

The nearest-better features are checked against an exhaustive all-pairs
oracle; regression features against models that contain the truth exactly;
skewness and fitness_std against hand-computed 3- and 4-point sets.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from elaforge import dsl, ela
from elaforge.ela import (
    Bounds,
    ElaVector,
    FEATURE_NAMES,
    InvalidLandscape,
    NormalizedVector,
    SampleDesign,
)


# ------------------------------------------------------------------ oracle

def nbc_oracle(X: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Plain O(n^2) re-statement of the nearest-better definitions.

    Kept deliberately independent of the production code: explicit loops,
    no shared helpers.
    """
    n = len(y)
    nn = []
    nb = []
    nb_target = {}
    for i in range(n):
        best_any = math.inf
        best_better = math.inf
        best_better_idx = None
        for j in range(n):
            if j == i:
                continue
            d = math.dist(X[i], X[j])
            if d < best_any:
                best_any = d
            if y[j] < y[i] and d < best_better:
                best_better = d
                best_better_idx = j
        nn.append(best_any)
        if best_better_idx is not None:
            nb.append(best_better)
            nb_target[i] = best_better_idx
    if len(nb) < 3:
        return float("nan"), float("nan")

    def sample_sd(vals):
        m = sum(vals) / len(vals)
        return math.sqrt(sum((v - m) ** 2 for v in vals) / (len(vals) - 1))

    sd_nn = sample_sd(nn)
    sd_nb = sample_sd(nb)
    if sd_nb == 0.0:
        return float("nan"), float("nan")

    indeg = [0.0] * n
    for _, j in sorted(nb_target.items()):
        indeg[j] += 1.0
    if len(set(indeg)) == 1 or len(set(y.tolist())) == 1:
        return float("nan"), float("nan")

    my, md = sum(y) / n, sum(indeg) / n
    cov = sum((a - my) * (b - md) for a, b in zip(y, indeg))
    vy = sum((a - my) ** 2 for a in y)
    vd = sum((b - md) ** 2 for b in indeg)
    return cov / math.sqrt(vy * vd), sd_nn / sd_nb


# ------------------------------------------------------------- nbc features

def test_nbc_worked_four_point_example():
    X = np.array([[0.0], [1.0], [3.0], [7.0]])
    y = np.array([4.0, 3.0, 2.0, 1.0])
    cor, sd_ratio = ela.nbc_features(X, y)
    # nn = (1,1,2,4); nb = (1,2,4); in-degree = (0,1,1,1)
    assert sd_ratio == pytest.approx(math.sqrt(2.0) / math.sqrt(21.0 / 9.0), abs=1e-12)
    assert sd_ratio == pytest.approx(0.9258, abs=1e-4)
    assert cor == pytest.approx(-0.7746, abs=1e-4)


def test_nbc_degenerate_lattice_undefined():
    X = np.arange(6, dtype=float)[:, None]
    y = np.array([6.0, 5.0, 4.0, 3.0, 2.0, 1.0])
    cor, sd_ratio = ela.nbc_features(X, y)
    assert math.isnan(cor) and math.isnan(sd_ratio)


def test_nbc_matches_oracle_on_random_instances():
    rng = np.random.default_rng(42)
    for trial in range(100):
        n = int(rng.integers(4, 13))
        d = int(rng.integers(1, 4))
        X = rng.uniform(-5, 5, size=(n, d))
        y = rng.normal(size=n)
        got = ela.nbc_features(X, y)
        want = nbc_oracle(X, y)
        for g, w in zip(got, want):
            if math.isnan(w):
                assert math.isnan(g), f"trial {trial}"
            else:
                assert g == pytest.approx(w, abs=1e-12), f"trial {trial}"


def test_nbc_tie_break_is_smallest_index():
    # point 0 has two equidistant better neighbors (1 and 2); the edge must
    # go to index 1, giving in-degree (0, 1, 0, ...)
    X = np.array([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.3, 2.0], [4.0, 4.0]])
    y = np.array([5.0, 1.0, 2.0, 4.0, 3.0])
    cor, sd_ratio = ela.nbc_features(X, y)
    want_cor, want_sd = nbc_oracle(X, y)
    assert cor == pytest.approx(want_cor, abs=1e-12)
    assert sd_ratio == pytest.approx(want_sd, abs=1e-12)


def test_nbc_isometry_invariance():
    rng = np.random.default_rng(7)
    X = rng.uniform(-5, 5, size=(30, 3))
    y = rng.normal(size=30)
    base = ela.nbc_features(X, y)

    raw = rng.normal(size=(3, 3))
    q, _ = np.linalg.qr(raw)
    moved = X @ q.T + np.array([1.0, -2.0, 0.5])
    rotated = ela.nbc_features(moved, y)
    assert rotated[0] == pytest.approx(base[0], abs=1e-9)
    assert rotated[1] == pytest.approx(base[1], abs=1e-9)


# ---------------------------------------------------------------- adj_r2

def test_adj_r2_exact_linear_fit():
    X = np.array([[-1.0], [0.0], [1.0]])
    assert ela.adj_r2(X, 2.0 * X[:, 0], "lin_simple") == pytest.approx(1.0, abs=1e-12)


def test_adj_r2_three_point_quadratic_counterexample():
    X = np.array([[-1.0], [0.0], [1.0]])
    y = X[:, 0] ** 2
    # zero-slope fit: R2 = 0, adjusted = 1 - 2/1 = -1
    assert ela.adj_r2(X, y, "lin_simple") == pytest.approx(-1.0, abs=1e-9)


def test_adj_r2_constant_y_undefined():
    X = np.linspace(-1, 1, 9)[:, None]
    assert math.isnan(ela.adj_r2(X, np.full(9, 3.3), "lin_simple"))


def test_adj_r2_rank_deficient_design_undefined():
    # duplicated coordinate makes the interaction design singular
    base = np.linspace(-2, 2, 30)
    X = np.column_stack([base, base])
    y = base + np.linspace(0, 1, 30) ** 2
    assert math.isnan(ela.adj_r2(X, y, "quad_interact"))


@pytest.mark.parametrize("model", ela.REGRESSION_MODELS)
@pytest.mark.parametrize("dim", [1, 2, 3])
def test_adj_r2_recovers_in_class_models(model, dim):
    rng = np.random.default_rng(dim * 100 + len(model))
    n = 60
    X = rng.uniform(-5, 5, size=(n, dim))
    p = ela.model_parameter_count(dim, model)
    design = ela._design_matrix(X, model)
    coef = rng.normal(size=p + 1)
    y = design @ coef
    assert ela.adj_r2(X, y, model) == pytest.approx(1.0, abs=1e-9)

    noisy = y + rng.normal(scale=0.5, size=n)
    assert ela.adj_r2(X, noisy, model) <= 1.0 + 1e-9


def test_adj_r2_requires_enough_points():
    X = np.zeros((3, 2))
    with pytest.raises(ValueError, match="observations"):
        ela.adj_r2(X, np.arange(3.0), "quad_interact")


# ----------------------------------------------------- skewness / std

def test_skewness_symmetric_sample_is_zero():
    assert ela.skewness(np.array([1.0, 2.0, 3.0, 4.0, 5.0])) == pytest.approx(0.0, abs=1e-12)


def test_skewness_one_high_outlier():
    # m2 = 2, m3 = 2 -> g1 = 2 / 2^1.5
    assert ela.skewness(np.array([0.0, 0.0, 3.0])) == pytest.approx(
        2.0 / 2.0**1.5, abs=1e-12
    )
    assert ela.skewness(np.array([0.0, 0.0, 3.0])) == pytest.approx(0.7071, abs=1e-4)


def test_skewness_constant_undefined():
    assert math.isnan(ela.skewness(np.full(5, 2.0)))


def test_fitness_std_examples():
    assert ela.fitness_std(np.zeros(3)) == 0.0
    assert ela.fitness_std(np.array([0.0, 2.0])) == pytest.approx(math.sqrt(2.0), abs=1e-12)
    assert ela.fitness_std(np.array([1.0, 2.0, 3.0, 4.0])) == pytest.approx(
        math.sqrt(5.0 / 3.0), abs=1e-12
    )
    assert ela.fitness_std(np.array([1.0, 2.0, 3.0, 4.0])) == pytest.approx(1.2910, abs=1e-4)


def test_translation_and_scaling_invariances():
    rng = np.random.default_rng(3)
    X = rng.uniform(-5, 5, size=(40, 2))
    y = rng.normal(size=40) ** 2 + X[:, 0]

    shifted = y + 37.5
    for model in ela.REGRESSION_MODELS:
        assert ela.adj_r2(X, shifted, model) == pytest.approx(
            ela.adj_r2(X, y, model), abs=1e-9
        )
    assert ela.skewness(shifted) == pytest.approx(ela.skewness(y), abs=1e-9)
    assert ela.fitness_std(shifted) == pytest.approx(ela.fitness_std(y), abs=1e-9)
    base_nbc = ela.nbc_features(X, y)
    shifted_nbc = ela.nbc_features(X, shifted)
    assert shifted_nbc[0] == pytest.approx(base_nbc[0], abs=1e-9)
    assert shifted_nbc[1] == pytest.approx(base_nbc[1], abs=1e-9)

    scaled = 4.0 * y
    for model in ela.REGRESSION_MODELS:
        assert ela.adj_r2(X, scaled, model) == pytest.approx(
            ela.adj_r2(X, y, model), abs=1e-9
        )
    assert ela.skewness(scaled) == pytest.approx(ela.skewness(y), abs=1e-9)
    assert ela.nbc_features(X, scaled)[0] == pytest.approx(base_nbc[0], abs=1e-9)
    assert ela.fitness_std(scaled) == pytest.approx(4.0 * ela.fitness_std(y), abs=1e-9)


# -------------------------------------------------------------- sampling

def test_draw_sample_deterministic_and_boxed():
    design = SampleDesign(dim=3, n=750, seed=7)
    a = ela.draw_sample(design)
    b = ela.draw_sample(design)
    np.testing.assert_array_equal(a, b)
    assert a.shape == (750, 3)
    assert np.all(a >= -5.0) and np.all(a <= 5.0)


def test_draw_sample_seed_changes_points():
    a = ela.draw_sample(SampleDesign(dim=2, n=500, seed=1))
    b = ela.draw_sample(SampleDesign(dim=2, n=500, seed=2))
    assert not np.array_equal(a, b)


def test_design_default_n_and_minimum():
    assert SampleDesign(dim=4).n == 1000
    with pytest.raises(ValueError, match="too small"):
        SampleDesign(dim=3, n=10)


# ------------------------------------------------------- compute_features

def test_compute_features_constant_program_invalid():
    typed = dsl.parse_typed("def f(x):\n    return 0.0")
    with pytest.raises(InvalidLandscape):
        ela.compute_features(typed, SampleDesign(dim=2, n=500, seed=0))


def test_compute_features_sphere_quad_simple_is_one(sphere_source):
    typed = dsl.parse_typed(sphere_source)
    vector = ela.compute_features(typed, SampleDesign(dim=2, n=500, seed=0))
    by_name = dict(zip(FEATURE_NAMES, vector.values))
    assert by_name["ela_meta.quad_simple.adj_r2"] == pytest.approx(1.0, abs=1e-9)
    assert by_name["ela_meta.quad_w_interact.adj_r2"] == pytest.approx(1.0, abs=1e-9)


def test_compute_features_sample_function_all_defined(sample_source):
    typed = dsl.parse_typed(sample_source)
    vector = ela.compute_features(typed, SampleDesign(dim=2, n=500, seed=0))
    assert vector.fully_defined


def test_compute_features_accepts_plain_callable():
    vector = ela.compute_features(
        lambda x: float(np.sum(x**2)), SampleDesign(dim=2, n=500, seed=0)
    )
    assert vector.fully_defined


def test_feature_order_fixed_in_serialization():
    values = tuple(float(i) for i in range(8))
    assert list(ElaVector(values).to_dict()) == list(FEATURE_NAMES)


# ----------------------------------------------------------- normalization

def _simple_bounds(lo=0.0, hi=2.0):
    return Bounds(
        suite="test",
        dim=2,
        seeds=(0,),
        minima=(lo,) * 8,
        maxima=(hi,) * 8,
    )


def test_normalize_endpoints_and_midpoint():
    bounds = _simple_bounds(0.0, 2.0)
    assert ela.normalize(ElaVector((0.0,) * 8), bounds).values == (0.0,) * 8
    assert ela.normalize(ElaVector((2.0,) * 8), bounds).values == (1.0,) * 8
    assert ela.normalize(ElaVector((1.0,) * 8), bounds).values == (0.5,) * 8


def test_normalize_does_not_clip():
    bounds = _simple_bounds(0.0, 2.0)
    out = ela.normalize(ElaVector((4.0,) * 8), bounds)
    assert out.values == (2.0,) * 8


def test_normalize_degenerate_bounds_flagged():
    bounds = _simple_bounds(1.0, 1.0)
    out = ela.normalize(ElaVector((1.0,) * 8), bounds)
    assert out.values == (0.0,) * 8
    assert all(out.degenerate)


def test_distance_examples():
    a = NormalizedVector((0.5,) * 8)
    assert ela.distance(a, a) == 0.0
    b = NormalizedVector((0.5,) * 7 + (1.5,))
    assert ela.distance(a, b) == pytest.approx(1.0, abs=1e-12)
    c = NormalizedVector((1.0,) * 8)
    assert ela.distance(a, c) == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_distance_rejects_undefined():
    a = NormalizedVector((0.5,) * 7 + (float("nan"),))
    with pytest.raises(ValueError, match="defined"):
        ela.distance(a, NormalizedVector((0.5,) * 8))


_VECTORS = st.lists(
    st.floats(min_value=-10, max_value=10, allow_nan=False), min_size=8, max_size=8
).map(lambda vs: NormalizedVector(tuple(vs)))


@settings(max_examples=200, deadline=None)
@given(a=_VECTORS, b=_VECTORS, c=_VECTORS)
def test_distance_metric_axioms(a, b, c):
    assert ela.distance(a, a) <= 1e-12
    assert ela.distance(a, b) == pytest.approx(ela.distance(b, a), abs=1e-12)
    assert ela.distance(a, c) <= ela.distance(a, b) + ela.distance(b, c) + 1e-12


def test_bounds_round_trip(tmp_path):
    bounds = _simple_bounds()
    path = tmp_path / "bounds.json"
    bounds.save(path)
    assert Bounds.load(path) == bounds


# ------------------------------------------------ library cross-checks

def test_skewness_matches_scipy_population_estimator():
    stats = pytest.importorskip("scipy.stats")
    rng = np.random.default_rng(0)
    for _ in range(20):
        y = rng.normal(size=int(rng.integers(5, 80))) ** 2
        assert ela.skewness(y) == pytest.approx(
            float(stats.skew(y, bias=True)), abs=1e-12
        )


def test_adj_r2_matches_sklearn():
    linear_model = pytest.importorskip("sklearn.linear_model")
    metrics = pytest.importorskip("sklearn.metrics")
    rng = np.random.default_rng(1)
    for dim in (1, 2, 3):
        X = rng.uniform(-5, 5, size=(60, dim))
        y = X @ rng.normal(size=dim) + rng.normal(size=60)
        for model in ela.REGRESSION_MODELS:
            design = ela._design_matrix(X, model)[:, 1:]  # sklearn adds the intercept
            fit = linear_model.LinearRegression().fit(design, y)
            r2 = metrics.r2_score(y, fit.predict(design))
            n, p = 60, design.shape[1]
            want = 1 - (1 - r2) * (n - 1) / (n - p - 1)
            assert ela.adj_r2(X, y, model) == pytest.approx(want, abs=1e-9)
