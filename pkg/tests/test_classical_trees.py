import numpy as np
import pytest

from hydroq.classical import fit_adaboost, fit_forest, fit_gbrt, fit_tree
from hydroq.classical.boosting import EPS_CLAMP, adaboost_alpha
from hydroq.errors import DegenerateLabels


def noisy_separable(seed, n=200):
    r = np.random.default_rng(seed)
    X = r.uniform(-1, 1, (n, 3))
    y = (X[:, 0] + 0.6 * X[:, 1] > 0).astype(int)
    flip = r.random(n) < 0.1
    y[flip] = 1 - y[flip]
    return X, y


def gini_split_oracle(x, y):
    """Best threshold on one feature by scanning every midpoint."""
    v = np.unique(x)
    best = (np.inf, None)
    for t in 0.5 * (v[1:] + v[:-1]):
        score = 0.0
        for part in (y[x <= t], y[x > t]):
            p = np.mean(part == 1)
            score += len(part) * (1 - p ** 2 - (1 - p) ** 2)
        if score < best[0] - 1e-12:
            best = (score, t)
    return best[1]


def test_pure_labels_single_leaf():
    t = fit_tree(np.random.default_rng(0).standard_normal((10, 2)), np.ones(10))
    assert t.root.is_leaf and t.depth() == 0


def test_threshold_stump():
    x = np.array([0.0, 1.0, 2.0, 5.0, 6.0])
    y = np.array([0, 0, 0, 1, 1])
    t = fit_tree(x.reshape(-1, 1), y, max_depth=3)
    assert t.depth() == 1 and t.root.threshold == 3.5
    np.testing.assert_array_equal(t.predict(x), y)


def test_root_split_matches_gini_scan(rng):
    x = rng.uniform(0, 10, 60)
    y = (x + rng.normal(0, 2, 60) > 5).astype(int)
    t = fit_tree(x.reshape(-1, 1), y, max_depth=1)
    assert t.root.threshold == pytest.approx(gini_split_oracle(x, y))


def test_deeper_tree_fits_at_least_as_well():
    X, y = noisy_separable(1)
    acc = [np.mean(fit_tree(X, y, max_depth=d).predict(X) == y) for d in (1, 3)]
    assert acc[1] >= acc[0]


def test_tree_structure_invariants():
    X, y = noisy_separable(2)
    t = fit_tree(X, y, max_depth=4, min_leaf=3)
    assert t.depth() <= 4
    for leaf in t.leaves():
        assert leaf.n_samples >= 3
    stack = [t.root]
    while stack:
        node = stack.pop()
        if not node.is_leaf:
            assert np.isfinite(node.threshold)
            stack += [node.left, node.right]


def test_regression_tree():
    x = np.linspace(0, 1, 40)
    y = np.where(x > 0.5, 3.0, -1.0)
    t = fit_tree(x.reshape(-1, 1), y, max_depth=2, task="regress")
    np.testing.assert_allclose(t.predict(x), y)


def test_forest_single_tree_no_bootstrap_equals_tree():
    X, y = noisy_separable(3)
    f = fit_forest(X, y, n_trees=1, max_depth=4, bootstrap=False, max_features=None)
    np.testing.assert_array_equal(f.predict(X), fit_tree(X, y, max_depth=4).predict(X))


def test_forest_deterministic_and_order_free():
    X, y = noisy_separable(4)
    a = fit_forest(X, y, n_trees=15, seed=9)
    b = fit_forest(X, y, n_trees=15, seed=9)
    np.testing.assert_array_equal(a.predict(X), b.predict(X))
    perm = np.random.default_rng(0).permutation(len(X))
    np.testing.assert_array_equal(a.predict(X[perm]), a.predict(X)[perm])


def test_forest_beats_single_tree_mostly():
    wins = 0
    for seed in range(10):
        X, y = noisy_separable(100 + seed, n=300)
        tr, te = slice(0, 200), slice(200, 300)
        forest = fit_forest(X[tr], y[tr], n_trees=100, max_depth=8, seed=seed)
        tree = fit_tree(X[tr], y[tr], max_depth=8)
        wins += np.mean(forest.predict(X[te]) == y[te]) >= np.mean(tree.predict(X[te]) == y[te])
    assert wins >= 8


def test_adaboost_alpha_clamp():
    assert np.isfinite(adaboost_alpha(0.0))
    assert adaboost_alpha(0.0) == pytest.approx(0.5 * np.log((1 - 1e-10) / 1e-10))
    assert adaboost_alpha(0.25) == pytest.approx(0.5 * np.log(3))
    assert EPS_CLAMP > 0


def test_adaboost_stops_on_perfect_stump():
    x = np.array([-2.0, -1.0, 1.0, 2.0]).reshape(-1, 1)
    m = fit_adaboost(x, [-1, -1, 1, 1], n_rounds=10)
    assert len(m.learners) == 1 and np.isfinite(m.weights[0])


def test_adaboost_training_loss_non_increasing():
    # the exponential loss is the monotone quantity; 0/1 error sits below it
    r = np.random.default_rng(7)
    X = r.uniform(-1, 1, (150, 2))
    y = np.where(X[:, 0] + X[:, 1] > 0, 1, -1)
    m = fit_adaboost(X, y, n_rounds=30)
    exp_loss, errors = [], []
    for t in range(1, len(m.learners) + 1):
        score = sum(w * h.predict(X) for h, w in zip(m.learners[:t], m.weights[:t]))
        exp_loss.append(np.mean(np.exp(-y * score)))
        errors.append(np.mean(np.where(score >= 0, 1, -1) != y))
    assert all(b <= a + 1e-12 for a, b in zip(exp_loss, exp_loss[1:]))
    assert all(e <= b for e, b in zip(errors, exp_loss))
    assert errors[-1] < errors[0]


def test_adaboost_errors():
    with pytest.raises(DegenerateLabels):
        fit_adaboost(np.zeros((4, 1)), [1, 1, 1, 1])


def test_gbrt_null_model_and_fit():
    X, _ = noisy_separable(5)
    y = np.sin(3 * X[:, 0])
    null = fit_gbrt(X, y, n_rounds=0)
    np.testing.assert_allclose(null.predict(X), y.mean())
    m = fit_gbrt(X, y, n_rounds=100, shrinkage=0.1)
    assert np.mean((m.predict(X) - y) ** 2) < 0.2 * np.var(y)
