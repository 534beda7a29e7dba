import itertools
import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hydroq import _core
from hydroq.classical.stumps import Stump
from hydroq.errors import DegenerateLabels, DimMismatch, ScheduleError, TooLarge
from hydroq.qboost import (
    Ensemble, QuboProblem, Schedule, WeakLearnerPool, build_qubo, ensemble_predict,
    read_qubo, solve_qubo_exhaustive, solve_qubo_sa, train_qboost, train_stump_pool, write_qubo,
)


def random_problem(seed, q):
    r = np.random.default_rng(seed)
    a = np.triu(r.standard_normal((q, q)), 1)
    return QuboProblem(a + a.T, 2 * r.standard_normal(q), float(r.standard_normal()))


def direct_objective(H, y, w, lam):
    q = H.shape[1]
    return float(np.sum((H @ w / q - y) ** 2) + lam * np.sum(w))


def brute_force(problem):
    best, arg = np.inf, None
    for bits in itertools.product((0, 1), repeat=problem.size):
        e = problem.energy(bits)
        if e < best - 1e-12:
            best, arg = e, np.array(bits)
    return arg, best


def random_pool_data(seed, n=60, d=2):
    r = np.random.default_rng(seed)
    X = r.standard_normal((n, d))
    y = np.where(X[:, 0] + 0.5 * X[:, -1] + 0.4 * r.standard_normal(n) > 0, 1, -1)
    return X, y


def test_stump_pool_separable_single_learner():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    pool = train_stump_pool(X, [-1, -1, 1, 1], Q=1, seed=0)
    s = pool.learners[0]
    assert 1.0 < s.threshold < 2.0 or s.polarity == -1
    np.testing.assert_array_equal(pool.predictions[:, 0], [-1, -1, 1, 1])


def test_stump_pool_deterministic_and_cached():
    X, y = random_pool_data(1)
    a, b = train_stump_pool(X, y, Q=8, seed=3), train_stump_pool(X, y, Q=8, seed=3)
    assert a.learners == b.learners
    pool = train_stump_pool(X, y, Q=16, seed=4)
    for j, stump in enumerate(pool.learners):
        np.testing.assert_array_equal(pool.predictions[:, j], stump.predict(X))
    assert set(np.unique(pool.predictions)) <= {-1, 1}


def test_stump_pool_single_class():
    with pytest.raises(DegenerateLabels):
        train_stump_pool(np.zeros((5, 1)), np.ones(5), Q=2)


def test_qubo_inclusion_of_perfect_learner():
    y = np.array([1, -1, 1, 1, -1])
    pool = WeakLearnerPool([Stump(0, 0.0)], y.reshape(-1, 1))
    p = build_qubo(pool, y, 0.0)
    assert p.energy([1]) < p.energy([0])
    assert p.constant == 5.0


def test_qubo_large_lambda_selects_nothing():
    X, y = random_pool_data(2)
    pool = train_stump_pool(X, y, Q=10, seed=0)
    sol = solve_qubo_exhaustive(build_qubo(pool, y, float(len(y))))
    assert sol.w.sum() == 0


def test_qubo_energy_identity():
    X, y = random_pool_data(5)
    pool = train_stump_pool(X, y, Q=10, seed=2)
    lam = 1.3
    p = build_qubo(pool, y, lam)
    np.testing.assert_allclose(p.matrix, p.matrix.T, atol=1e-12)
    r = np.random.default_rng(0)
    for _ in range(100):
        w = r.integers(0, 2, 10)
        assert abs(p.energy(w) - direct_objective(pool.predictions, y, w, lam)) < 1e-9


def test_qubo_length_mismatch():
    pool = WeakLearnerPool([Stump(0, 0.0)], np.ones((4, 1)))
    with pytest.raises(DimMismatch):
        build_qubo(pool, np.ones(3), 0.0)


def test_exhaustive_examples():
    one = QuboProblem([[0.0]], [-1.0], 2.5)
    sol = solve_qubo_exhaustive(one)
    assert sol.w.tolist() == [1] and sol.energy == pytest.approx(1.5)
    # both bits favoured: energies 0, -1, -1, -1.5
    two = QuboProblem([[0.0, 0.25], [0.25, 0.0]], [-1.0, -1.0], 0.0)
    assert solve_qubo_exhaustive(two).w.tolist() == [1, 1]
    assert solve_qubo_exhaustive(two).energy == pytest.approx(-1.5)
    zero = QuboProblem(np.zeros((3, 3)), np.zeros(3))
    assert solve_qubo_exhaustive(zero).w.tolist() == [0, 0, 0]
    with pytest.raises(TooLarge):
        solve_qubo_exhaustive(QuboProblem(np.zeros((21, 21)), np.zeros(21)))


def test_exhaustive_tie_break_lexicographic():
    # w=[0,1] and w=[1,0] both reach -1; lexicographic order prefers [0,1]
    p = QuboProblem([[0.0, 1.0], [1.0, 0.0]], [-1.0, -1.0])
    assert solve_qubo_exhaustive(p).w.tolist() == [0, 1]


@pytest.mark.parametrize("seed", range(6))
def test_exhaustive_matches_brute_force(seed):
    p = random_problem(seed, 7)
    w, e = brute_force(p)
    sol = solve_qubo_exhaustive(p)
    assert sol.w.tolist() == w.tolist()
    assert abs(sol.energy - e) < 1e-9


def test_sa_matches_exhaustive_on_random_instances():
    hits = sum(
        abs(solve_qubo_sa(random_problem(s, 4 + s % 13), seed=s).energy
            - solve_qubo_exhaustive(random_problem(s, 4 + s % 13)).energy) < 1e-9
        for s in range(20)
    )
    assert hits >= 19


def test_sa_zero_problem_and_determinism():
    zero = QuboProblem(np.zeros((4, 4)), np.zeros(4))
    sol = solve_qubo_sa(zero, Schedule(sweeps=10), seed=1)
    assert sol.w.shape == (4,) and abs(sol.energy - zero.energy(sol.w)) < 1e-9
    p = random_problem(9, 12)
    a, b = solve_qubo_sa(p, seed=4), solve_qubo_sa(p, seed=4)
    assert a.w.tolist() == b.w.tolist() and a.energy == b.energy


def test_sa_backends_agree():
    p = random_problem(11, 14)
    r = np.random.default_rng(0)
    w0 = r.integers(0, 2, 14).astype(np.uint8)
    temps = Schedule(sweeps=200).temperatures()
    u = r.random((200, 14))
    outs = [np.asarray(m.sa_anneal(p.matrix, p.linear, w0.copy(), temps, u))
            for m in _core.backends().values()]
    for o in outs[1:]:
        np.testing.assert_array_equal(o, outs[0])


@pytest.mark.parametrize("kw", [dict(T0=0.0), dict(alpha=1.0), dict(alpha=0.0), dict(sweeps=0)])
def test_schedule_errors(kw):
    with pytest.raises(ScheduleError):
        Schedule(**kw)


def test_monotone_penalty():
    for seed in range(5):
        X, y = random_pool_data(seed)
        pool = train_stump_pool(X, y, Q=10, seed=seed)
        sizes = [solve_qubo_exhaustive(build_qubo(pool, y, lam)).w.sum()
                 for lam in np.linspace(0, len(y), 12)]
        assert all(b <= a for a, b in zip(sizes, sizes[1:]))


def test_qboost_separable_full_accuracy():
    X = np.linspace(-1, 1, 40).reshape(-1, 1)
    y = np.where(X[:, 0] > 0.1, 1, -1)
    ens = train_qboost(X, y, Q=5, lam=0.1, seed=0)
    assert np.mean(ensemble_predict(ens, X) == y) == 1.0


def test_qboost_large_lambda_falls_back():
    X, y = random_pool_data(3)
    ens = train_qboost(X, y, Q=6, lam=float(len(y)), seed=0)
    assert ens.metadata["fallback"] is True
    assert len(ens.members) == 1


def test_qboost_plus_never_worse_on_validation():
    for seed in range(10):
        X, y = random_pool_data(100 + seed, n=80)
        plus = train_qboost(X, y, Q=8, variant="qboost_plus", seed=seed)
        n_fit = plus.metadata["n_fit"]
        plain = train_qboost(X[:n_fit], y[:n_fit], Q=8, lam=plus.metadata["lam"], seed=seed)
        plain_acc = np.mean(ensemble_predict(plain, X[n_fit:]) == y[n_fit:])
        assert plus.metadata["validation_accuracy"] >= plain_acc


def test_qboost_deterministic():
    X, y = random_pool_data(8)
    a = train_qboost(X, y, Q=10, seed=5)
    b = train_qboost(X, y, Q=10, seed=5)
    assert a.members == b.members and a.selected.tolist() == b.selected.tolist()


def test_ensemble_vote_rules():
    X = np.array([[-1.0], [1.0]])
    s = Stump(0, 0.0)
    single = Ensemble([s], np.array([0]))
    np.testing.assert_array_equal(ensemble_predict(single, X), s.predict(X))
    split = Ensemble([Stump(0, 0.0, 1), Stump(0, 0.0, -1)], np.array([0, 1]))
    np.testing.assert_array_equal(ensemble_predict(split, X), [1, 1])


def test_ensemble_vote_is_member_majority():
    X, y = random_pool_data(6)
    ens = train_qboost(X, y, Q=12, lam=0.5, seed=1)
    votes = np.column_stack([m.predict(X) for m in ens.members]).sum(axis=1)
    np.testing.assert_array_equal(ensemble_predict(ens, X), np.where(votes >= 0, 1, -1))


def test_polarity_check(caplog, monkeypatch):
    import hydroq.qboost as qb

    X = np.linspace(-1, 1, 30).reshape(-1, 1)
    y = np.where(X[:, 0] > 0, 1, -1)
    assert train_qboost(X, y, Q=4, lam=0.0, seed=0).metadata["polarity_warning"] is False

    def inverted_pool(X, y, Q, seed):
        learners = [Stump(0, 0.0, -1)] * Q
        return WeakLearnerPool(learners, np.column_stack([s.predict(X) for s in learners]))

    monkeypatch.setattr(qb, "train_stump_pool", inverted_pool)
    with caplog.at_level(logging.WARNING, logger="hydroq.qboost"):
        ens = train_qboost(X, y, Q=3, lam=0.0, seed=0)
    assert ens.metadata["polarity_warning"] and not ens.flip
    assert "polarity" in caplog.text
    flipped = train_qboost(X, y, Q=3, lam=0.0, seed=0, auto_flip=True)
    assert np.mean(ensemble_predict(flipped, X) == y) == 1.0


def test_qubo_file_roundtrip(tmp_path):
    p = random_problem(2, 6)
    write_qubo(p, tmp_path / "q.txt", comment="test")
    back = read_qubo(tmp_path / "q.txt")
    r = np.random.default_rng(0)
    for _ in range(20):
        w = r.integers(0, 2, 6)
        assert abs(back.energy(w) - p.energy(w)) < 1e-9
    assert (tmp_path / "q.txt").read_text().startswith("#")


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), q=st.integers(1, 10), lam=st.floats(0, 5))
def test_energy_identity_property(seed, q, lam):
    r = np.random.default_rng(seed)
    H = r.choice([-1, 1], size=(25, q))
    y = r.choice([-1, 1], size=25)
    p = build_qubo(WeakLearnerPool([Stump(0, 0.0)] * q, H), y, lam)
    w = r.integers(0, 2, q)
    assert abs(p.energy(w) - direct_objective(H, y, w, lam)) < 1e-9
