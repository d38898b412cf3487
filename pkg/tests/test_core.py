import numpy as np
import pytest
from numpy.testing import assert_allclose

from logo.core import (
    SparsePrecision,
    assemble_precision,
    log_likelihood,
    logdet_decomposed,
    mst_logdet_closed_form,
    partial_update,
    trace_product,
)
from logo.errors import DimensionMismatch, NotPositiveDefinite
from logo.estimators import estimate
from logo.graphs import CliqueTree, build_mst, build_tmfg
from logo.linalg import SymMatrix, logdet_dense

from conftest import pair_from_dense, random_obs, random_pair

CHAIN_TREE = CliqueTree(p=3, cliques=((0, 1), (1, 2)), separators=(((1,), 2),))
CHAIN_J = np.array(
    [[4 / 3, -2 / 3, 0.0], [-2 / 3, 5 / 3, -2 / 3], [0.0, -2 / 3, 4 / 3]]
)


class TestSparsePrecision:
    def test_dense_round_trip_and_counts(self):
        m = SparsePrecision(
            p=3,
            mean=np.zeros(3),
            rows=[0, 1, 1, 2, 2],
            cols=[0, 0, 1, 1, 2],
            vals=[4 / 3, -2 / 3, 5 / 3, -2 / 3, 4 / 3],
            structure=CHAIN_TREE,
        )
        assert_allclose(m.to_dense(), CHAIN_J)
        assert m.n_offdiag == 2
        assert m.n_params == 5

    def test_rejects_upper_triangle(self):
        with pytest.raises(ValueError):
            SparsePrecision(p=2, mean=np.zeros(2), rows=[0], cols=[1], vals=[1.0])

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            SparsePrecision(
                p=2, mean=np.zeros(2), rows=[1, 1], cols=[0, 0], vals=[1.0, 2.0]
            )

    def test_dict_round_trip_exact(self):
        rng = np.random.default_rng(0)
        pair = random_pair(rng, p=10, q=80)
        model = assemble_precision(build_tmfg(pair.corr), pair)
        back = SparsePrecision.from_dict(model.to_dict())
        assert np.array_equal(back.vals, model.vals)
        assert np.array_equal(back.rows, model.rows)
        assert np.array_equal(back.mean, model.mean)
        assert back.structure == model.structure

    def test_tagged_structures(self):
        m = SparsePrecision(
            p=2, mean=np.zeros(2), rows=[0, 1], cols=[0, 1], vals=[1.0, 1.0],
            structure="diagonal",
        )
        assert SparsePrecision.from_dict(m.to_dict()).structure == "diagonal"

    def test_matvec(self):
        m = SparsePrecision(
            p=3, mean=np.zeros(3),
            rows=[0, 1, 1, 2, 2], cols=[0, 0, 1, 1, 2],
            vals=[4 / 3, -2 / 3, 5 / 3, -2 / 3, 4 / 3],
        )
        assert_allclose(m.matvec(np.ones(3)), [2 / 3, 1 / 3, 2 / 3], atol=1e-15)


class TestAssemble:
    def test_chain_closed_form(self, chain_pair):
        model = assemble_precision(CHAIN_TREE, chain_pair)
        assert_allclose(model.to_dense(), CHAIN_J, atol=1e-14)
        assert model.n_params == 5

    def test_two_clique_population_inverse(self, two_clique_pair):
        # truth is Markov on the tree, so J^-1 reproduces Sigma everywhere
        tree = build_tmfg(two_clique_pair.corr)
        model = assemble_precision(tree, two_clique_pair)
        dense = model.to_dense()
        assert dense[4, 0] == 0.0
        assert_allclose(
            np.linalg.inv(dense), two_clique_pair.cov.to_dense(), atol=1e-12
        )

    def test_support_matching_mle(self):
        rng = np.random.default_rng(1)
        pair = random_pair(rng, p=20, q=100)
        for tree in (build_tmfg(pair.corr), build_mst(pair.corr)):
            model = assemble_precision(tree, pair)
            inv = np.linalg.inv(model.to_dense())
            sig = pair.cov.to_dense()
            for i, j in zip(model.rows, model.cols):
                assert abs(inv[i, j] - sig[i, j]) < 1e-10
            # off-structure entries of J are exact zeros
            dense = model.to_dense()
            mask = np.zeros((20, 20), dtype=bool)
            mask[model.rows, model.cols] = True
            mask |= mask.T
            assert np.all(dense[~mask] == 0.0)

    def test_trace_identity_on_train(self):
        rng = np.random.default_rng(2)
        pair = random_pair(rng, p=15, q=75)
        for tree in (build_tmfg(pair.corr), build_mst(pair.corr)):
            model = assemble_precision(tree, pair)
            assert_allclose(trace_product(model, pair.cov), 15.0, rtol=1e-12)

    def test_min_observation_guard(self):
        rng = np.random.default_rng(3)
        obs = random_obs(rng, p=8, q=4)
        pair = estimate(obs)
        tree = CliqueTree(
            p=8,
            cliques=((0, 1, 2, 3), (4, 5, 6, 7)),
            separators=(),
        )
        with pytest.raises(NotPositiveDefinite):
            assemble_precision(tree, pair)

    def test_dimension_mismatch(self, chain_pair):
        tree = CliqueTree(p=4, cliques=((0, 1), (1, 2), (2, 3)),
                          separators=(((1,), 2), ((2,), 2)))
        with pytest.raises(DimensionMismatch):
            assemble_precision(tree, chain_pair)


class TestLogdet:
    def test_chain_value(self, chain_pair):
        model = assemble_precision(CHAIN_TREE, chain_pair)
        target = np.log(16.0 / 9.0)
        assert_allclose(model.logdet(), target, rtol=1e-12)
        assert_allclose(logdet_decomposed(CHAIN_TREE, chain_pair), target, rtol=1e-12)
        assert_allclose(
            mst_logdet_closed_form(CHAIN_TREE, chain_pair), target, rtol=1e-12
        )

    def test_diagonal_case(self):
        pair = pair_from_dense(np.diag([4.0, 9.0]))
        tree = CliqueTree(p=2, cliques=((0, 1),), separators=())
        assert_allclose(
            logdet_decomposed(tree, pair), -np.log(36.0), rtol=1e-12
        )

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(4)
        for p in (6, 13, 40):
            pair = random_pair(rng, p=p, q=6 * p)
            for tree in (build_tmfg(pair.corr), build_mst(pair.corr)):
                model = assemble_precision(tree, pair)
                ref = np.linalg.slogdet(model.to_dense())[1]
                assert_allclose(logdet_decomposed(tree, pair), ref, atol=1e-8)
                assert_allclose(model.logdet(), ref, atol=1e-8)

    def test_mst_closed_form_rejects_tmfg(self):
        rng = np.random.default_rng(5)
        pair = random_pair(rng, p=10, q=60)
        with pytest.raises(ValueError):
            mst_logdet_closed_form(build_tmfg(pair.corr), pair)

    def test_separator_weights_sum(self):
        # spanning forest bookkeeping: sum of (k-1) = cliques - 1
        rng = np.random.default_rng(6)
        pair = random_pair(rng, p=30, q=150)
        for tree in (build_tmfg(pair.corr), build_mst(pair.corr)):
            assert sum(k - 1 for _, k in tree.separators) == len(tree.cliques) - 1


class TestPartialUpdate:
    def test_bit_identical_to_full(self):
        rng = np.random.default_rng(7)
        obs_a = random_obs(rng, p=18, q=90)
        pair_a = estimate(obs_a)
        tree = build_tmfg(pair_a.corr)
        model = assemble_precision(tree, pair_a)

        # perturb a few columns, keep the rest
        data = obs_a.data.copy()
        for dirty in [{0}, {3, 11}, {2, 5, 9, 17}, set(range(18))]:
            new = data.copy()
            for v in dirty:
                new[:, v] += 0.1 * rng.standard_normal(90)
            pair_b = estimate(type(obs_a)(obs_a.names, new))
            updated = partial_update(model, tree, pair_b, dirty)
            full = assemble_precision(tree, pair_b)
            assert np.array_equal(updated.vals, full.vals)
            assert np.array_equal(updated.mean, full.mean)

    def test_empty_dirty_is_identity(self):
        rng = np.random.default_rng(8)
        pair = random_pair(rng, p=10, q=50)
        tree = build_tmfg(pair.corr)
        model = assemble_precision(tree, pair)
        assert partial_update(model, tree, pair, set()) is model

    def test_untouched_entries_not_recomputed(self):
        rng = np.random.default_rng(9)
        pair = random_pair(rng, p=12, q=60)
        tree = build_mst(pair.corr)
        model = assemble_precision(tree, pair)
        updated = partial_update(model, tree, pair, {0})
        # same covariance: values identical either way
        assert np.array_equal(updated.vals, model.vals)


class TestLikelihood:
    def test_report_identity(self):
        rng = np.random.default_rng(10)
        pair = random_pair(rng, p=12, q=120)
        model = assemble_precision(build_tmfg(pair.corr), pair)
        rep = log_likelihood(model, pair)
        assert_allclose(rep.trace_term, 12.0, rtol=1e-12)
        expected = 0.5 * (rep.logdet - rep.trace_term - 12 * np.log(2 * np.pi))
        assert_allclose(rep.per_obs_loglik, expected, rtol=1e-15)
        assert_allclose(rep.total, rep.per_obs_loglik * 120, rtol=1e-15)
        assert rep.n_params == model.n_params

    def test_explicit_q_test(self):
        rng = np.random.default_rng(11)
        pair = random_pair(rng, p=6, q=60)
        model = assemble_precision(build_mst(pair.corr), pair)
        rep = log_likelihood(model, pair, q_test=7)
        assert_allclose(rep.total, rep.per_obs_loglik * 7, rtol=1e-15)

    def test_off_sample_scoring(self):
        rng = np.random.default_rng(12)
        train = random_pair(rng, p=10, q=100)
        test = random_pair(rng, p=10, q=100)
        model = assemble_precision(build_tmfg(train.corr), train)
        on = log_likelihood(model, train).per_obs_loglik
        off = log_likelihood(model, test).per_obs_loglik
        assert off < on  # held-out data scores below the fit

    def test_dense_logdet_consistency(self, chain_pair):
        model = assemble_precision(CHAIN_TREE, chain_pair)
        rep = log_likelihood(model, chain_pair)
        assert_allclose(rep.logdet, logdet_dense(model.to_dense()), rtol=1e-14)
