import os
import runpy
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from hdbandit import kernels
from hdbandit.agents import TABLE_AGENTS
from hdbandit.harness import ExperimentConfig, _AgentStreams, _fused_episode, prepare_replicate, run_episode

BACKENDS = [kernels.NUMPY, kernels.NUMBA]


def rand_hv(rng, shape):
    return np.where(rng.random(shape) < 0.5, -1, 1).astype(np.int8)


class TestScalarHelpers:
    def test_explore_pick(self):
        assert kernels.explore_pick(0.5, 0.3, 0.4, 10) == -1
        assert kernels.explore_pick(0.1, 0.35, 0.4, 10) == 3
        assert kernels.explore_pick(0.0, 0.9999999999, 1.0, 7) == 6

    def test_update_probability_endpoints(self):
        assert kernels.update_probability(0.4, 1, 1000) == 0.4
        assert kernels.update_probability(0.4, 1000, 1000) == 0.4 / 1000
        assert kernels.update_probability(0.4, 1001, 1000) == 0.0


class TestBackendAgreement:
    def test_scores(self):
        rng = np.random.default_rng(0)
        acc = rng.integers(-7, 8, (9, 300)).astype(np.int32)
        acc[4] = 0
        x = rand_hv(rng, 300)
        copies = rand_hv(rng, (9, 300))
        ref = kernels.NUMPY
        for kern in BACKENDS:
            np.testing.assert_array_equal(kern.inner_scores(acc, x), acc.astype(np.int64) @ x)
            np.testing.assert_allclose(kern.cosine_scores(acc, x), ref.cosine_scores(acc, x),
                                       rtol=0, atol=1e-15)
            assert kern.cosine_scores(acc, x)[4] == 0.0
            np.testing.assert_array_equal(kern.hamming_scores(copies, x),
                                          np.count_nonzero(copies != x, axis=1))

    def test_masked_saturating_add(self):
        rng = np.random.default_rng(1)
        for kern in BACKENDS:
            acc = rng.integers(-3, 4, 200).astype(np.int32)
            delta = rand_hv(rng, 200).astype(np.int32)
            mask = rng.random(200) < 0.5
            expected = acc.copy()
            expected[mask] = np.clip(acc[mask] + delta[mask], -3, 3)
            kern.masked_saturating_add(acc, delta, mask, 3)
            np.testing.assert_array_equal(acc, expected)

    def test_sherman_morrison(self):
        rng = np.random.default_rng(2)
        for kern in BACKENDS:
            a = np.eye(6)
            a_inv = np.eye(6)
            for _ in range(50):
                x = rng.standard_normal(6)
                a += np.outer(x, x)
                kern.sherman_morrison(a_inv, x)
            assert np.max(np.abs(a_inv - np.linalg.inv(a))) < 1e-10

    def test_best_probs(self):
        rng = np.random.default_rng(3)
        ctx = rng.standard_normal((40, 5))
        theta = rng.uniform(-1, 1, (6, 5))
        beta = rng.uniform(-1, 1, 6)
        a = kernels.NUMPY.best_probs(ctx, theta, beta)
        b = kernels.NUMBA.best_probs(ctx, theta, beta)
        np.testing.assert_array_equal(a, b)
        z = ctx @ theta.T + beta
        np.testing.assert_allclose(a, (1 / (1 + np.exp(-z))).max(axis=1), rtol=1e-12)

    @pytest.mark.parametrize("spec", TABLE_AGENTS, ids=lambda s: s.label)
    def test_fused_episodes_identical(self, spec):
        cfg = ExperimentConfig(num_actions=7, context_dim=4, dim=256, horizon=300, replicates=1,
                               agents=(spec,), seed=21)
        rep = prepare_replicate(cfg, 0)
        streams = _AgentStreams(rep, spec, cfg)
        out = [_fused_episode(rep, spec, 0.1, streams, cfg, backend=k) for k in BACKENDS]
        np.testing.assert_array_equal(out[0][0], out[1][0])
        np.testing.assert_array_equal(out[0][1], out[1][1])


class TestFusedMatchesStepwise:
    @pytest.mark.parametrize("spec", TABLE_AGENTS, ids=lambda s: s.label)
    def test_records_identical(self, spec):
        cfg = ExperimentConfig(num_actions=5, context_dim=3, dim=128, horizon=150, replicates=1,
                               agents=(spec,), seed=4)
        fused = run_episode(cfg, 0, spec, epsilon=0.2)
        step = run_episode(cfg, 0, spec, epsilon=0.2, stepwise=True)
        assert fused == step


class TestSwitch:
    def test_env_flag_selects_numpy(self):
        code = "from hdbandit import kernels; print(kernels.BACKEND, kernels.active.name)"
        env = dict(os.environ, HDBANDIT_DISABLE_NUMBA="1")
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True, check=True)
        assert out.stdout.split() == ["numpy", "numpy"]

    def test_default_backend_reported(self):
        assert kernels.BACKEND == kernels.active.name


def test_benchmark_script_runs(capsys):
    script = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    bench = runpy.run_path(str(script))
    bench["main"](["--horizon", "30", "--dim", "64", "--repeat", "1"])
    out = capsys.readouterr().out
    assert "HD-CB_PROB(kappa=3)" in out and "speedup" in out
