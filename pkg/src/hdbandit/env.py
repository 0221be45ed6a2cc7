"""Synthetic contextual bandit with logistic per-action rewards.

Contexts are standard normal in R^d. Arm ``a`` pays 1 with probability
``sigmoid(x . theta_a + beta_a)``, where ``theta`` and ``beta`` are drawn
uniformly from [-1, 1]. This follows the logistic-linear convention of the
Open Bandit Pipeline synthetic generator but is not a port of it, so
absolute rewards are "OBP-style", not OBP-exact.

The model parameters, the context sequence and the reward draws come from
three separate streams derived from ``seed``.
"""

import json

import numpy as np

from . import kernels
from . import rng as rng_mod
from .hypervec import DimensionMismatchError


class SyntheticEnv:
    def __init__(self, num_actions, context_dim, seed=0, theta=None, beta=None):
        if num_actions < 1 or context_dim < 1:
            raise ValueError("num_actions and context_dim must be positive")
        self.num_actions = int(num_actions)
        self.context_dim = int(context_dim)
        self.seed = rng_mod.check_seed(seed)

        model = rng_mod.stream(self.seed, "env", "model")
        drawn_theta = model.uniform(-1.0, 1.0, (self.num_actions, self.context_dim))
        drawn_beta = model.uniform(-1.0, 1.0, self.num_actions)
        self.theta = drawn_theta if theta is None else np.array(theta, dtype=np.float64)
        self.beta = drawn_beta if beta is None else np.array(beta, dtype=np.float64)
        if self.theta.shape != (self.num_actions, self.context_dim):
            raise ValueError(f"theta must have shape {(self.num_actions, self.context_dim)}")
        if self.beta.shape != (self.num_actions,):
            raise ValueError(f"beta must have shape {(self.num_actions,)}")

        self._contexts = rng_mod.stream(self.seed, "env", "context")
        self._rewards = rng_mod.stream(self.seed, "env", "reward")
        self.reward_draws = 0

    # -- sampling ------------------------------------------------------------

    def sample_context(self):
        return self._contexts.standard_normal(self.context_dim)

    def sample_contexts(self, n):
        """Next ``n`` contexts as an ``(n, d)`` array; same values as ``n`` single draws."""
        return self._contexts.standard_normal((n, self.context_dim))

    def sample_reward(self, x, a):
        p = self.reward_prob(x, a)
        self.reward_draws += 1
        return 1 if self._rewards.random() < p else 0

    def reward_uniforms(self, n):
        """Pre-draw the uniforms behind the next ``n`` reward samples.

        ``reward = int(u[t] < reward_prob(x_t, a_t))`` reproduces ``n``
        successive :meth:`sample_reward` calls exactly.
        """
        self.reward_draws += n
        return self._rewards.random(n)

    # -- model ---------------------------------------------------------------

    def _check(self, x, a):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.context_dim,):
            raise DimensionMismatchError(
                f"context must have length {self.context_dim}, got shape {x.shape}"
            )
        if not 0 <= a < self.num_actions:
            raise IndexError(f"action {a} out of range [0, {self.num_actions - 1}]")
        return x

    def reward_prob(self, x, a):
        x = self._check(x, a)
        return kernels.reward_prob(x, self.theta[a], self.beta[a])

    def reward_probs(self, contexts):
        """``(T, N)`` matrix of reward probabilities, vectorized (reporting only)."""
        z = np.asarray(contexts, dtype=np.float64) @ self.theta.T + self.beta
        return 1.0 / (1.0 + np.exp(-z))

    def best_action(self, x):
        probs = [self.reward_prob(x, a) for a in range(self.num_actions)]
        best = int(np.argmax(probs))
        return best, probs[best]

    # -- persistence ---------------------------------------------------------

    def to_dict(self):
        return {
            "seed": self.seed,
            "N": self.num_actions,
            "d": self.context_dim,
            "theta": self.theta.tolist(),
            "beta": self.beta.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        missing = {"seed", "N", "d", "theta", "beta"} - set(data)
        if missing:
            raise ValueError(f"environment file missing fields: {sorted(missing)}")
        return cls(data["N"], data["d"], seed=data["seed"], theta=data["theta"], beta=data["beta"])

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def __repr__(self):
        return f"SyntheticEnv(N={self.num_actions}, d={self.context_dim}, seed={self.seed})"


def sample_context(env):
    return env.sample_context()


def reward_prob(env, x, a):
    return env.reward_prob(x, a)


def sample_reward(env, x, a):
    return env.sample_reward(x, a)


def best_action(env, x):
    return env.best_action(x)
