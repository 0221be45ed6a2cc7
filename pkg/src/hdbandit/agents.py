"""Bandit agents: LinEPS and three hyperdimensional variants.

All agents share one protocol::

    a = agent.select(x)          # x: raw context (LinEPS) or bipolar hypervector
    agent.update(a, x, reward)   # only arm ``a`` changes

Exploration is epsilon-greedy. Each round draws a pair ``(q, u)`` from the
agent's exploration stream *before* any scoring: if ``q < epsilon`` the
action is ``floor(u * N)``, otherwise the score argmax, ties going to the
lowest index. The probabilistic agent additionally draws ``D`` uniforms per
update from a separate mask stream.

HD-CB_BIN resets an arm to its binarized copy after every ``2**Q`` updates
to that arm. Between resets the Q-bit accumulator saturates at
``±(2**(Q-1) - 1)`` instead of wrapping, and the binary copy used for
Hamming scoring is refreshed after every update.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from . import rng as rng_mod
from .encoding import RewardEncoder
from .hypervec import BipolarHV, DimensionMismatchError, SatIntHV, component_bits

KINDS = ("lineps", "real", "bin", "prob")
WIDE_BITS = 32


def kappa_for_bits(bits):
    """Saturation threshold stored in ``bits`` bits: 1, 3, 7 for 2, 3, 4 bits."""
    if bits < 2:
        raise ValueError("need at least 2 bits per component")
    return 2 ** (bits - 1) - 1


def eps_greedy_pick(scores, epsilon, rng):
    scores = np.asarray(scores)
    if scores.size == 0:
        raise ValueError("scores must be non-empty")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    q, u = rng.random(2)
    a = kernels.explore_pick(q, u, epsilon, scores.size)
    if a >= 0:
        return a
    return int(np.argmax(scores))


class Agent:
    kind = None

    def __init__(self, num_actions, epsilon=0.0, seed=0):
        if num_actions < 1:
            raise ValueError("num_actions must be positive")
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        self.num_actions = int(num_actions)
        self.epsilon = float(epsilon)
        self.seed = rng_mod.check_seed(seed)
        self._explore = rng_mod.stream(self.seed, "agent", "explore")

    def scores(self, x):
        raise NotImplementedError

    def select(self, x):
        x = self._check_input(x)
        q, u = self._explore.random(2)
        a = kernels.explore_pick(q, u, self.epsilon, self.num_actions)
        if a >= 0:
            return a
        return int(np.argmax(self.scores(x)))

    def update(self, action, x, reward):
        raise NotImplementedError

    def memory_bits(self):
        raise NotImplementedError

    def _check_action(self, action):
        if not 0 <= action < self.num_actions:
            raise IndexError(f"action {action} out of range [0, {self.num_actions - 1}]")

    def _check_input(self, x):
        raise NotImplementedError


class LinEPS(Agent):
    """Disjoint ridge regression per arm with epsilon-greedy exploration.

    The inverse of each ``A_a`` is maintained with rank-one Sherman-Morrison
    updates; ``A_a`` itself is kept for inspection and verification.
    """

    kind = "lineps"

    def __init__(self, num_actions, context_dim, epsilon=0.0, seed=0, ridge=1.0):
        super().__init__(num_actions, epsilon, seed)
        if ridge <= 0:
            raise ValueError("ridge must be positive")
        self.context_dim = int(context_dim)
        self.ridge = float(ridge)
        n, d = self.num_actions, self.context_dim
        self.A = np.repeat((np.eye(d) * self.ridge)[None], n, axis=0)
        self.A_inv = np.repeat((np.eye(d) / self.ridge)[None], n, axis=0)
        self.b = np.zeros((n, d))
        self.theta_hat = np.zeros((n, d))

    def _check_input(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.context_dim,):
            raise DimensionMismatchError(
                f"context must have length {self.context_dim}, got shape {x.shape}"
            )
        return x

    def scores(self, x):
        return kernels.matvec(self.theta_hat, self._check_input(x))

    def update(self, action, x, reward):
        self._check_action(action)
        x = self._check_input(x)
        self.A[action] += np.outer(x, x)
        kernels.sherman_morrison(self.A_inv[action], x)
        self.b[action] += reward * x
        self.theta_hat[action] = kernels.matvec(self.A_inv[action], self.b[action])

    def memory_bits(self):
        return agent_memory_bits("lineps", self.num_actions, self.context_dim, None)


class _HDAgent(Agent):
    def __init__(self, num_actions, dim, epsilon=0.0, seed=0):
        super().__init__(num_actions, epsilon, seed)
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = int(dim)
        self.reward_encoder = RewardEncoder(self.dim)

    def _check_input(self, x):
        x = np.asarray(x)
        if x.shape != (self.dim,):
            raise DimensionMismatchError(
                f"hypervector must have dimension {self.dim}, got shape {x.shape}"
            )
        return x

    def _update_signal(self, x, reward):
        return np.asarray(self.reward_encoder.encode(reward)) * x


class HDReal(_HDAgent):
    """Unbounded superposition with cosine scoring."""

    kind = "real"

    def __init__(self, num_actions, dim, epsilon=0.0, seed=0):
        super().__init__(num_actions, dim, epsilon, seed)
        self.acc = np.zeros((self.num_actions, self.dim), np.int32)

    def scores(self, x):
        return kernels.cosine_scores(self.acc, self._check_input(x))

    def update(self, action, x, reward):
        self._check_action(action)
        x = self._check_input(x)
        self.acc[action] += self._update_signal(x, reward)

    def memory_bits(self):
        return agent_memory_bits("real", self.num_actions, None, self.dim)


class HDBin(_HDAgent):
    """Q-bit saturating accumulators, Hamming scoring on binarized copies."""

    kind = "bin"

    def __init__(self, num_actions, dim, bits=3, epsilon=0.0, seed=0):
        super().__init__(num_actions, dim, epsilon, seed)
        self.bits = int(bits)
        self.bound = kappa_for_bits(self.bits)
        self.period = 2**self.bits
        self.acc = np.zeros((self.num_actions, self.dim), np.int32)
        self.copies = np.ones((self.num_actions, self.dim), np.int8)
        self.counts = np.zeros(self.num_actions, np.int64)

    def scores(self, x):
        return -kernels.hamming_scores(self.copies, self._check_input(x))

    def update(self, action, x, reward):
        self._check_action(action)
        x = self._check_input(x)
        row = self.acc[action]
        row[:] = np.clip(row + self._update_signal(x, reward), -self.bound, self.bound)
        self.copies[action] = np.where(row >= 0, 1, -1)
        self.counts[action] += 1
        if self.counts[action] == self.period:
            row[:] = self.copies[action]
            self.counts[action] = 0

    def accumulator(self, action):
        return SatIntHV(self.acc[action], self.bound)

    def binary_copy(self, action):
        return BipolarHV(self.copies[action])

    def memory_bits(self):
        return agent_memory_bits("bin", self.num_actions, None, self.dim, bits=self.bits)


class HDProb(_HDAgent):
    """Saturating integer hypervectors trained with sparse random updates.

    At round ``t`` each component of the chosen arm takes its ``±1`` step
    with probability ``alpha_t = alpha0 * max(0, 1 - (t - 1) / horizon)``
    and is clipped to ``[-kappa, +kappa]``. Scores are plain inner products.
    """

    kind = "prob"

    def __init__(self, num_actions, dim, kappa=3, alpha0=0.4, horizon=1000,
                 epsilon=0.0, seed=0):
        super().__init__(num_actions, dim, epsilon, seed)
        if kappa < 1:
            raise ValueError("kappa must be a positive integer")
        if not 0.0 <= alpha0 <= 1.0:
            raise ValueError("alpha0 must lie in [0, 1]")
        if horizon < 1:
            raise ValueError("horizon must be positive")
        self.kappa = int(kappa)
        self.alpha0 = float(alpha0)
        self.horizon = int(horizon)
        self.t = 1
        self.acc = np.zeros((self.num_actions, self.dim), np.int32)
        self._mask = rng_mod.stream(self.seed, "agent", "mask")

    @property
    def bits(self):
        return component_bits(self.kappa)

    @property
    def alpha(self):
        """Update probability for the next update."""
        return kernels.update_probability(self.alpha0, self.t, self.horizon)

    def scores(self, x):
        return kernels.inner_scores(self.acc, self._check_input(x))

    def update(self, action, x, reward):
        self._check_action(action)
        x = self._check_input(x)
        mask = self._mask.random(self.dim) < self.alpha
        kernels.masked_saturating_add(
            self.acc[action], self._update_signal(x, reward).astype(np.int32), mask, self.kappa
        )
        self.t += 1
        return int(np.count_nonzero(mask))

    def hypervector(self, action):
        return SatIntHV(self.acc[action], self.kappa)

    def memory_bits(self):
        return agent_memory_bits("prob", self.num_actions, None, self.dim, kappa=self.kappa)


def update_probability(alpha0, t, horizon):
    """``alpha0 * max(0, 1 - (t - 1) / horizon)``, exact at ``t = 1`` and ``t = horizon``."""
    return kernels.update_probability(alpha0, t, horizon)


def agent_memory_bits(kind, num_actions, context_dim, dim, bits=None, kappa=None):
    """Theoretical state size in bits.

    LinEPS stores ``A_a^{-1}`` and ``b_a`` as 32-bit words; HD-CB_REAL stores
    32-bit components; HD-CB_BIN stores a Q-bit accumulator, a 1-bit copy and
    a Q-bit counter per arm; HD-CB_PROB stores ``ceil(log2(2 kappa + 1))``
    bits per component and nothing else.
    """
    n = int(num_actions)
    if kind == "lineps":
        d = int(context_dim)
        return n * (d * d + d) * WIDE_BITS
    if kind == "real":
        return n * int(dim) * WIDE_BITS
    if kind == "bin":
        q = int(bits)
        return n * (int(dim) * q + int(dim) + q)
    if kind == "prob":
        if kappa is None:
            kappa = kappa_for_bits(bits)
        return n * int(dim) * component_bits(kappa)
    raise ValueError(f"unknown agent kind {kind!r}")


@dataclass(frozen=True)
class AgentSpec:
    """Which agent to build. ``epsilon=None`` means tune it by grid search."""

    kind: str
    bits: int | None = None
    epsilon: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown agent kind {self.kind!r}; expected one of {KINDS}")
        if self.kind in ("bin", "prob"):
            if self.bits is None or int(self.bits) < 2:
                raise ValueError(f"agent {self.kind!r} needs bits >= 2")
        elif self.bits is not None and int(self.bits) != WIDE_BITS:
            raise ValueError(f"agent {self.kind!r} does not take a bits setting")
        if self.epsilon is not None and not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")

    @property
    def storage_bits(self):
        return WIDE_BITS if self.kind in ("lineps", "real") else int(self.bits)

    @property
    def kappa(self):
        return kappa_for_bits(self.bits) if self.kind in ("bin", "prob") else None

    @property
    def label(self):
        if self.kind == "lineps":
            return "LinEPS"
        if self.kind == "real":
            return "HD-CB_REAL"
        if self.kind == "bin":
            return f"HD-CB_BIN(Q={self.bits})"
        return f"HD-CB_PROB(kappa={self.kappa})"

    def with_epsilon(self, epsilon):
        return AgentSpec(self.kind, self.bits, epsilon)

    def build(self, num_actions, context_dim, dim, seed, epsilon=None,
              alpha0=0.4, horizon=1000):
        eps = self.epsilon if epsilon is None else epsilon
        if eps is None:
            raise ValueError("epsilon not set")
        if self.kind == "lineps":
            return LinEPS(num_actions, context_dim, eps, seed)
        if self.kind == "real":
            return HDReal(num_actions, dim, eps, seed)
        if self.kind == "bin":
            return HDBin(num_actions, dim, self.bits, eps, seed)
        return HDProb(num_actions, dim, self.kappa, alpha0, horizon, eps, seed)

    def to_dict(self):
        out = {"kind": self.kind}
        if self.bits is not None:
            out["bits"] = self.bits
        if self.epsilon is not None:
            out["epsilon"] = self.epsilon
        return out


TABLE_AGENTS = (
    AgentSpec("lineps"),
    AgentSpec("real"),
    AgentSpec("bin", 2),
    AgentSpec("bin", 3),
    AgentSpec("bin", 4),
    AgentSpec("prob", 2),
    AgentSpec("prob", 3),
    AgentSpec("prob", 4),
)
