"""Experiment orchestration.

A replicate ``k`` of an experiment is fully determined by the replicate seed
``seed + k``. The environment and encoder streams derive from it, and so do
the agent streams, which lets replicates run standalone or in parallel
processes. Within a replicate, all agents and all epsilon values see the
same contexts and reward draws.

The headline metric is the mean reward per round at the horizon
(cumulative reward / T), averaged over replicates.
"""

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from . import kernels
from . import rng as rng_mod
from .agents import TABLE_AGENTS, AgentSpec, agent_memory_bits
from .encoding import DEFAULT_CLIP_RANGE, DEFAULT_LEVELS, ContextEncoder
from .env import SyntheticEnv

DEFAULT_EPSILON_GRID = (0.01, 0.02, 0.05, 0.1, 0.2, 0.3)
TABLE_NUM_ACTIONS = (10, 15, 20)
TABLE_CONTEXT_DIMS = (5, 10, 15)
MEMORY_CONTEXT_DIMS = (8, 16, 32, 64, 128)
MEMORY_BITS = (2, 3, 4)


class ConfigError(ValueError):
    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class ExperimentConfig:
    num_actions: int = 10
    context_dim: int = 5
    dim: int = 1024
    horizon: int = 1000
    replicates: int = 50
    agents: tuple = TABLE_AGENTS
    epsilon_grid: tuple = DEFAULT_EPSILON_GRID
    alpha0: float = 0.4
    seed: int = 0
    levels: int = DEFAULT_LEVELS
    clip_range: tuple = DEFAULT_CLIP_RANGE
    sweep_num_actions: tuple = TABLE_NUM_ACTIONS
    sweep_context_dims: tuple = TABLE_CONTEXT_DIMS
    out_dir: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name, symbol in (("num_actions", "N"), ("context_dim", "d"), ("dim", "D"),
                             ("horizon", "T"), ("replicates", "R"), ("levels", "L")):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ConfigError(name, f"{name} ({symbol}) must be an integer, got {value!r}")
            if value < 1:
                raise ConfigError(name, f"{name} ({symbol}) must be >= 1, got {value}")
        if not self.agents:
            raise ConfigError("agents", "at least one agent is required")
        for spec in self.agents:
            if not isinstance(spec, AgentSpec):
                raise ConfigError("agents", f"expected AgentSpec, got {spec!r}")
        if not self.epsilon_grid:
            raise ConfigError("epsilon_grid", "epsilon grid must be non-empty")
        for eps in self.epsilon_grid:
            if not 0.0 <= eps <= 1.0:
                raise ConfigError("epsilon_grid", f"epsilon {eps} outside [0, 1]")
        if not 0.0 <= self.alpha0 <= 1.0:
            raise ConfigError("alpha0", f"alpha0 must lie in [0, 1], got {self.alpha0}")
        try:
            rng_mod.check_seed(self.seed)
        except (TypeError, ValueError) as exc:
            raise ConfigError("seed", str(exc)) from None
        lo, hi = self.clip_range
        if not hi > lo:
            raise ConfigError("clip_range", "clip_range must satisfy lo < hi")
        for name in ("sweep_num_actions", "sweep_context_dims"):
            values = getattr(self, name)
            if not values or any(int(v) < 1 for v in values):
                raise ConfigError(name, f"{name} must be a non-empty list of positive integers")

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(unknown[0], f"unknown config field(s): {', '.join(unknown)}")
        kwargs = dict(data)
        if "agents" in kwargs:
            kwargs["agents"] = tuple(_agent_from_dict(a) for a in kwargs["agents"])
        for name in ("epsilon_grid", "clip_range", "sweep_num_actions", "sweep_context_dims"):
            if name in kwargs:
                if not isinstance(kwargs[name], list):
                    raise ConfigError(name, f"{name} must be a list")
                kwargs[name] = tuple(kwargs[name])
        if "clip_range" in kwargs and len(kwargs["clip_range"]) != 2:
            raise ConfigError("clip_range", "clip_range must be [lo, hi]")
        try:
            return cls(**kwargs)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError("config", str(exc)) from None

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError("config", f"invalid JSON in {path}: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self):
        out = asdict(self)
        out["agents"] = [a.to_dict() for a in self.agents]
        for name in ("epsilon_grid", "clip_range", "sweep_num_actions", "sweep_context_dims"):
            out[name] = list(out[name])
        return out

    def replicate_seed(self, k):
        return (int(self.seed) + int(k)) % (rng_mod.SEED_MAX + 1)


def _agent_from_dict(data):
    if not isinstance(data, dict):
        raise ConfigError("agents", f"agent entry must be an object, got {data!r}")
    unknown = sorted(set(data) - {"kind", "bits", "epsilon"})
    if unknown:
        raise ConfigError("agents", f"unknown agent field(s): {', '.join(unknown)}")
    if "kind" not in data:
        raise ConfigError("agents", "agent entry needs a 'kind'")
    try:
        return AgentSpec(data["kind"], data.get("bits"), data.get("epsilon"))
    except ValueError as exc:
        raise ConfigError("agents", str(exc)) from None


@dataclass(frozen=True)
class RunRecord:
    round: int
    action: int
    reward: int
    cumulative_reward: int
    best_prob: float


@dataclass
class Summary:
    agent: str
    epsilon: float
    mean_reward: float
    std: float
    stderr: float
    replicates: int
    horizon_rewards: np.ndarray = field(repr=False)
    trajectory_mean: np.ndarray = field(repr=False)
    trajectory_stderr: np.ndarray = field(repr=False)


def summarize(rewards, agent="", epsilon=float("nan")):
    """Aggregate an ``(R, T)`` array of per-round 0/1 rewards.

    Cumulative rewards are integers, so per-round means are exact; spreads
    are computed on sorted values, which makes the result independent of
    replicate order.
    """
    rewards = np.asarray(rewards)
    if rewards.ndim != 2 or rewards.size == 0:
        raise ValueError("rewards must be a non-empty (R, T) array")
    n_rep, horizon = rewards.shape
    cum = np.cumsum(rewards.astype(np.int64), axis=1)
    totals = np.sort(cum[:, -1])
    horizon_rewards = totals / horizon
    mean = float(totals.sum() / (n_rep * horizon))
    std = float(np.std(horizon_rewards, ddof=1)) if n_rep > 1 else 0.0
    traj_mean = cum.sum(axis=0) / n_rep
    if n_rep > 1:
        traj_se = np.std(np.sort(cum, axis=0), axis=0, ddof=1) / math.sqrt(n_rep)
    else:
        traj_se = np.zeros(horizon)
    return Summary(
        agent=agent,
        epsilon=float(epsilon),
        mean_reward=mean,
        std=std,
        stderr=std / math.sqrt(n_rep),
        replicates=n_rep,
        horizon_rewards=horizon_rewards,
        trajectory_mean=traj_mean,
        trajectory_stderr=traj_se,
    )


# -- replicates --------------------------------------------------------------


@dataclass
class Replicate:
    """Per-replicate inputs shared by all agents, including pre-drawn random blocks."""

    index: int
    seed: int
    env: SyntheticEnv
    encoder: ContextEncoder
    contexts: np.ndarray
    hvs: np.ndarray
    reward_u: np.ndarray

    def best_probs(self):
        """Oracle success probability per round (reporting only; agents never see it)."""
        return kernels.best_probs(self.contexts, self.env.theta, self.env.beta)


def prepare_replicate(config, k):
    seed = config.replicate_seed(k)
    env = SyntheticEnv(config.num_actions, config.context_dim, seed=seed)
    encoder = ContextEncoder(config.dim, config.context_dim, config.levels,
                             config.clip_range, seed=seed)
    contexts = env.sample_contexts(config.horizon)
    reward_u = env.reward_uniforms(config.horizon)
    hvs = None
    if any(a.kind != "lineps" for a in config.agents):
        hvs = encoder.encode_batch(contexts)
    return Replicate(k, seed, env, encoder, contexts, hvs, reward_u)


def agent_seed(replicate_seed, spec):
    return rng_mod.derive_seed(replicate_seed, "agent", spec.label)


class _AgentStreams:
    """Pre-drawn exploration (and mask) blocks for one agent in one replicate.

    The blocks depend only on the replicate and the agent, never on epsilon,
    so they are shared by every point of an epsilon grid.
    """

    def __init__(self, rep, spec, config):
        seed = agent_seed(rep.seed, spec)
        horizon = config.horizon
        self.explore = rng_mod.stream(seed, "agent", "explore").random((horizon, 2))
        if spec.kind == "prob":
            self.mask_u = rng_mod.stream(seed, "agent", "mask").random((horizon, config.dim))
        else:
            self.mask_u = np.zeros((1, 1))


def _fused_episode(rep, spec, epsilon, streams, config, backend=None):
    kern = backend or kernels.active
    env = rep.env
    if spec.kind == "lineps":
        return kern.episode_lin(rep.contexts, env.theta, env.beta, rep.reward_u,
                                streams.explore, float(epsilon), 1.0)
    kind = {"real": kernels.KIND_REAL, "bin": kernels.KIND_BIN, "prob": kernels.KIND_PROB}[spec.kind]
    bound = spec.kappa if spec.kappa is not None else 0
    period = 2 ** spec.bits if spec.kind == "bin" else 0
    return kern.episode_hd(kind, rep.hvs, rep.contexts, env.theta, env.beta, rep.reward_u,
                           streams.explore, streams.mask_u, float(epsilon), int(bound),
                           int(period), float(config.alpha0))


def _drive(config, rep_index, agent, raw_context):
    seed = config.replicate_seed(rep_index)
    env = SyntheticEnv(config.num_actions, config.context_dim, seed=seed)
    encoder = None
    if not raw_context:
        encoder = ContextEncoder(config.dim, config.context_dim, config.levels,
                                 config.clip_range, seed=seed)
    actions = np.empty(config.horizon, np.int64)
    rewards = np.empty(config.horizon, np.int8)
    best = np.empty(config.horizon)
    for t in range(config.horizon):
        x = env.sample_context()
        obs = x if raw_context else encoder.encode(x)
        a = agent.select(obs)
        r = env.sample_reward(x, a)
        agent.update(a, obs, r)
        actions[t] = a
        rewards[t] = r
        best[t] = env.best_action(x)[1]
    return actions, rewards, best


def _stepwise_episode(config, rep_index, spec, epsilon):
    seed = config.replicate_seed(rep_index)
    agent = spec.build(config.num_actions, config.context_dim, config.dim,
                       agent_seed(seed, spec), epsilon, config.alpha0, config.horizon)
    return _drive(config, rep_index, agent, spec.kind == "lineps")


def run_agent(config, agent, replicate=0, raw_context=True):
    """Drive any object with ``select(obs)`` and ``update(a, obs, r)`` for one replicate.

    The environment is the one replicate ``replicate`` would use, so custom
    policies (oracles, baselines) see the same contexts and reward draws as
    the built-in agents. With ``raw_context=False`` observations are encoded
    hypervectors.
    """
    return _records(*_drive(config, replicate, agent, raw_context))


def _records(actions, rewards, best):
    cum = np.cumsum(rewards.astype(np.int64))
    return [RunRecord(t + 1, int(actions[t]), int(rewards[t]), int(cum[t]), float(best[t]))
            for t in range(actions.shape[0])]


def run_episode(config, replicate=0, agent=None, epsilon=None, stepwise=False):
    """Run one agent for ``config.horizon`` rounds on replicate ``replicate``.

    ``stepwise=True`` drives the public ``select``/``update`` API round by
    round instead of the fused kernel; both produce identical records.
    """
    spec = agent or config.agents[0]
    eps = spec.epsilon if epsilon is None else epsilon
    if eps is None:
        raise ValueError(f"no epsilon given for agent {spec.label}")
    if stepwise:
        return _records(*_stepwise_episode(config, replicate, spec, eps))
    rep = prepare_replicate(replace(config, agents=(spec,)), replicate)
    actions, rewards = _fused_episode(rep, spec, eps, _AgentStreams(rep, spec, config), config)
    return _records(actions, rewards, rep.best_probs())


def _plan(config, agents):
    """Map each agent to the epsilon values it must be run with."""
    plan = []
    for spec in agents:
        eps_values = (spec.epsilon,) if spec.epsilon is not None else tuple(config.epsilon_grid)
        plan.append((spec, eps_values))
    return plan


def _replicate_job(config, k, plan):
    rep = prepare_replicate(config, k)
    out = {}
    for spec, eps_values in plan:
        streams = _AgentStreams(rep, spec, config)
        for eps in eps_values:
            _, rewards = _fused_episode(rep, spec, eps, streams, config)
            out[(spec, eps)] = rewards
    return out


def _run_plan(config, plan, workers=1):
    config = replace(config, agents=tuple(spec for spec, _ in plan))
    indices = range(config.replicates)
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_replicate_job, [config] * len(indices), indices,
                                  [plan] * len(indices)))
    else:
        parts = [_replicate_job(config, k, plan) for k in indices]
    results = {}
    for spec, eps_values in plan:
        for eps in eps_values:
            block = np.stack([part[(spec, eps)] for part in parts])
            results[(spec, eps)] = summarize(block, spec.label, eps)
    return results


def best_epsilon(summaries):
    """Epsilon with the highest horizon mean; ties go to the smaller epsilon."""
    return min(summaries, key=lambda eps: (-summaries[eps].mean_reward, eps))


@dataclass
class AgentResult:
    spec: AgentSpec
    epsilon: float
    summary: Summary
    by_epsilon: dict


def evaluate(config, agents=None, workers=1):
    """Run every agent (tuning epsilon where unset) on shared replicates."""
    plan = _plan(config, agents or config.agents)
    results = _run_plan(config, plan, workers)
    out = []
    for spec, eps_values in plan:
        by_eps = {eps: results[(spec, eps)] for eps in eps_values}
        eps = best_epsilon(by_eps)
        out.append(AgentResult(spec, eps, by_eps[eps], by_eps))
    return out


def run_experiment(config, agent=None, epsilon=None, workers=1):
    spec = agent or config.agents[0]
    eps = spec.epsilon if epsilon is None else epsilon
    if eps is None:
        raise ValueError(f"no epsilon given for agent {spec.label}")
    return _run_plan(config, [(spec, (eps,))], workers)[(spec, eps)]


def grid_search_epsilon(config, grid=None, agent=None, workers=1):
    grid = tuple(config.epsilon_grid if grid is None else grid)
    if not grid:
        raise ValueError("epsilon grid must be non-empty")
    for eps in grid:
        if not 0.0 <= eps <= 1.0:
            raise ValueError(f"epsilon {eps} outside [0, 1]")
    spec = agent or config.agents[0]
    results = _run_plan(config, [(spec, grid)], workers)
    summaries = {eps: results[(spec, eps)] for eps in grid}
    return best_epsilon(summaries), summaries


@dataclass(frozen=True)
class SweepRow:
    agent: str
    num_actions: int
    context_dim: int
    dim: int
    bits: int
    epsilon: float
    mean_reward: float
    std: float
    replicates: int


def sweep(config, workers=1, progress=None):
    rows = []
    for n in config.sweep_num_actions:
        for d in config.sweep_context_dims:
            cell = replace(config, num_actions=int(n), context_dim=int(d))
            for res in evaluate(cell, workers=workers):
                rows.append(SweepRow(res.spec.label, int(n), int(d), cell.dim,
                                     res.spec.storage_bits, res.epsilon,
                                     res.summary.mean_reward, res.summary.std,
                                     res.summary.replicates))
            if progress is not None:
                progress(n, d)
    return rows


@dataclass(frozen=True)
class MemoryRow:
    algorithm: str
    bits: int
    d: int
    kib: float


def memory_table(num_actions=10, context_dims=MEMORY_CONTEXT_DIMS, dim=1024,
                 bit_settings=MEMORY_BITS):
    rows = []
    for d in context_dims:
        rows.append(MemoryRow("LinEPS", 32, d,
                              agent_memory_bits("lineps", num_actions, d, dim) / 8192))
        rows.append(MemoryRow("HD-CB_REAL", 32, d,
                              agent_memory_bits("real", num_actions, d, dim) / 8192))
        for bits in bit_settings:
            rows.append(MemoryRow("HD-CB_BIN", bits, d,
                                  agent_memory_bits("bin", num_actions, d, dim, bits=bits) / 8192))
        for bits in bit_settings:
            rows.append(MemoryRow("HD-CB_PROB", bits, d,
                                  agent_memory_bits("prob", num_actions, d, dim, bits=bits) / 8192))
    return rows
