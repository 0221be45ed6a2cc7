"""Hot loops: similarity scores, saturating updates and fused episodes.

Every kernel exists twice: a plain-loop version compiled with numba and a
vectorized numpy version. ``BACKEND`` names the active one (see
:mod:`hdbandit._accel` for the switch). Both backends consume the same
pre-drawn random blocks, so their trajectories agree action for action.

Random blocks consumed by the fused episodes, per round ``t``:

* ``explore[t] = (q, u)``: explore if ``q < epsilon``, then pick ``floor(u * N)``.
* ``reward_u[t]``: reward is 1 iff ``reward_u[t] < p(x_t, a_t)``.
* ``mask_u[t, :]``: component ``i`` of the probabilistic update fires iff
  ``mask_u[t, i] < alpha_t``.
"""

import math

import numpy as np

from ._accel import USE_NUMBA, njit

BACKEND = "numba" if USE_NUMBA else "numpy"

KIND_REAL = 0
KIND_BIN = 1
KIND_PROB = 2


# -- scalar helpers (shared by both backends, fixed summation order) --------


def _reward_prob(x, theta_a, beta_a):
    z = 0.0
    for j in range(x.shape[0]):
        z += x[j] * theta_a[j]
    z += beta_a
    return 1.0 / (1.0 + math.exp(-z))


def _update_probability(alpha0, t, horizon):
    remaining = horizon - (t - 1)
    if remaining <= 0:
        return 0.0
    if remaining >= horizon:
        return alpha0
    return alpha0 * remaining / horizon


def _explore_pick(q, u, epsilon, n):
    """Return the exploratory action, or -1 when the round exploits."""
    if q < epsilon:
        a = int(u * n)
        return a if a < n else n - 1
    return -1


reward_prob = _reward_prob
update_probability = _update_probability
explore_pick = _explore_pick

_reward_prob_jit = njit(cache=True)(_reward_prob)
_update_probability_jit = njit(cache=True)(_update_probability)
_explore_pick_jit = njit(cache=True)(_explore_pick)


# -- similarity scores -------------------------------------------------------


def _inner_scores_loop(acc, x):
    n, dim = acc.shape
    out = np.zeros(n, np.int64)
    for k in range(n):
        s = 0
        for i in range(dim):
            s += np.int64(acc[k, i]) * np.int64(x[i])
        out[k] = s
    return out


def _inner_scores_numpy(acc, x):
    return acc.astype(np.int64) @ x.astype(np.int64)


def _cosine_scores_loop(acc, x):
    n, dim = acc.shape
    xx = 0
    for i in range(dim):
        xx += np.int64(x[i]) * np.int64(x[i])
    out = np.zeros(n, np.float64)
    for k in range(n):
        ip = 0
        nn = 0
        for i in range(dim):
            v = np.int64(acc[k, i])
            ip += v * np.int64(x[i])
            nn += v * v
        if nn == 0 or xx == 0:
            out[k] = 0.0
        else:
            out[k] = np.float64(ip) / (np.sqrt(np.float64(nn)) * np.sqrt(np.float64(xx)))
    return out


def _cosine_scores_numpy(acc, x):
    wide = acc.astype(np.int64)
    xw = x.astype(np.int64)
    ip = wide @ xw
    nn = np.einsum("ij,ij->i", wide, wide)
    xx = np.int64(xw @ xw)
    out = np.zeros(acc.shape[0], np.float64)
    if xx == 0:
        return out
    ok = nn != 0
    out[ok] = ip[ok].astype(np.float64) / (
        np.sqrt(nn[ok].astype(np.float64)) * np.sqrt(np.float64(xx))
    )
    return out


def _hamming_scores_loop(copies, x):
    n, dim = copies.shape
    out = np.zeros(n, np.int64)
    for k in range(n):
        h = 0
        for i in range(dim):
            if copies[k, i] != x[i]:
                h += 1
        out[k] = h
    return out


def _hamming_scores_numpy(copies, x):
    return np.count_nonzero(copies != x[None, :], axis=1).astype(np.int64)


# -- in-place saturating update ---------------------------------------------


def _masked_saturating_add_loop(acc, delta, mask, bound):
    for i in range(acc.shape[0]):
        if mask[i]:
            v = acc[i] + delta[i]
            if v > bound:
                v = bound
            elif v < -bound:
                v = -bound
            acc[i] = v


def _masked_saturating_add_numpy(acc, delta, mask, bound):
    stepped = np.clip(acc.astype(np.int64) + delta, -bound, bound)
    acc[mask] = stepped[mask]


# -- ridge statistics --------------------------------------------------------


def _sherman_morrison_loop(a_inv, x):
    d = x.shape[0]
    ax = np.zeros(d)
    for i in range(d):
        s = 0.0
        for j in range(d):
            s += a_inv[i, j] * x[j]
        ax[i] = s
    denom = 1.0
    for i in range(d):
        denom += x[i] * ax[i]
    for i in range(d):
        for j in range(d):
            a_inv[i, j] -= ax[i] * ax[j] / denom


def _sherman_morrison_numpy(a_inv, x):
    ax = a_inv @ x
    a_inv -= np.outer(ax, ax) / (1.0 + x @ ax)


def _matvec_loop(m, v):
    rows, cols = m.shape
    out = np.zeros(rows)
    for i in range(rows):
        s = 0.0
        for j in range(cols):
            s += m[i, j] * v[j]
        out[i] = s
    return out


def _matvec_numpy(m, v):
    return m @ v


def _best_probs_loop(contexts, theta, beta):
    horizon = contexts.shape[0]
    out = np.empty(horizon)
    for t in range(horizon):
        best = 0.0
        for a in range(theta.shape[0]):
            p = _reward_prob_jit(contexts[t], theta[a], beta[a])
            if p > best:
                best = p
        out[t] = best
    return out


def _best_probs_numpy(contexts, theta, beta):
    # Scalar path on purpose: matches the per-arm probabilities bit for bit.
    return np.array([
        max(_reward_prob(contexts[t], theta[a], beta[a]) for a in range(theta.shape[0]))
        for t in range(contexts.shape[0])
    ], dtype=np.float64).reshape(contexts.shape[0])


_best_probs_jit = njit(cache=True)(_best_probs_loop)
_inner_scores_jit = njit(cache=True)(_inner_scores_loop)
_cosine_scores_jit = njit(cache=True)(_cosine_scores_loop)
_hamming_scores_jit = njit(cache=True)(_hamming_scores_loop)
_masked_saturating_add_jit = njit(cache=True)(_masked_saturating_add_loop)
_sherman_morrison_jit = njit(cache=True)(_sherman_morrison_loop)
_matvec_jit = njit(cache=True)(_matvec_loop)


# -- fused episodes ----------------------------------------------------------


def _episode_hd_loop(kind, hvs, contexts, theta, beta, reward_u, explore, mask_u,
                     epsilon, bound, period, alpha0):
    horizon, dim = hvs.shape
    n = theta.shape[0]
    acc = np.zeros((n, dim), np.int32)
    copies = np.ones((n, dim), np.int8)
    counts = np.zeros(n, np.int64)
    actions = np.empty(horizon, np.int64)
    rewards = np.empty(horizon, np.int8)
    for t in range(horizon):
        x = hvs[t]
        a = _explore_pick_jit(explore[t, 0], explore[t, 1], epsilon, n)
        if a < 0:
            if kind == KIND_REAL:
                cos = _cosine_scores_jit(acc, x)
                a = 0
                for k in range(1, n):
                    if cos[k] > cos[a]:
                        a = k
            elif kind == KIND_BIN:
                ham = _hamming_scores_jit(copies, x)
                a = 0
                for k in range(1, n):
                    if ham[k] < ham[a]:
                        a = k
            else:
                ip = _inner_scores_jit(acc, x)
                a = 0
                for k in range(1, n):
                    if ip[k] > ip[a]:
                        a = k
        p = _reward_prob_jit(contexts[t], theta[a], beta[a])
        r = 1 if reward_u[t] < p else 0
        actions[t] = a
        rewards[t] = r
        sign = 1 if r == 1 else -1
        if kind == KIND_REAL:
            for i in range(dim):
                acc[a, i] += sign * x[i]
        elif kind == KIND_BIN:
            for i in range(dim):
                v = acc[a, i] + sign * x[i]
                if v > bound:
                    v = bound
                elif v < -bound:
                    v = -bound
                acc[a, i] = v
                copies[a, i] = 1 if v >= 0 else -1
            counts[a] += 1
            if counts[a] == period:
                for i in range(dim):
                    acc[a, i] = copies[a, i]
                counts[a] = 0
        else:
            alpha = _update_probability_jit(alpha0, t + 1, horizon)
            for i in range(dim):
                if mask_u[t, i] < alpha:
                    v = acc[a, i] + sign * x[i]
                    if v > bound:
                        v = bound
                    elif v < -bound:
                        v = -bound
                    acc[a, i] = v
    return actions, rewards


def _episode_hd_numpy(kind, hvs, contexts, theta, beta, reward_u, explore, mask_u,
                      epsilon, bound, period, alpha0):
    horizon, dim = hvs.shape
    n = theta.shape[0]
    acc = np.zeros((n, dim), np.int32)
    copies = np.ones((n, dim), np.int8)
    counts = np.zeros(n, np.int64)
    actions = np.empty(horizon, np.int64)
    rewards = np.empty(horizon, np.int8)
    for t in range(horizon):
        x = hvs[t]
        a = _explore_pick(explore[t, 0], explore[t, 1], epsilon, n)
        if a < 0:
            if kind == KIND_REAL:
                a = int(np.argmax(_cosine_scores_numpy(acc, x)))
            elif kind == KIND_BIN:
                a = int(np.argmin(_hamming_scores_numpy(copies, x)))
            else:
                a = int(np.argmax(_inner_scores_numpy(acc, x)))
        p = _reward_prob(contexts[t], theta[a], beta[a])
        r = 1 if reward_u[t] < p else 0
        actions[t] = a
        rewards[t] = r
        step = x if r == 1 else -x
        if kind == KIND_REAL:
            acc[a] += step
        elif kind == KIND_BIN:
            acc[a] = np.clip(acc[a] + step, -bound, bound)
            copies[a] = np.where(acc[a] >= 0, 1, -1)
            counts[a] += 1
            if counts[a] == period:
                acc[a] = copies[a]
                counts[a] = 0
        else:
            alpha = _update_probability(alpha0, t + 1, horizon)
            _masked_saturating_add_numpy(acc[a], step, mask_u[t] < alpha, bound)
    return actions, rewards


def _episode_lin_loop(contexts, theta, beta, reward_u, explore, epsilon, lam):
    horizon, d = contexts.shape
    n = theta.shape[0]
    a_inv = np.zeros((n, d, d))
    for k in range(n):
        for i in range(d):
            a_inv[k, i, i] = 1.0 / lam
    b = np.zeros((n, d))
    theta_hat = np.zeros((n, d))
    actions = np.empty(horizon, np.int64)
    rewards = np.empty(horizon, np.int8)
    for t in range(horizon):
        x = contexts[t]
        a = _explore_pick_jit(explore[t, 0], explore[t, 1], epsilon, n)
        if a < 0:
            scores = _matvec_jit(theta_hat, x)
            a = 0
            for k in range(1, n):
                if scores[k] > scores[a]:
                    a = k
        p = _reward_prob_jit(x, theta[a], beta[a])
        r = 1 if reward_u[t] < p else 0
        actions[t] = a
        rewards[t] = r
        _sherman_morrison_jit(a_inv[a], x)
        for j in range(d):
            b[a, j] += r * x[j]
        theta_hat[a] = _matvec_jit(a_inv[a], b[a])
    return actions, rewards


def _episode_lin_numpy(contexts, theta, beta, reward_u, explore, epsilon, lam):
    horizon, d = contexts.shape
    n = theta.shape[0]
    a_inv = np.repeat((np.eye(d) / lam)[None], n, axis=0)
    b = np.zeros((n, d))
    theta_hat = np.zeros((n, d))
    actions = np.empty(horizon, np.int64)
    rewards = np.empty(horizon, np.int8)
    for t in range(horizon):
        x = contexts[t]
        a = _explore_pick(explore[t, 0], explore[t, 1], epsilon, n)
        if a < 0:
            a = int(np.argmax(_matvec_numpy(theta_hat, x)))
        p = _reward_prob(x, theta[a], beta[a])
        r = 1 if reward_u[t] < p else 0
        actions[t] = a
        rewards[t] = r
        _sherman_morrison_numpy(a_inv[a], x)
        b[a] += r * x
        theta_hat[a] = _matvec_numpy(a_inv[a], b[a])
    return actions, rewards


_episode_hd_jit = njit(cache=True)(_episode_hd_loop)
_episode_lin_jit = njit(cache=True)(_episode_lin_loop)


class _Backend:
    def __init__(self, name, **fns):
        self.name = name
        self.__dict__.update(fns)

    def __repr__(self):
        return f"<kernels backend {self.name!r}>"


NUMPY = _Backend(
    "numpy",
    inner_scores=_inner_scores_numpy,
    cosine_scores=_cosine_scores_numpy,
    hamming_scores=_hamming_scores_numpy,
    masked_saturating_add=_masked_saturating_add_numpy,
    sherman_morrison=_sherman_morrison_numpy,
    matvec=_matvec_numpy,
    best_probs=_best_probs_numpy,
    episode_hd=_episode_hd_numpy,
    episode_lin=_episode_lin_numpy,
)

NUMBA = _Backend(
    "numba",
    inner_scores=_inner_scores_jit,
    cosine_scores=_cosine_scores_jit,
    hamming_scores=_hamming_scores_jit,
    masked_saturating_add=_masked_saturating_add_jit,
    sherman_morrison=_sherman_morrison_jit,
    matvec=_matvec_jit,
    best_probs=_best_probs_jit,
    episode_hd=_episode_hd_jit,
    episode_lin=_episode_lin_jit,
)

active = NUMBA if USE_NUMBA else NUMPY

inner_scores = active.inner_scores
cosine_scores = active.cosine_scores
hamming_scores = active.hamming_scores
masked_saturating_add = active.masked_saturating_add
sherman_morrison = active.sherman_morrison
matvec = active.matvec
best_probs = active.best_probs
episode_hd = active.episode_hd
episode_lin = active.episode_lin
