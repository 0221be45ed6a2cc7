"""Time the fused episode kernels under the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [--horizon T] [--dim D] [--repeat K]

Both backends consume identical pre-drawn random blocks, so the script also
checks that they pick the same actions before reporting timings.
"""

import argparse
import statistics
import time

import numpy as np

from hdbandit import kernels
from hdbandit.agents import AgentSpec
from hdbandit.harness import ExperimentConfig, _AgentStreams, _fused_episode, prepare_replicate

SPECS = (AgentSpec("lineps"), AgentSpec("real"), AgentSpec("bin", 3), AgentSpec("prob", 3))


def time_episode(rep, spec, streams, cfg, backend, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = _fused_episode(rep, spec, 0.1, streams, cfg, backend=backend)
        times.append(time.perf_counter() - start)
    return statistics.median(times), out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--num-actions", type=int, default=10)
    parser.add_argument("--context-dim", type=int, default=5)
    parser.add_argument("--dim", type=int, default=1024)
    parser.add_argument("--horizon", type=int, default=1000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    cfg = ExperimentConfig(num_actions=args.num_actions, context_dim=args.context_dim,
                           dim=args.dim, horizon=args.horizon, replicates=1, agents=SPECS)
    rep = prepare_replicate(cfg, 0)
    print(f"N={cfg.num_actions} d={cfg.context_dim} D={cfg.dim} T={cfg.horizon}, "
          f"median of {args.repeat} runs, default backend: {kernels.BACKEND}")
    print(f"{'agent':<22}{'numpy ms':>10}{'numba ms':>10}{'speedup':>9}")
    for spec in SPECS:
        streams = _AgentStreams(rep, spec, cfg)
        _fused_episode(rep, spec, 0.1, streams, cfg, backend=kernels.NUMBA)  # compile
        t_np, out_np = time_episode(rep, spec, streams, cfg, kernels.NUMPY, args.repeat)
        t_nb, out_nb = time_episode(rep, spec, streams, cfg, kernels.NUMBA, args.repeat)
        if not np.array_equal(out_np[0], out_nb[0]):
            raise SystemExit(f"backends disagree for {spec.label}")
        print(f"{spec.label:<22}{t_np * 1e3:>10.2f}{t_nb * 1e3:>10.2f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
