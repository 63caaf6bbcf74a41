"""Compare the pure-Python and compiled FCFS chains on the same arrivals.

    python benchmarks/bench_simulate.py --steps 1000000
"""

import argparse
import time
from fractions import Fraction

from matchbraess.kernel import CFCFSChain, PyFCFSChain
from matchbraess.model import ArrivalSpec, MatchingGraph, build_model
from matchbraess.oracle import simulate


def quasi_complete(delta):
    graph = MatchingGraph.from_edges("1234", [("4", "2"), ("1", "3"), ("2", "3"), ("3", "4"), ("4", "1")])
    spec = ArrivalSpec.affine(
        {"1": Fraction(1, 4), "2": Fraction(1, 4), "3": Fraction(1, 2), "4": 0},
        {"1": -1, "2": -1, "3": -1, "4": 3},
        Fraction(1, 6),
    )
    return build_model(graph, spec, delta)


def timed(model, steps, seed, chain_cls):
    start = time.perf_counter()
    res = simulate(model, steps, seed, chain_cls=chain_cls)
    return time.perf_counter() - start, res


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--steps", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", default="1/8")
    args = p.parse_args()
    model = quasi_complete(Fraction(args.delta))

    backends = [("python", PyFCFSChain)]
    if CFCFSChain is not None:
        backends.append(("cython", CFCFSChain))
    else:
        print("compiled kernel not built; timing the pure-Python chain only")

    results = {}
    for name, cls in backends:
        secs, res = timed(model, args.steps, args.seed, cls)
        results[name] = (secs, res)
        print(f"{name:7s} {secs:8.3f} s  {args.steps / secs / 1e6:7.2f} M steps/s  mean {res.mean_estimate:.6f} +/- {res.ci_halfwidth:.6f}")

    if len(results) == 2:
        (tp, rp), (tc, rc) = results["python"], results["cython"]
        assert rp.mean_estimate == rc.mean_estimate, "backends disagree"
        print(f"speedup {tp / tc:.1f}x, identical estimates")


if __name__ == "__main__":
    main()
