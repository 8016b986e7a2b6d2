"""Run the three randomized property suites outside pytest, with timing.

Reproduces the heavy acceptance checks as a standalone experiment:
  1. connectivity of the admissible-order swap graph,
  2. soundness of the single-realization required-variable oracle,
  3. strategy invariance across schemas on welldefined diagrams.

Usage: python3 scripts/run_suites.py [--pids N] [--classic N] [--welldefined N]
"""
from __future__ import annotations

import argparse
import itertools
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from pidcheck.analysis import Analysis, check_welldefined
from pidcheck.generate import random_classic_id, random_pid
from pidcheck.oracle import (
    Comparison,
    oracle_required,
    random_realization,
    solve,
    strategies_equal,
)
from pidcheck.ordering import canonical_schema, enumerate_schemas, induce_partial_order


def admissible_orders(po):
    def rec(remaining, acc):
        if not remaining:
            yield tuple(acc)
            return
        for v in remaining:
            if any(po.precedes(u, v) for u in remaining if u != v):
                continue
            yield from rec([u for u in remaining if u != v], acc + [v])

    yield from rec(list(po.carrier), [])


def suite_swap_connectivity(n: int) -> None:
    t0 = time.perf_counter()
    made = attempt = 0
    sizes = []
    while made < n:
        d = random_pid(np.random.default_rng(10_000 + attempt), max_carrier=8)
        attempt += 1
        po = induce_partial_order(d)
        orders = list(itertools.islice(admissible_orders(po), 6001))
        if len(orders) > 6000:
            continue
        index = set(orders)
        seen = {orders[0]}
        queue = [orders[0]]
        while queue:
            o = queue.pop()
            for i in range(len(o) - 1):
                if po.incompatible(o[i], o[i + 1]):
                    s = o[:i] + (o[i + 1], o[i]) + o[i + 2:]
                    if s not in seen:
                        seen.add(s)
                        queue.append(s)
        assert seen == index, f"swap graph disconnected (seed {10_000 + attempt - 1})"
        sizes.append(len(orders))
        made += 1
    print(
        f"swap connectivity : {n} diagrams, {sum(sizes)} orders total, "
        f"largest {max(sizes)} [{time.perf_counter() - t0:.1f}s]"
    )


def suite_oracle_soundness(n: int, realizations: int = 20) -> None:
    t0 = time.perf_counter()
    checks = 0
    for i in range(n):
        d = random_classic_id(np.random.default_rng(20_000 + i))
        analysis = Analysis(d)
        schema = canonical_schema(d, analysis.po)
        required = {dec: analysis.required_variables(schema, dec) for dec in d.decision_ids}
        for t in range(realizations):
            r = random_realization(d, t)
            for dec in d.decision_ids:
                assert oracle_required(d, r, schema, dec) <= required[dec], (i, t, dec)
                checks += 1
    print(
        f"oracle soundness  : {n} diagrams x {realizations} realizations, "
        f"{checks} inclusions [{time.perf_counter() - t0:.1f}s]"
    )


def suite_strategy_invariance(n: int, realizations: int = 20) -> None:
    t0 = time.perf_counter()
    made = attempt = comparisons = 0
    while made < n:
        d = random_pid(np.random.default_rng(30_000 + attempt), max_carrier=6)
        attempt += 1
        schemas = list(enumerate_schemas(d))
        if not (2 <= len(schemas) <= 12) or not check_welldefined(d).welldefined:
            continue
        made += 1
        for t in range(realizations):
            r = random_realization(d, t)
            solved = [solve(d, r, s)[0] for s in schemas]
            for a, b in itertools.combinations(solved, 2):
                assert strategies_equal(a, b) is not Comparison.DIFFERENT
                comparisons += 1
    print(
        f"strategy invariance: {n} welldefined diagrams, {comparisons} schema-pair "
        f"comparisons [{time.perf_counter() - t0:.1f}s]"
    )


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--pids", type=int, default=200)
    parser.add_argument("--classic", type=int, default=100)
    parser.add_argument("--welldefined", type=int, default=50)
    args = parser.parse_args()
    suite_swap_connectivity(args.pids)
    suite_oracle_soundness(args.classic)
    suite_strategy_invariance(args.welldefined)


if __name__ == "__main__":
    main()
