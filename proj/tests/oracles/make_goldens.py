#!/usr/bin/env python3
"""Writes the golden files under tests/oracles/golden.

    make_goldens.py            regenerate
    make_goldens.py --check    exit 1 if any committed file differs
"""

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

try:
    import numpy as np
    from scipy import stats

    import reference as ref
except ImportError as missing:  # ctest treats 77 as skipped
    print(f"skipping: {missing}")
    sys.exit(77)

GOLDEN = Path(__file__).resolve().parent / "golden"

# HumanEval agents: label, mean total cost (USD), mean accuracy
HUMANEVAL_AGENTS = [
    ("LATS (GPT-4)", "134.50", "0.880"),
    ("LATS (GPT-3.5)", "9.49", "0.804"),
    ("LDB (GPT-4, GPT-3.5)", "2.19", "0.910"),
    ("LDB (Reflexion, GPT-4)", "7.26", "0.929"),
    ("LDB (Reflexion, GPT-3.5)", "4.19", "0.889"),
    ("LDB (GPT-4)", "6.36", "0.933"),
    ("LDB (GPT-3.5)", "0.63", "0.802"),
    ("GPT-4", "1.93", "0.896"),
    ("GPT-3.5", "0.05", "0.739"),
    ("Reflexion (GPT-4)", "3.90", "0.878"),
    ("Warming (GPT-4)", "2.45", "0.932"),
    ("Retry (GPT-4)", "2.51", "0.920"),
    ("Escalation", "0.27", "0.850"),
]


def brute_frontier(points):
    """points: (label, Fraction cost, Fraction acc). Returns (non-dominated, hull)."""
    nd = []
    for p in points:
        dominated = any(
            q[1] <= p[1] and q[2] >= p[2] and (q[1] < p[1] or q[2] > p[2]) for q in points
        )
        if not dominated:
            nd.append(p)
    hull = []
    for p in nd:
        below = False
        for a in nd:
            for b in nd:
                if a[1] < p[1] < b[1]:
                    # accuracy of segment a-b at p's cost
                    t = (p[1] - a[1]) / (b[1] - a[1])
                    if p[2] <= a[2] + t * (b[2] - a[2]):
                        below = True
        if not below:
            hull.append(p)
    hull.sort(key=lambda p: p[1])
    return nd, hull


def humaneval_agents():
    pts = [(l, Fraction(c), Fraction(a)) for l, c, a in HUMANEVAL_AGENTS]
    nd, hull = brute_frontier(pts)
    # cheapest mixture reaching a $1.36 budget: between the hull vertices around it
    budget = Fraction("1.36")
    for a, b in zip(hull, hull[1:]):
        if a[1] <= budget <= b[1]:
            p = (b[1] - budget) / (b[1] - a[1])
            mix = {"a": a[0], "b": b[0], "p": str(p), "accuracy": str(p * a[2] + (1 - p) * b[2])}
    return {
        "points": [{"label": l, "cost": c, "accuracy": a} for l, c, a in HUMANEVAL_AGENTS],
        "non_dominated": [p[0] for p in nd],
        "frontier": [p[0] for p in hull],
        "budget_1_36": mix,
    }


def breakeven():
    # GPT-3.5 rows: joint optimization vs few-shot; variable cost quoted per 100 inferences
    fixed_a, var_a = Fraction("2.714"), Fraction("0.174") / 100
    fixed_b, var_b = Fraction("0.029"), Fraction("0.384") / 100
    n = math.ceil((fixed_a - fixed_b) / (var_b - var_a))
    return {"fixed_a": "2.714", "variable_a_per_task": "0.00174",
            "fixed_b": "0.029", "variable_b_per_task": "0.00384",
            "breakeven_tasks": n, "reported": 1275}


def t_values():
    cells = []
    for df in (1, 2, 4, 9, 29):
        for p in (0.975, 0.995):
            cells.append({"df": df, "p": p, "quantile": float(stats.t.ppf(p, df))})
    data = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    half = stats.t.ppf(0.975, 4) * data.std(ddof=1) / math.sqrt(len(data))
    return {"quantiles": cells,
            "interval_1_to_5": {"confidence": 0.95, "low": float(data.mean() - half),
                                "high": float(data.mean() + half)}}


def strategy_mc(n=1_000_000, seed=20240501):
    """Monte Carlo of the simulator's success law with numpy's generator."""
    skill, difficulty, gap, bonus = 0.5, 0.5, 0.2, 0.3
    base = min(1.0, max(0.0, skill - difficulty))
    rng = np.random.default_rng(seed)

    def attempt(temperature, size):
        p_ex = min(1.0, base + bonus + 0.1 * temperature)
        ex = rng.random(size) < p_ex
        carried = ex & (rng.random(size) < 1.0 - gap)
        residual = rng.random(size) < base * (1.0 - gap) * 0.1
        return ex, carried | residual

    def run(schedule):
        done = np.zeros(n, dtype=bool)
        final = np.zeros(n, dtype=bool)
        for t in schedule:
            ex, hid = attempt(t, n)
            take = ~done
            final = np.where(take, hid, final)
            done = done | (take & ex)
        return float(final.mean())

    closed = {
        "zero_shot": 0.8 * 0.3,
        "retry": 0.8 * (1 - 0.7**5),
        "warming": 0.8 * (1 - 0.7 * 0.67**2 * 0.65**2),
    }
    return {
        "spec": {"skill": skill, "difficulty": difficulty, "hidden_gap": gap,
                 "example_pass_bonus": bonus},
        "n": n,
        "monte_carlo": {"zero_shot": run([0.0]), "retry": run([0.0] * 5),
                        "warming": run([0.0, 0.3, 0.3, 0.5, 0.5])},
        "closed_form": closed,
    }


def prng():
    for ctr, key, want in ref.PHILOX_KAT:
        assert ref.philox4x32_10(ctr, key) == want, "Philox known-answer mismatch"
    fox = ref.murmur128(b"The quick brown fox jumps over the lazy dog")
    assert fox == (0xE34BBC7BBC071B6C, 0x7A433CA9C49A9347), "murmur known-answer mismatch"

    draws = []
    for run_seed, task, attempt, model, temp in [
        (0, "t0", 0, "m", 0.0),
        (42, "HumanEval/0", 0, "gpt-4", 0.0),
        (42, "HumanEval/0", 1, "gpt-4", 0.0),
        (42, "HumanEval/0", 2, "gpt-4", 0.3),
        (2**64 - 1, "task-é", 7, "sim-small", 0.5),
        (123456789, "x", 3, "sim-large", 0.25),
    ]:
        key = ref.draw_key(run_seed, task, attempt, model, temp)
        ex, hid, u = ref.success_draws(0.7, 0.1, 0.2, 0.3, run_seed, task, attempt, model, temp)
        draws.append({
            "run_seed": run_seed, "task_id": task, "attempt": attempt, "model": model,
            "temperature": temp, "key_h1": key[0], "key_h2": key[1],
            "bits": [ref.rng_bits(key, i) for i in range(4)], "uniforms": u,
            "below_1000": ref.rng_below(key, 3, 1000),
            "example_pass": ex, "hidden_pass": hid,
        })
    seeds = [{"base": b, "label": l, "index": i, "seed": ref.derive_seed(b, l, i)}
             for b, l, i in [(0, "zero_shot:m", 0), (20240401, "retry:gpt-4:k5:t0", 4),
                             (7, "optimize:trial", 15)]]
    return {"draw_model": {"skill": 0.7, "example_pass_bonus": 0.1, "hidden_gap": 0.2,
                           "difficulty": 0.3},
            "draws": draws, "derived_seeds": seeds}


def bootstrap():
    """One-module pipeline, baseline config, 50 samples of difficulty 0."""
    seed = 11
    run_seed = ref.derive_seed(seed, "optimize:bootstrap", 0)
    ids = [f"s{i:02d}" for i in range(50)]
    passed = []
    for sid in ids:
        _, hidden, _ = ref.success_draws(0.5, 0.0, 0.0, 0.0, run_seed, sid, 0, "sim-half", 0.0)
        if hidden:
            passed.append(sid)
    return {"seed": seed, "model": {"model": "sim-half", "skill": 0.5,
                                    "example_pass_bonus": 0.0, "hidden_gap": 0.0},
            "samples": ids, "passed": passed, "pool_size": len(passed)}


def build():
    return {
        "humaneval_agents.json": humaneval_agents(),
        "breakeven.json": breakeven(),
        "t_values.json": t_values(),
        "strategy_mc.json": strategy_mc(),
        "prng.json": prng(),
        "bootstrap.json": bootstrap(),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args()
    GOLDEN.mkdir(exist_ok=True)
    stale = []
    for name, doc in build().items():
        text = json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
        path = GOLDEN / name
        if args.check:
            if not path.exists() or path.read_text() != text:
                stale.append(name)
        else:
            path.write_text(text)
    if stale:
        print("stale goldens: " + ", ".join(stale))
        return 1
    print("goldens ok" if args.check else "goldens written")
    return 0


if __name__ == "__main__":
    sys.exit(main())
