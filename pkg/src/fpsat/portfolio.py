"""Race N optimizer instances on one objective; first exact zero wins.

Shared state is limited to the immutable program, a stop event, a
first-writer result slot, and per-instance counters. A winning zero is
claimed at the evaluation that produced it; every other instance then
performs at most one further evaluation before observing the stop token.
Verdicts are only ever SAT (with a verified model) or UNKNOWN.
"""

from __future__ import annotations

import dataclasses
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import VerificationFailureError
from .fp import FPValue, Sort
from .objective import ObjectiveProgram, semantic_eval
from .optimizers import (
    OptimizerConfig,
    basin_hopping,
    crs2_minimize,
    isres_minimize,
)
from .rng import Xoshiro256Plus, derive_seed
from .terms import Term

__all__ = [
    "PortfolioConfig",
    "Model",
    "InstanceStats",
    "SolveOutcome",
    "random_start",
    "solve",
    "extract_model",
    "verify_model",
]

ALGORITHMS = ("bh", "crs2", "isres")


@dataclass
class PortfolioConfig:
    """Instance mix and budgets for one solving race."""

    instances: list[tuple[str, int]] = field(
        default_factory=lambda: [("bh", 1), ("crs2", 1), ("isres", 1)]
    )
    max_evals: int = 1_000_000  # per instance
    seed: int = 1
    start_range: tuple = (-0.5, 0.5)
    wall_timeout: float | None = None
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def expanded(self) -> list[str]:
        out = []
        for name, count in self.instances:
            if name not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {name!r}")
            out.extend([name] * count)
        if not out:
            raise ValueError("portfolio needs at least one instance")
        return out


@dataclass
class Model:
    """A satisfying assignment: per-variable exact values at declared width."""

    entries: list[tuple[str, Sort, FPValue]]

    def bindings(self) -> dict[str, float]:
        return {name: value.to_float() for name, _, value in self.entries}

    def vector(self) -> np.ndarray:
        return np.array([value.to_float() for _, _, value in self.entries])

    def smt2_block(self) -> str:
        lines = ["("]
        for name, sort, value in self.entries:
            lines.append(
                f"  (define-fun {name} () (_ FloatingPoint {sort.eb} {sort.sb}) "
                f"((_ to_fp {sort.eb} {sort.sb}) {value.hex_literal()}))"
            )
        lines.append(")")
        return "\n".join(lines)


@dataclass
class InstanceStats:
    algorithm: str
    index: int
    evals: int
    best_value: float
    wall_time: float
    terminated_by: str


@dataclass
class SolveOutcome:
    verdict: str  # "sat" | "unknown"
    model: Model | None
    winner: tuple[str, int] | None  # (algorithm, instance index)
    stats: list[InstanceStats]
    unknown_reason: str | None
    wall_time: float

    @property
    def total_evals(self) -> int:
        return sum(s.evals for s in self.stats)


def random_start(dim: int, rng: Xoshiro256Plus, rng_range=(-0.5, 0.5)) -> np.ndarray:
    """I.i.d. uniform start vector inside the start range."""
    lo, hi = rng_range
    return np.array([rng.uniform(lo, hi) for _ in range(dim)])


def extract_model(x, varmap: list[tuple[str, Sort]]) -> Model:
    """Assignment vector to Model: binary64 slots bit-exact, binary32 narrowed."""
    entries = []
    for (name, sort), v in zip(varmap, x, strict=True):
        entries.append((name, sort, FPValue.from_float(float(v), sort.width)))
    return Model(entries)


def verify_model(formula: Term, model: Model) -> bool:
    """Ground-truth check of a model against the original formula."""
    return semantic_eval(formula, model.bindings())


_MINIMIZERS = {
    "bh": basin_hopping,
    "crs2": crs2_minimize,
    "isres": isres_minimize,
}


def solve(formula: Term, program: ObjectiveProgram,
          config: PortfolioConfig | None = None,
          stop: threading.Event | None = None) -> SolveOutcome:
    """Race the configured instances; SAT on the first verified zero.

    An externally supplied `stop` event cancels the whole race (combined
    mode uses this). Raises VerificationFailureError if a zero-valued
    point fails the semantic check (that would be an encoding bug, never
    hidden).
    """
    if config is None:
        config = PortfolioConfig()
    algs = config.expanded()
    dim = program.dimension
    t_start = time.perf_counter()

    if dim == 0:
        value = program.evaluate(())
        stats = [InstanceStats("direct", 0, 1, value, 0.0, "single-evaluation")]
        elapsed = time.perf_counter() - t_start
        if value == 0.0:
            model = Model([])
            if not verify_model(formula, model):
                raise VerificationFailureError(
                    "constant objective is zero but the formula is false"
                )
            return SolveOutcome("sat", model, ("direct", 0), stats, None, elapsed)
        return SolveOutcome("unknown", None, None, stats,
                            "constant-objective-nonzero", elapsed)

    if stop is None:
        stop = threading.Event()
    claim_lock = threading.Lock()
    winner_slot: list = [None]  # (instance index, algorithm, x-vector)

    opt_cfg = dataclasses.replace(
        config.optimizer,
        max_evals=config.max_evals,
        start_range=tuple(config.start_range),
    )

    stats: list[InstanceStats | None] = [None] * len(algs)
    errors: list = []

    def claim(idx: int, alg: str, x: np.ndarray) -> None:
        with claim_lock:
            if winner_slot[0] is None:
                winner_slot[0] = (idx, alg, x)
        stop.set()

    def worker(idx: int, alg: str) -> None:
        t0 = time.perf_counter()
        try:
            rng = Xoshiro256Plus(derive_seed(config.seed, idx))
            x0 = random_start(dim, rng, config.start_range)
            minimize = _MINIMIZERS[alg]
            outcome = minimize(
                program.evaluate, x0, opt_cfg, rng, stop=stop,
                on_zero=lambda x, idx=idx, alg=alg: claim(idx, alg, x),
            )
            stats[idx] = InstanceStats(
                alg, idx, outcome.evals_used, outcome.best_value,
                time.perf_counter() - t0, outcome.terminated_by.value,
            )
        except Exception as exc:  # surfaced after join
            errors.append(exc)
            stats[idx] = InstanceStats(alg, idx, 0, float("inf"),
                                       time.perf_counter() - t0, "error")

    threads = [
        threading.Thread(target=worker, args=(i, alg), daemon=True)
        for i, alg in enumerate(algs)
    ]
    for t in threads:
        t.start()

    timed_out = False
    if config.wall_timeout is not None:
        deadline = t_start + config.wall_timeout
        for t in threads:
            t.join(max(0.0, deadline - time.perf_counter()))
        if any(t.is_alive() for t in threads):
            timed_out = True
            stop.set()
    for t in threads:
        t.join()

    if errors:
        raise errors[0]

    elapsed = time.perf_counter() - t_start
    final_stats = [s for s in stats if s is not None]

    if winner_slot[0] is not None:
        idx, alg, x = winner_slot[0]
        model = extract_model(x, program.varmap)
        if not verify_model(formula, model):
            raise VerificationFailureError(
                f"zero-valued point {list(map(float, x))} fails semantic "
                f"evaluation; the objective encoding is broken"
            )
        return SolveOutcome("sat", model, (alg, idx), final_stats, None, elapsed)

    if timed_out:
        reason = "wall-timeout"
    elif stop.is_set():
        reason = "cancelled"
    else:
        reason = "budget-exhausted"
    return SolveOutcome("unknown", None, None, final_stats, reason, elapsed)
