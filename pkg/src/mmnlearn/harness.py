"""Experiment harness: configured runs, aggregation, and reporting.

A run builds the benchmark MMN, wraps it in a SUL with a seeded EQ stream,
executes the selected learner under a wall-clock budget, then (optionally)
validates the result exactly.  Validation is neither timed against the
budget nor charged to any counter.  Learner time is the wall time minus
the time spent inside oracle calls.
"""

from __future__ import annotations

import io
import json
import math
import time
from dataclasses import dataclass, field
from typing import Optional

from . import benchmarks
from .componentwise import CaParams, ccwl, cwl, mnl
from .lstar import LearningTimeout
from .network import Mmn
from .oracles import EqTestConfig, Sul

VALIDATED = "validated"
INCORRECT = "incorrect"
TIMEOUT = "timeout"
SKIPPED = "not-validated"

ALGORITHMS = ("mnl", "cwl", "ccwl")

REPORT_COLUMNS = [
    "st.", "tr.", "OQ reset", "OQ step", "EQ", "EQ reset", "EQ step",
    "L. time", "valid?",
]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    benchmark: str
    algorithm: str
    ca_params: Optional[CaParams] = None
    eq_config: EqTestConfig = field(default_factory=EqTestConfig)
    seed: int = 0
    instances: int = 1
    timeout_s: float = 3600.0
    validate: bool = True
    memoize: bool = True
    exact_eq: bool = False  # substitute exact checking for testing EQs

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError("unknown algorithm %r" % self.algorithm)
        if self.algorithm == "ccwl" and self.ca_params is None:
            raise ConfigError("ccwl requires CA parameters")
        if self.instances < 1:
            raise ConfigError("instances must be >= 1")


@dataclass
class ExperimentResult:
    benchmark: str
    algorithm: str
    ca_params: str
    seed: int
    states: int = 0
    transitions: int = 0
    oq_resets: int = 0
    oq_steps: int = 0
    eq_count: int = 0
    eq_resets: int = 0
    eq_steps: int = 0
    learner_time_seconds: float = 0.0
    wall_time_seconds: float = 0.0
    validation: str = SKIPPED
    sul_total_states: int = 0
    sul_components: int = 0
    sul_input_alphabet: int = 0  # system-level input alphabet size
    max_cex_length: int = 0

    def row(self) -> list:
        return [
            self.states, self.transitions, self.oq_resets, self.oq_steps,
            self.eq_count, self.eq_resets, self.eq_steps,
            self.learner_time_seconds, self.validation,
        ]

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _instance_seed(cfg: ExperimentConfig, idx: int) -> int:
    return cfg.seed + idx


def build_sul(cfg: ExperimentConfig, seed: int) -> Sul:
    spec = cfg.benchmark
    if spec.startswith("rand:") and "seed=" not in spec:
        spec = "%s:seed=%d" % (spec, seed)
    mmn = benchmarks.from_spec(spec)
    eq_cfg = EqTestConfig(
        cfg.eq_config.words_per_eq, cfg.eq_config.word_length, seed
    )
    return Sul(mmn, eq_cfg)


def run_experiment(cfg: ExperimentConfig, seed: Optional[int] = None) -> ExperimentResult:
    seed = cfg.seed if seed is None else seed
    sul = build_sul(cfg, seed)
    result = ExperimentResult(
        benchmark=cfg.benchmark,
        algorithm=cfg.algorithm,
        ca_params=str(cfg.ca_params) if cfg.ca_params else "",
        seed=seed,
        sul_total_states=sum(m.n_states for m in sul._mmn.machines.values()),
        sul_components=len(sul.components),
        sul_input_alphabet=len(sul.system_inputs),
    )
    deadline = time.monotonic() + cfg.timeout_s
    eq = sul.exact_eq if cfg.exact_eq else None
    eq_c = sul.exact_eq_c if cfg.exact_eq else None
    t0 = time.monotonic()
    learned = None
    try:
        if cfg.algorithm == "mnl":
            learned = mnl(sul, memoize=cfg.memoize, deadline=deadline, eq=eq)
        elif cfg.algorithm == "cwl":
            learned = cwl(sul, memoize=cfg.memoize, deadline=deadline, eq_c=eq_c)
        else:
            learned = ccwl(
                sul, cfg.ca_params, memoize=cfg.memoize, deadline=deadline, eq=eq
            )
    except LearningTimeout:
        result.validation = TIMEOUT
    wall = time.monotonic() - t0
    result.wall_time_seconds = wall
    result.learner_time_seconds = max(0.0, wall - sul.oracle_seconds)
    stats = sul.stats
    result.oq_resets = stats.oq_resets
    result.oq_steps = stats.oq_steps
    result.eq_count = stats.eq_count
    result.eq_resets = stats.eq_resets
    result.eq_steps = stats.eq_steps
    if learned is not None:
        result.states = learned.n_states
        result.transitions = learned.n_transitions
        result.max_cex_length = learned.max_cex_length
        if cfg.validate:
            target = learned.machine if learned.machine is not None else learned.mmn
            verdict = sul.validate_exact(target)
            result.validation = VALIDATED if verdict is True else INCORRECT
        else:
            result.validation = SKIPPED
    return result


def run_batch(cfg: ExperimentConfig, workers: int = 1) -> list[ExperimentResult]:
    """One result per instance; seeds are consecutive from cfg.seed.

    ``workers > 1`` fans instances out to a process pool (each worker owns
    its learner/SUL pair; results are joined in seed order).  Interrupt-safe
    either way: results collected so far are returned on KeyboardInterrupt.
    """
    seeds = [_instance_seed(cfg, idx) for idx in range(cfg.instances)]
    results: list[ExperimentResult] = []
    if workers <= 1:
        try:
            for s in seeds:
                results.append(run_experiment(cfg, s))
        except KeyboardInterrupt:
            pass
        return results
    import concurrent.futures as cf

    with cf.ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(run_experiment, cfg, s): s for s in seeds}
        try:
            for fut in cf.as_completed(futures):
                results.append(fut.result())
        except KeyboardInterrupt:
            pool.shutdown(cancel_futures=True)
    results.sort(key=lambda r: r.seed)
    return results


# -- reporting -------------------------------------------------------------


def format_count(value: float) -> str:
    """The tables' K/M abbreviation, e.g. 26000 -> '26K'."""
    if value >= 10**6:
        scaled = value / 10**6
        return ("%.1fM" if scaled < 10 else "%.0fM") % scaled
    if value >= 1000:
        scaled = value / 1000
        return ("%.1fK" if scaled < 10 else "%.0fK") % scaled
    if isinstance(value, float) and not value.is_integer():
        return "%.1f" % value
    return "%d" % value


def _aggregate(results: list[ExperimentResult]) -> dict:
    n = len(results)
    mean = lambda xs: sum(xs) / n if n else 0.0
    counts = {
        "st.": mean([r.states for r in results]),
        "tr.": mean([r.transitions for r in results]),
        "OQ reset": mean([r.oq_resets for r in results]),
        "OQ step": mean([r.oq_steps for r in results]),
        "EQ": mean([r.eq_count for r in results]),
        "EQ reset": mean([r.eq_resets for r in results]),
        "EQ step": mean([r.eq_steps for r in results]),
        "L. time": mean([r.learner_time_seconds for r in results]),
    }
    counts["valid?"] = "%d/%d/%d" % (
        sum(r.validation == VALIDATED for r in results),
        sum(r.validation == INCORRECT for r in results),
        sum(r.validation == TIMEOUT for r in results),
    )
    return counts


def report(results: list[ExperimentResult], fmt: str = "table") -> str:
    """Render results; per-instance rows plus one aggregate row."""
    if fmt == "json":
        return json.dumps(
            {
                "instances": [r.to_json() for r in results],
                "aggregate": _aggregate(results) if results else {},
            },
            indent=2, default=str,
        ) + "\n"
    if fmt == "csv":
        out = io.StringIO()
        header = ["benchmark", "algorithm", "ca", "seed"] + REPORT_COLUMNS
        out.write(",".join(header) + "\n")
        for r in results:
            out.write(
                ",".join(
                    str(x)
                    for x in [r.benchmark, r.algorithm, r.ca_params, r.seed] + r.row()
                )
                + "\n"
            )
        if results:
            agg = _aggregate(results)
            out.write(
                ",".join(
                    [results[0].benchmark, results[0].algorithm,
                     results[0].ca_params, "mean"]
                    + [str(agg[c]) for c in REPORT_COLUMNS]
                )
                + "\n"
            )
        return out.getvalue()
    if fmt == "table":
        out = io.StringIO()
        label = "%s %s%s" % (
            results[0].benchmark if results else "",
            results[0].algorithm if results else "",
            results[0].ca_params if results else "",
        )
        out.write("%-32s %s\n" % (label, " ".join("%9s" % c for c in REPORT_COLUMNS)))
        for r in results:
            cells = [
                format_count(r.states), format_count(r.transitions),
                format_count(r.oq_resets), format_count(r.oq_steps),
                format_count(r.eq_count), format_count(r.eq_resets),
                format_count(r.eq_steps), "%.2f" % r.learner_time_seconds,
                r.validation,
            ]
            out.write("%-32s %s\n" % ("seed=%d" % r.seed, " ".join("%9s" % c for c in cells)))
        if results:
            agg = _aggregate(results)
            cells = [
                format_count(agg["st."]), format_count(agg["tr."]),
                format_count(agg["OQ reset"]), format_count(agg["OQ step"]),
                format_count(agg["EQ"]), format_count(agg["EQ reset"]),
                format_count(agg["EQ step"]), "%.2f" % agg["L. time"],
                agg["valid?"],
            ]
            out.write("%-32s %s\n" % ("mean", " ".join("%9s" % c for c in cells)))
        return out.getvalue()
    raise ConfigError("unknown report format %r" % fmt)


# -- complexity sanity -----------------------------------------------------


def thm_bound_check(result: ExperimentResult, constant: float = 10.0,
                    sound: bool = True) -> bool:
    """Query-count sanity against the learning-complexity bounds.

    Monolithic runs use the single-machine form C*(l*n^2 + n*log m); the
    componentwise algorithms get an extra component factor on the log term,
    plus an l*n*|V^c| term when the CA parameters are unsound.  ``n`` is
    the SUL's state count (total configurations for mnl, summed component
    sizes otherwise), ``m`` the longest counterexample seen.
    """
    n = max(1, result.sul_total_states)
    ell = max(1, result.sul_input_alphabet)
    m = max(2, result.max_cex_length)
    vc = max(1, result.sul_components)
    if result.algorithm == "mnl":
        bound = constant * (ell * n * n + n * math.log2(m))
        eq_bound = constant * n
    else:
        bound = constant * (ell * n * n + n * vc * math.log2(m))
        eq_bound = constant * n
        if not sound:
            bound += constant * ell * n * vc
            eq_bound += constant * ell * n
    return result.oq_resets <= bound and result.eq_count <= eq_bound


def mnl_state_metadata(mmn: Mmn, budget: int = 10**6) -> int:
    """Reachable configuration count, the ``n`` of the monolithic bound."""
    return mmn.materialize(budget).n_states


# -- presets ----------------------------------------------------------------


def ci_profile() -> list[ExperimentConfig]:
    """Desk-scale profile: small random families, short timeout."""
    cfgs = []
    for bench in ("binctr:5", "mmn_ex", "counter_init",
                  "rand:path3:lean", "rand:star3:lean", "rand:compl3:lean"):
        for algo in ALGORITHMS:
            cfgs.append(
                ExperimentConfig(
                    bench, algo,
                    ca_params=CaParams() if algo == "ccwl" else None,
                    timeout_s=120.0, instances=2,
                )
            )
    return cfgs


def table1_profile(instances: int = 10) -> list[ExperimentConfig]:
    """Full-scale profile mirroring the headline experiment grid.

    Expect hours of runtime; orderings between algorithms are the point,
    not exact averages, since random instances and EQ parameters are
    reconstructed.  Includes the Star(3)/Star(7) follow-up grid and the
    intermediate depth bounds.
    """
    cas = [
        CaParams("eq", None, "dinf", None),
        CaParams("eq", None, "dsum", None),
        CaParams("eq", None, "dmax", None),
        CaParams("eq", None, "dmin", None),
        CaParams("eq", None, "d", 0),
        CaParams("eqk", 0, "dinf", None),
        CaParams("eqk", 0, "d", 0),
        CaParams("uni", None, "d", 0),
    ]
    benches = [
        "rand:compl5:lean", "rand:star5:lean", "rand:path5:lean",
        "rand:compl5:rich", "rand:star5:rich", "rand:path5:rich",
        "rand:star3:lean", "rand:star7:lean",
        "rand:star3:rich", "rand:star7:rich",
        "mqtt", "binctr:5", "binctr:10",
    ]
    cfgs = []
    for bench in benches:
        cfgs.append(ExperimentConfig(bench, "mnl", instances=instances))
        cfgs.append(ExperimentConfig(bench, "cwl", instances=instances))
        for ca in cas:
            cfgs.append(
                ExperimentConfig(bench, "ccwl", ca_params=ca, instances=instances)
            )
    return cfgs
