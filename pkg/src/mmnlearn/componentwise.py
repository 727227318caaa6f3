"""System-level learning algorithms over Moore machine networks.

Three entry points share the observation-table engine:

* ``mnl``  -- monolithic: plain L* on the system-level oracles, ignoring
  the network.
* ``cwl``  -- naive componentwise: plain L* per component with
  component-level oracles, assembled along the known network.
* ``ccwl`` -- contextual componentwise: component-level output queries
  plus system-level equivalence queries, with table completion driven by
  reachability analysis over (a quotient of) the hypothesis network.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from .lstar import LearningTimeout, OqCache, analyze_cex, lstar
from .machine import (
    Counterexample,
    DetMoore,
    StatePartition,
    Word,
    identity_partition,
    partition_eq_k,
    partition_uni,
)
from .network import InducedMoore, Mmn, NodeId
from .oracles import Sul
from .table import ObservationTable, SpuriousCounterexampleError

ABS_EQ = "eq"
ABS_EQ_K = "eqk"
ABS_UNI = "uni"
BOUND_INF = "dinf"
BOUND_DEPTH = "d"
BOUND_SUM = "dsum"
BOUND_MAX = "dmax"
BOUND_MIN = "dmin"


class CaBlowupError(RuntimeError):
    """Context analysis hit the output-enumeration cap; rerun with a finer
    abstraction or a larger cap rather than dropping tuples silently."""


@dataclass(frozen=True)
class CaParams:
    """Context-analysis parameters: component abstraction and RA bound.

    Any bound other than the unbounded one is unsound: reachability may
    miss contexts, which later surfaces as missing-transition
    counterexamples (handled by the extended analyzer).
    """

    abstraction: str = ABS_EQ
    k: Optional[int] = None  # only for eqk
    bound: str = BOUND_INF
    depth: Optional[int] = None  # only for d

    def __post_init__(self):
        if self.abstraction not in (ABS_EQ, ABS_EQ_K, ABS_UNI):
            raise ValueError("unknown abstraction %r" % self.abstraction)
        if self.abstraction == ABS_EQ_K and (self.k is None or self.k < 0):
            raise ValueError("eqk needs k >= 0")
        if self.bound not in (BOUND_INF, BOUND_DEPTH, BOUND_SUM, BOUND_MAX, BOUND_MIN):
            raise ValueError("unknown bound %r" % self.bound)
        if self.bound == BOUND_DEPTH and (self.depth is None or self.depth < 0):
            raise ValueError("d needs depth >= 0")

    @property
    def sound(self) -> bool:
        return self.bound == BOUND_INF

    @staticmethod
    def parse(abstraction: str, bound: str) -> "CaParams":
        a, k = abstraction, None
        if abstraction.startswith("eqk:"):
            a, k = ABS_EQ_K, int(abstraction.split(":", 1)[1])
        b, depth = bound, None
        if bound.startswith("d:"):
            b, depth = BOUND_DEPTH, int(bound.split(":", 1)[1])
        return CaParams(a, k, b, depth)

    def __str__(self) -> str:
        a = "eqk:%d" % self.k if self.abstraction == ABS_EQ_K else self.abstraction
        b = "d:%d" % self.depth if self.bound == BOUND_DEPTH else self.bound
        return "(%s,%s)" % (a, b)


@dataclass
class LearnedSystem:
    """Result of a learning run, plus provenance."""

    algorithm: str
    mmn: Optional[Mmn] = None  # componentwise results
    machine: Optional[DetMoore] = None  # monolithic result
    ca_params: Optional[CaParams] = None
    seed: Optional[int] = None  # the SUL's EQ stream seed
    eq_calls: int = 0
    max_cex_length: int = 0
    n_states: int = 0
    n_transitions: int = 0
    tables: Optional[dict[NodeId, ObservationTable]] = None
    events: Optional[list[str]] = None

    def system_machine(self):
        return self.machine if self.machine is not None else InducedMoore(self.mmn)


def mnl(sul: Sul, memoize: bool = True, deadline: Optional[float] = None,
        eq=None) -> LearnedSystem:
    """Monolithic L* over the system-level oracles."""
    res = lstar(
        sul.system_inputs, sul.system_outputs, sul.oq, eq or sul.eq,
        memoize=memoize, deadline=deadline,
    )
    return LearnedSystem(
        "mnl", machine=res.machine, seed=sul.eq_config.seed,
        eq_calls=res.eq_calls, max_cex_length=res.max_cex_length,
        n_states=res.machine.n_states,
        n_transitions=res.machine.n_transitions(),
    )


def cwl(sul: Sul, memoize: bool = True, deadline: Optional[float] = None,
        eq_c=None) -> LearnedSystem:
    """Naive componentwise L*: each component learned in isolation."""
    eq_c = eq_c or sul.eq_c
    machines: dict[NodeId, DetMoore] = {}
    tables: dict[NodeId, ObservationTable] = {}
    eq_calls = 0
    max_cex = 0
    for c in sul.components:
        res = lstar(
            sul.component_input_alphabet(c),
            sul.component_output_alphabet(c),
            lambda w, c=c: sul.oq_c(c, w),
            lambda h, c=c: eq_c(c, h),
            memoize=memoize, deadline=deadline,
        )
        machines[c] = res.machine
        tables[c] = res.table
        eq_calls += res.eq_calls
        max_cex = max(max_cex, res.max_cex_length)
    mmn = Mmn(sul.network, machines, check=False)
    return LearnedSystem(
        "cwl", mmn=mmn, seed=sul.eq_config.seed,
        eq_calls=eq_calls, max_cex_length=max_cex,
        n_states=sum(m.n_states for m in machines.values()),
        n_transitions=sum(m.n_transitions() for m in machines.values()),
        tables=tables,
    )


# -- contextual componentwise ------------------------------------------------


def assemble(sul: Sul, tables: dict[NodeId, ObservationTable]) -> Mmn:
    """Hypothesis MMN: per-component hypothesis machines on the SUL network."""
    return Mmn(
        sul.network, {c: tables[c].hypothesis() for c in sul.components}, check=False
    )


def resolve_depth(params: CaParams, tables: dict[NodeId, ObservationTable]) -> Optional[int]:
    """Concrete BFS depth bound for this round; None means unbounded."""
    if params.bound == BOUND_INF:
        return None
    if params.bound == BOUND_DEPTH:
        return params.depth
    sizes = [len({t.row(s) for s in t.S}) for t in tables.values()]
    if params.bound == BOUND_SUM:
        return sum(sizes)
    if params.bound == BOUND_MAX:
        return max(sizes)
    return min(sizes)


def _partition_for(params: CaParams, machine: DetMoore) -> StatePartition:
    if params.abstraction == ABS_EQ:
        return identity_partition(machine)
    if params.abstraction == ABS_EQ_K:
        return partition_eq_k(machine, params.k)
    return partition_uni(machine)


def one_ext_er(
    hypothesis: Mmn,
    params: CaParams,
    tables: dict[NodeId, ObservationTable],
    output_cap: int = 10**5,
) -> set[tuple[NodeId, Word, int]]:
    """Contextual completion rule.

    Quotients the hypothesis MMN per the component abstraction, runs
    (depth-bounded) BFS over abstract configurations, and for every visited
    configuration emits, per component, every input character the component
    can receive there, paired with the access string of every concrete row
    in the abstract class.  Per-configuration output enumeration is capped:
    exceeding the cap aborts with a diagnostic instead of dropping tuples.
    """
    comps = hypothesis.components
    partitions = {
        c: _partition_for(params, hypothesis.machines[c]) for c in comps
    }
    if params.abstraction == ABS_EQ:
        # "no quotienting": walk the deterministic hypothesis itself
        quotient = hypothesis
    else:
        quotient = hypothesis.quotient_mmn(partitions)
    depth = resolve_depth(params, tables)
    sys_in = list(hypothesis.system_inputs)

    # Access strings of concrete hypothesis states, grouped by abstract block.
    rows_in_block: dict[NodeId, dict[int, list[Word]]] = {}
    for c in comps:
        groups: dict[int, list[Word]] = {}
        for q, s in enumerate(tables[c].access_strings()):
            groups.setdefault(partitions[c].block_of[q], []).append(s)
        rows_in_block[c] = groups

    emitted: set[tuple[NodeId, Word, int]] = set()
    start_configs = quotient.initial_configurations()
    seen = set(start_configs)
    frontier = list(start_configs)
    level = 0
    while frontier:
        for cfg in frontier:
            out_sets = quotient.total_output_sets(cfg)
            combos = 1
            for outs in out_sets:
                combos *= len(outs)
            if combos > output_cap:
                raise CaBlowupError(
                    "context analysis would enumerate %d output tuples at one "
                    "configuration (cap %d)" % (combos, output_cap)
                )
            for k, c in enumerate(comps):
                inputs = quotient.possible_inputs(c, sys_in, out_sets)
                for s in rows_in_block[c][cfg[k]]:
                    for i_c in inputs:
                        emitted.add((c, s, i_c))
        if depth is not None and level >= depth:
            break
        nxt = []
        for cfg in frontier:
            for i in sys_in:
                for succ in quotient.nd_system_transition(cfg, i):
                    if succ not in seen:
                        seen.add(succ)
                        nxt.append(succ)
        frontier = nxt
        level += 1
    return emitted


def analyze_cex_componentwise(
    hypothesis: Mmn,
    word: Word,
    sul: Sul,
    tables: dict[NodeId, ObservationTable],
    caches: dict[NodeId, OqCache],
    event_log: Optional[list[str]] = None,
) -> None:
    """Extended counterexample analysis (valid for sound and unsound CA).

    If the hypothesis system machine falls off along the word, the first
    undefined tick names a component and an input character whose row is
    missing: add it.  Otherwise some component's total-output trace
    disagrees with the hypothesis simulation; rebuild that component's
    local input word from the observed total outputs and delegate to the
    suffix-based analyzer.  Several candidates tie-break by component order.
    """
    comps = hypothesis.components
    config = hypothesis.initial_configuration()
    hyp_trace = [hypothesis.total_output(config)]
    fell_off = None
    for t, sys_in in enumerate(word):
        outs = hyp_trace[-1]
        nxt = []
        for k, c in enumerate(comps):
            i_c = hypothesis.component_input(c, sys_in, outs)
            tgt = hypothesis.machines[c].transitions[config[k]].get(i_c)
            if tgt is None:
                fell_off = (t, config, sys_in)
                break
            nxt.append(tgt)
        if fell_off is not None:
            break
        config = tuple(nxt)
        hyp_trace.append(hypothesis.total_output(config))

    if fell_off is not None:
        _, config, sys_in = fell_off
        outs = hypothesis.total_output(config)
        for k, c in enumerate(comps):
            i_c = hypothesis.component_input(c, sys_in, outs)
            if hypothesis.machines[c].transitions[config[k]].get(i_c) is None:
                s = tables[c].access_strings()[config[k]]
                tables[c].add_extension(s + (i_c,))
                if event_log is not None:
                    event_log.append("cex missing-transition c=%s" % c)
                return
        raise SpuriousCounterexampleError("fell off but no missing transition found")

    observed = sul.oq_bar(word)
    for t in range(len(word) + 1):
        if observed[t] != hyp_trace[t]:
            diffs = [
                k for k in range(len(comps)) if observed[t][k] != hyp_trace[t][k]
            ]
            k = diffs[0]
            c = comps[k]
            local = tuple(
                hypothesis.component_input(c, word[j], observed[j])
                for j in range(len(word))
            )
            if event_log is not None:
                event_log.append("cex wrong-output c=%s tick=%d" % (c, t))
            analyze_cex(
                hypothesis.machines[c], local, caches[c], tables[c]
            )
            return
    raise SpuriousCounterexampleError(
        "counterexample shows no difference in total outputs"
    )


def ccwl(
    sul: Sul,
    params: CaParams,
    memoize: bool = True,
    deadline: Optional[float] = None,
    eq=None,
    output_cap: int = 10**5,
    event_log: Optional[list[str]] = None,
) -> LearnedSystem:
    """Contextual componentwise L* (component OQs + system-level EQs)."""
    eq = eq or sul.eq
    caches: dict[NodeId, OqCache] = {}
    tables: dict[NodeId, ObservationTable] = {}
    for c in sul.components:
        cache = OqCache(lambda w, c=c: sul.oq_c(c, w), enabled=memoize)
        caches[c] = cache
        tables[c] = ObservationTable(
            sul.component_input_alphabet(c),
            sul.component_output_alphabet(c),
            cache.last,
        )
    eq_calls = 0
    max_cex = 0
    while True:
        if deadline is not None and time.monotonic() > deadline:
            raise LearningTimeout("learning budget exceeded", partial=tables)
        for c in sul.components:
            tables[c].close()
        hypothesis = assemble(sul, tables)
        proposals = one_ext_er(hypothesis, params, tables, output_cap)
        missing = sorted(
            (c, s, i) for (c, s, i) in proposals if s + (i,) not in tables[c]
        )
        if event_log is not None:
            event_log.append(
                "round proposals=%d new=%d" % (len(proposals), len(missing))
            )
        if missing:
            for c, s, i in missing:
                tables[c].add_extension(s + (i,))
            continue
        eq_calls += 1
        if event_log is not None:
            event_log.append("eq issued n=%d" % eq_calls)
        verdict = eq(InducedMoore(hypothesis))
        if verdict is True:
            if event_log is not None:
                event_log.append("eq yes after %d queries" % eq_calls)
            return LearnedSystem(
                "ccwl", mmn=hypothesis, ca_params=params,
                seed=sul.eq_config.seed, eq_calls=eq_calls,
                max_cex_length=max_cex,
                n_states=sum(m.n_states for m in hypothesis.machines.values()),
                n_transitions=sum(
                    m.n_transitions() for m in hypothesis.machines.values()
                ),
                tables=tables,
                events=event_log,
            )
        max_cex = max(max_cex, len(verdict.word))
        if event_log is not None:
            event_log.append("eq cex len=%d" % len(verdict.word))
        analyze_cex_componentwise(
            hypothesis, verdict.word, sul, tables, caches, event_log
        )
