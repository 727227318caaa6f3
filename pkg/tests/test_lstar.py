import random

import pytest

from mmnlearn.alphabet import Alphabet
from mmnlearn.benchmarks import binary_counter, mmn_ex
from mmnlearn.lstar import OqCache, analyze_cex, lstar, one_ext_lstar
from mmnlearn.machine import Counterexample, DetMoore, equivalent
from mmnlearn.oracles import EqTestConfig, Sul
from mmnlearn.table import ObservationTable, SpuriousCounterexampleError
from tests.test_machine import random_machine


class CountingOracle:
    """oq/eq pair backed by a plain machine, with exact equivalence EQs."""

    def __init__(self, machine):
        self.machine = machine
        self.oq_calls = 0
        self.oq_chars = 0
        self.words = set()

    def oq(self, word):
        self.oq_calls += 1
        self.oq_chars += len(word)
        self.words.add(tuple(word))
        return self.machine.semantics(word)

    def eq(self, hypothesis):
        return equivalent(hypothesis, self.machine)


def table_for(machine, oracle=None):
    oracle = oracle or CountingOracle(machine)
    cache = OqCache(oracle.oq)
    tbl = ObservationTable(machine.input_alphabet, machine.output_alphabet, cache.last)
    return tbl, cache, oracle


# -- table basics -------------------------------------------------------------


def test_init_table_contains_epsilon():
    m = mmn_ex().machines["c1"]
    tbl, _, oracle = table_for(m)
    assert tbl.S == [()] and tbl.E == [()] and tbl.R == []
    assert tbl.T[()] == m.outputs[m.initial]
    assert oracle.oq_calls == 1


def test_init_table_constant_machine():
    ia, oa = Alphabet(["i"]), Alphabet(["k"])
    m = DetMoore(ia, oa, 1, 0, ({0: 0},), (0,))
    tbl, _, _ = table_for(m)
    assert tbl.T[()] == 0


def test_closedness_witness_order():
    m = binary_counter(2).machines["c1"]
    tbl, _, _ = table_for(m)
    assert tbl.is_closed()  # R empty
    tbl.add_extension((0,))  # stays in row of epsilon
    tbl.add_extension((1,))  # new output row
    assert tbl.closedness_witness() == (1,)
    tbl.close()
    assert tbl.is_closed()
    assert tbl.S == [(), (1,)]
    tbl.close()  # idempotent
    assert tbl.S == [(), (1,)]


def test_hypothesis_single_row():
    ia, oa = Alphabet(["i"]), Alphabet(["k", "l"])
    m = DetMoore(ia, oa, 1, 0, ({0: 0},), (1,))
    tbl, _, _ = table_for(m)
    h = tbl.hypothesis()
    assert h.n_states == 1
    assert h.outputs == (1,)
    assert h.transitions == ({},)  # no extensions queried yet


def test_hypothesis_undefined_where_not_in_table():
    m = mmn_ex().machines["c1"]
    tbl, _, _ = table_for(m)
    loop = m.input_alphabet.symbol("(b,3)")  # self-loop at the initial state
    tbl.add_extension((loop,))
    assert tbl.is_closed()
    h = tbl.hypothesis()
    assert h.step(0, loop) == 0
    assert h.step(0, m.input_alphabet.symbol("(a,3)")) is None


def test_one_ext_counts():
    m = mmn_ex().machines["c1"]
    tbl, _, _ = table_for(m)
    exts = one_ext_lstar(tbl)
    assert len(exts) == len(m.input_alphabet)  # one state
    for s, i in exts:
        tbl.add_extension(s + (i,))
    assert [e for e in one_ext_lstar(tbl) if e[0] + (e[1],) not in tbl] == []


# -- counterexample analysis ----------------------------------------------------


def test_analyze_cex_grows_suffixes():
    # last component of a counter: two states share outputs until a suffix splits them
    m = binary_counter(2).machines["c2"]
    tbl, cache, oracle = table_for(m)
    while True:
        tbl.close()
        missing = [(s, i) for (s, i) in one_ext_lstar(tbl) if s + (i,) not in tbl]
        if not missing:
            break
        for s, i in missing:
            tbl.add_extension(s + (i,))
    h = tbl.hypothesis()
    assert h.n_states == 2  # states (0,0) and (1,0) merged under E = {eps}
    cex = equivalent(h, m)
    assert isinstance(cex, Counterexample)
    rows_before = tbl.n_distinct_rows()
    analyze_cex(h, cex.word, cache, tbl)
    assert len(tbl.E) == 2
    assert tbl.n_distinct_rows() > rows_before


def test_analyze_cex_spurious_rejected():
    m = mmn_ex().machines["c1"]
    tbl, cache, _ = table_for(m)
    tbl.close()
    for s, i in one_ext_lstar(tbl):
        if s + (i,) not in tbl:
            tbl.add_extension(s + (i,))
    tbl.close()
    for s, i in one_ext_lstar(tbl):
        if s + (i,) not in tbl:
            tbl.add_extension(s + (i,))
    h = tbl.hypothesis()
    assert equivalent(h, m) is True
    with pytest.raises(SpuriousCounterexampleError):
        analyze_cex(h, (0, 0, 0), cache, tbl)


def test_analyze_cex_progress_property():
    rng = random.Random(13)
    for _ in range(30):
        m = random_machine(rng, n_max=5, partial=False)
        oracle = CountingOracle(m)
        res = lstar(m.input_alphabet, m.output_alphabet, oracle.oq, oracle.eq)
        assert equivalent(res.machine, m) is True


# -- the full loop ----------------------------------------------------------------


def test_lstar_constant_machine_one_eq():
    ia, oa = Alphabet(["i", "j"]), Alphabet(["k"])
    m = DetMoore(ia, oa, 1, 0, ({0: 0, 1: 0},), (0,))
    oracle = CountingOracle(m)
    res = lstar(ia, oa, oracle.oq, oracle.eq)
    assert res.machine.n_states == 1
    assert res.eq_calls == 1


def test_lstar_learns_random_machines_exactly():
    rng = random.Random(2)
    for _ in range(25):
        m = random_machine(rng, n_max=8, partial=False)
        oracle = CountingOracle(m)
        res = lstar(m.input_alphabet, m.output_alphabet, oracle.oq, oracle.eq)
        assert equivalent(res.machine, m) is True
        assert res.machine.is_complete
        # never more states than the target (which may not be minimal)
        assert res.machine.n_states <= m.n_states


def test_lstar_query_budget_sanity():
    rng = random.Random(8)
    for _ in range(15):
        m = random_machine(rng, n_max=8, partial=False)
        oracle = CountingOracle(m)
        res = lstar(m.input_alphabet, m.output_alphabet, oracle.oq, oracle.eq)
        n = res.machine.n_states
        ell = len(m.input_alphabet)
        import math

        mlen = max(2, res.max_cex_length)
        assert oracle.oq_calls <= 10 * (ell * n * n + n * math.log2(mlen))
        assert res.eq_calls <= 10 * max(1, n)


def test_lstar_memoization_avoids_duplicate_words():
    m = binary_counter(2).machines["c1"]
    oracle = CountingOracle(m)
    lstar(m.input_alphabet, m.output_alphabet, oracle.oq, oracle.eq)
    assert oracle.oq_calls == len(oracle.words)


def test_lstar_no_memoization_still_correct():
    # memoization only affects query counts, never the learned machine
    for memoize in (True, False):
        m = binary_counter(2).machines["c2"]
        oracle = CountingOracle(m)
        res = lstar(
            m.input_alphabet, m.output_alphabet, oracle.oq, oracle.eq,
            memoize=memoize,
        )
        assert equivalent(res.machine, m) is True


def test_lstar_with_random_testing_eq_binary_counter():
    sul = Sul(binary_counter(5), EqTestConfig(seed=0))
    res = lstar(sul.system_inputs, sul.system_outputs, sul.oq, sul.eq)
    assert res.machine.n_states == 70
    assert res.machine.n_transitions() == 140
    assert sul.validate_exact(res.machine) is True


def test_lstar_distinct_rows_monotone():
    m = binary_counter(2).machines["c2"]
    oracle = CountingOracle(m)
    cache = OqCache(oracle.oq)
    tbl = ObservationTable(m.input_alphabet, m.output_alphabet, cache.last)
    history = [tbl.n_distinct_rows()]
    for _ in range(40):
        tbl.close()
        missing = [(s, i) for (s, i) in one_ext_lstar(tbl) if s + (i,) not in tbl]
        if missing:
            for s, i in missing:
                tbl.add_extension(s + (i,))
            history.append(tbl.n_distinct_rows())
            continue
        h = tbl.hypothesis()
        cex = equivalent(h, m)
        if cex is True:
            break
        analyze_cex(h, cex.word, cache, tbl)
        history.append(tbl.n_distinct_rows())
    assert history == sorted(history)
    assert equivalent(tbl.hypothesis(), m) is True


def test_hypothesis_agrees_with_table():
    sul = Sul(binary_counter(3), EqTestConfig(seed=1))
    res = lstar(sul.system_inputs, sul.system_outputs, sul.oq, sul.eq)
    tbl = res.table
    h = res.machine
    for u in tbl.S + tbl.R:
        for e in tbl.E:
            q = h.run(h.initial, u + e)
            if q is not None:
                assert h.outputs[q] == tbl.T[u + e]


def test_table_dump_readable():
    m = mmn_ex().machines["c1"]
    tbl, _, _ = table_for(m)
    tbl.add_extension((0,))
    dump = tbl.dump()
    assert "prefix" in dump and "S ε" in dump
