import random

import pytest

from corpus import random_fsa, random_net
from covlang.errors import BudgetExceeded
from covlang.fsa import make_fsa, word_fsa
from covlang.nets import (
    EPSILON,
    Marking,
    NetInstance,
    PetriNet,
    Transition,
    fire,
)
from covlang.reach import OMEGA, member
from covlang.trace_inclusion import (
    is_closed,
    net_has_trace,
    regular_included_in_lang,
    silent_closure,
    traces_included,
)


def fsa_traces(a, max_len):
    """All words readable from the initial state (regardless of acceptance)."""
    from covlang.fsa import _step_fn

    step, close = _step_fn(a)
    out = set()
    frontier = {close(frozenset([a.initial])): ()}
    out.add(())
    for _ in range(max_len):
        nxt = {}
        for states, w in frontier.items():
            for x in sorted(a.alphabet):
                s2 = step(states, x)
                if s2:
                    out.add(w + (x,))
                    nxt.setdefault(s2, w + (x,))
        frontier = nxt
    return out


def net_traces_by_runs(net, m0, max_len, run_depth):
    """Sound under-approximation: labels of runs up to run_depth."""
    traces = set()

    def walk(m, word, depth):
        traces.add(word)
        if depth == 0:
            return
        for t in net.transitions:
            try:
                nxt = fire(net, m, t.name)
            except Exception:
                continue
            extended = word if t.label == EPSILON else word + (t.label,)
            if len(extended) <= max_len:
                walk(nxt, extended, depth - 1)

    walk(m0, (), run_depth)
    return traces


class TestTracesIncluded:
    def test_single_silent_or_c(self, rackoff_ce):
        a = make_fsa(("a", "b", "c"), {0, 1}, {(0, "c", 1)}, 0, {1})
        assert traces_included(a, rackoff_ce.net, rackoff_ce.initial) == (True, None)

    def test_b_not_fireable_initially(self, rackoff_ce):
        a = make_fsa(("a", "b", "c"), {0, 1}, {(0, "b", 1)}, 0, {1})
        ok, ce = traces_included(a, rackoff_ce.net, rackoff_ce.initial)
        assert not ok and ce == ("b",)

    def test_pump_then_exit(self, rackoff_ce):
        # prefix closure of a+b: every a^k and a^k b with k >= 1 is a trace
        a = make_fsa(
            ("a", "b", "c"), {0, 1, 2}, {(0, "a", 1), (1, "a", 1), (1, "b", 2)}, 0, {2}
        )
        assert traces_included(a, rackoff_ce.net, rackoff_ce.initial) == (True, None)

    def test_fresh_letters_fail_immediately(self, rackoff_ce):
        a = make_fsa(("z",), {0, 1}, {(0, "z", 1)}, 0, {1})
        ok, ce = traces_included(a, rackoff_ce.net, rackoff_ce.initial)
        assert not ok and ce == ("z",)

    def test_budget(self, rackoff_ce):
        # a long chain automaton forces genuinely new nodes at every level
        a = word_fsa(("a",), ("a",) * 10)
        with pytest.raises(BudgetExceeded):
            traces_included(a, rackoff_ce.net, rackoff_ce.initial, max_nodes=2)

    def test_agrees_with_bounded_enumeration(self):
        rng = random.Random(91)
        for _ in range(30):
            inst = random_net(rng, max_places=3, max_transitions=3)
            a = random_fsa(rng, alphabet=inst.net.alphabet, max_states=4)
            ok, ce = traces_included(a, inst.net, inst.initial, max_nodes=20_000)
            if not ok:
                assert ce in fsa_traces(a, len(ce))
                assert not net_has_trace(inst.net, inst.initial, ce)
                assert ce not in net_traces_by_runs(
                    inst.net, inst.initial, len(ce), 12
                )
            else:
                realizable = net_traces_by_runs(inst.net, inst.initial, 6, 12)
                for w in fsa_traces(a, 6):
                    assert w in realizable or net_has_trace(
                        inst.net, inst.initial, w
                    )

    def test_counterexample_prefix_fails_at_reported_position(self):
        rng = random.Random(93)
        for _ in range(20):
            inst = random_net(rng, max_places=3, max_transitions=3)
            a = random_fsa(rng, alphabet=inst.net.alphabet, max_states=4)
            ok, ce = traces_included(a, inst.net, inst.initial, max_nodes=20_000)
            if ok:
                continue
            assert not net_has_trace(inst.net, inst.initial, ce)
            assert net_has_trace(inst.net, inst.initial, ce[:-1])


class TestSilentClosure:
    def test_acceleration_introduces_omega(self):
        net = PetriNet(
            ("b",),
            ("s", "q"),
            (
                Transition.make("gen", EPSILON, {"s": 1}, {"s": 1, "q": 1}),
                Transition.make("tb", "b", {"q": 3}, {}),
            ),
        )
        closure, _ = silent_closure(net, [(1, 0)])
        assert closure == ((1, OMEGA),)

    def test_omegas_are_justified_by_concrete_pumps(self):
        rng = random.Random(95)
        for _ in range(20):
            inst = random_net(rng, max_places=3, max_transitions=3)
            net = inst.net
            start = tuple(inst.initial.counts)
            closure, _certs = silent_closure(net, [start])
            for target in closure:
                omegas = [i for i, v in enumerate(target) if v is OMEGA]
                if not omegas:
                    continue
                for demand in (2, 4, 16):
                    concrete = tuple(
                        demand if v is OMEGA else v for v in target
                    )
                    assert _silent_run_reaches(net, start, concrete), (
                        net,
                        start,
                        target,
                        demand,
                    )


def _silent_run_reaches(net, start, goal, max_states=60_000):
    """Concrete search: some silent run reaches a marking >= goal."""
    silent = [t.name for t in net.transitions if t.label == EPSILON]
    cap = tuple(g + 2 * net.max_arc_weight() + 2 for g in goal)
    seen = {start}
    stack = [start]
    while stack:
        m = stack.pop()
        if all(v >= g for v, g in zip(m, goal)):
            return True
        for name in silent:
            t = net.transition(name)
            counts = list(m)
            enabled = True
            for p, w in t.pre:
                i = net.place_index[p]
                if counts[i] < w:
                    enabled = False
                    break
                counts[i] -= w
            if not enabled:
                continue
            for p, w in t.post:
                counts[net.place_index[p]] += w
            nxt = tuple(min(v, c) for v, c in zip(counts, cap))
            if nxt not in seen:
                if len(seen) >= max_states:
                    return False
                seen.add(nxt)
                stack.append(nxt)
    return False


class TestRegularInclusion:
    def test_ab_inside(self, rackoff_ce):
        a = word_fsa(rackoff_ce.net.alphabet, ("a", "b"))
        assert regular_included_in_lang(a, rackoff_ce) == (True, None)

    def test_single_a_outside(self, rackoff_ce):
        a = word_fsa(rackoff_ce.net.alphabet, ("a",))
        ok, ce = regular_included_in_lang(a, rackoff_ce)
        assert not ok and ce == ("a",)

    def test_infinite_family_inside(self, rackoff_ce):
        aplusb = make_fsa(
            rackoff_ce.net.alphabet,
            {0, 1, 2},
            {(0, "a", 1), (1, "a", 1), (1, "b", 2)},
            0,
            {2},
        )
        assert regular_included_in_lang(aplusb, rackoff_ce) == (True, None)

    def test_empty_language_trivially_inside(self, rackoff_ce):
        from covlang.fsa import empty_fsa

        assert regular_included_in_lang(
            empty_fsa(rackoff_ce.net.alphabet), rackoff_ce
        ) == (True, None)

    def test_matches_exact_membership_for_words(self):
        rng = random.Random(97)
        for _ in range(25):
            inst = random_net(rng, max_places=3, max_transitions=3)
            length = rng.randint(0, 5)
            w = tuple(rng.choice(inst.net.alphabet) for _ in range(length))
            a = word_fsa(inst.net.alphabet, w)
            ok, _ce = regular_included_in_lang(a, inst)
            assert ok == member(w, inst, "exact")


class TestIsClosed:
    def test_power_not_downward_closed(self):
        from covlang.families import bpp_power_instance

        result = is_closed(bpp_power_instance(1), "down")
        assert result.answer == "no"
        w = result.counterexample
        inst = bpp_power_instance(1)
        assert member(w, inst, "down") and not member(w, inst, "exact")

    def test_loop_is_upward_closed(self):
        net = PetriNet(("a",), ("p",), (Transition.make("t", "a", {"p": 1}, {"p": 1}),))
        inst = NetInstance(net, Marking.of(net, {"p": 1}), Marking.zero(net))
        assert is_closed(inst, "up").answer == "yes"

    def test_silent_coverable_is_downward_closed(self):
        net = PetriNet(
            (), ("p", "q"), (Transition.make("t", EPSILON, {"p": 1}, {"q": 1}),)
        )
        inst = NetInstance(net, Marking.of(net, {"p": 1}), Marking.of(net, {"q": 1}))
        assert is_closed(inst, "down").answer == "yes"

    def test_unknown_when_certified_bound_is_hopeless(self, rackoff_ce):
        assert is_closed(rackoff_ce, "up").answer == "unknown"

    def test_counterexample_is_downward_gap(self, rackoff_ce):
        result = is_closed(rackoff_ce, "down")
        assert result.answer == "no"
        w = result.counterexample
        assert member(w, rackoff_ce, "down") and not member(w, rackoff_ce, "exact")
