"""Trace inclusion of a finite automaton in a net, containment of a regular
language in a coverability language, and the is-the-language-closed deciders.

The exploration pairs determinized automaton states with antichains of maximal
omega-markings reachable on the same trace.  Silent net transitions are closed
off with acceleration, so silent pumps become omega and the tree stays finite;
nodes dominating an ancestor with the same automaton component are pruned.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .closures import dc_fsa_bpp, dc_fsa_pn, uc_fsa, uc_fsa_bpp
from .errors import BudgetExceeded, CertifiedBoundTooLarge
from .fsa import Fsa, _step_fn, trim_coaccessible
from .nets import (
    EPSILON,
    Marking,
    NetInstance,
    PetriNet,
    append_final_letter,
    is_bpp,
)
from .reach import om_accelerate, om_fire, om_geq


def _maximal(markings) -> tuple:
    """Antichain of maximal elements under the omega-extended order."""
    result = []
    for m in markings:
        if any(om_geq(other, m) for other in result):
            continue
        result = [other for other in result if not om_geq(m, other)]
        result.append(m)
    return tuple(sorted(result, key=repr))


def silent_closure(net: PetriNet, markings, max_nodes: int = 50_000):
    """All markings reachable through silent transitions, with acceleration.

    Silent pumps preserve the trace, so a place they can grow without bound is
    exact as omega for trace matching.  Returns (antichain, certificates);
    each certificate maps a closure marking to (source, fired-sequence,
    accelerated-flags) for replay in tests.
    """
    silent = [t.name for t in net.transitions if t.label == EPSILON]
    seen = {}
    frontier = deque()
    for m in markings:
        if m not in seen:
            seen[m] = (m, (), False)
            frontier.append((m, (m,), m, ()))
    while frontier:
        current, path, source, fired = frontier.popleft()
        for name in silent:
            succ = om_fire(net, current, name)
            if succ is None:
                continue
            accel = om_accelerate(succ, path)
            if accel in seen:
                continue
            if len(seen) >= max_nodes:
                raise BudgetExceeded("silent-closure nodes", max_nodes)
            seen[accel] = (source, fired + (name,), accel != succ)
            frontier.append((accel, path + (accel,), source, fired + (name,)))
    return _maximal(seen.keys()), seen


def _net_steps(net: PetriNet):
    by_label = {}
    for t in net.transitions:
        if t.label != EPSILON:
            by_label.setdefault(t.label, []).append(t.name)
    return by_label


def traces_included(a: Fsa, net: PetriNet, m0: Marking, max_nodes: int = 50_000):
    """Every trace of the automaton is a trace of the net; exact.

    Returns (True, None) or (False, counterexample-trace); the counterexample
    is length-lexicographically minimal.
    """
    step_a, close_a = _step_fn(a)
    by_label = _net_steps(net)
    letters = sorted(a.alphabet)

    start_qa = close_a(frozenset([a.initial]))
    start_s, _ = silent_closure(net, [tuple(m0.counts)], max_nodes)
    # (qa, s, word, ancestors); ancestors only carry (qa, s) pairs
    root = (start_qa, start_s)
    queue = deque([(start_qa, start_s, (), (root,))])
    visited = 1
    while queue:
        qa, s, w, ancestors = queue.popleft()
        for x in letters:
            qa2 = step_a(qa, x)
            if not qa2:
                continue
            moved = []
            for m in s:
                for name in by_label.get(x, ()):
                    succ = om_fire(net, m, name)
                    if succ is not None:
                        moved.append(succ)
            s2, _ = silent_closure(net, _maximal(moved), max_nodes)
            if not s2:
                return False, w + (x,)
            subsumed = any(
                qa0 == qa2 and all(any(om_geq(m, m0_) for m in s2) for m0_ in s0)
                for qa0, s0 in ancestors
            )
            if subsumed:
                continue
            visited += 1
            if visited > max_nodes:
                raise BudgetExceeded("trace-tree nodes", max_nodes)
            node = (qa2, s2)
            queue.append((qa2, s2, w + (x,), ancestors + (node,)))
    return True, None


def net_has_trace(net: PetriNet, m0: Marking, w, max_nodes: int = 50_000) -> bool:
    """Exact check that some firing sequence is labeled by the given word."""
    by_label = _net_steps(net)
    s, _ = silent_closure(net, [tuple(m0.counts)], max_nodes)
    for x in w:
        moved = []
        for m in s:
            for name in by_label.get(x, ()):
                succ = om_fire(net, m, name)
                if succ is not None:
                    moved.append(succ)
        s, _ = silent_closure(net, _maximal(moved), max_nodes)
        if not s:
            return False
    return True


def _fresh_letter(used) -> str:
    candidate = "#"
    while candidate in used:
        candidate += "#"
    return candidate


def _append_accept_letter(a: Fsa, letter: str, alphabet) -> Fsa | None:
    """Automaton for L(a).letter, trimmed so its unique final state is
    reachable from every state; None when L(a) is empty."""
    trimmed = trim_coaccessible(a)
    if trimmed is None:
        return None
    sink = ("accept!", letter)
    states = set(trimmed.states) | {sink}
    transitions = set(trimmed.transitions)
    for q in trimmed.finals:
        transitions.add((q, letter, sink))
    lifted = Fsa(
        tuple(alphabet),
        frozenset(states),
        frozenset(transitions),
        trimmed.initial,
        frozenset([sink]),
    )
    return trim_coaccessible(lifted)


def regular_included_in_lang(a: Fsa, inst: NetInstance, max_nodes: int = 50_000):
    """L(a) inside the coverability language; returns (bool, counterexample word).

    Both sides get a fresh end letter: the net fires it by consuming the final
    marking, the automaton appends it after accepting, and the question becomes
    an inclusion of prefix-closed trace languages.
    """
    fresh = _fresh_letter(set(inst.net.alphabet) | set(a.alphabet))
    alphabet = tuple(dict.fromkeys(tuple(a.alphabet) + inst.net.alphabet)) + (fresh,)
    ended = _append_accept_letter(a, fresh, alphabet)
    if ended is None:
        return True, None
    lifted_inst = append_final_letter(inst, fresh)
    ok, trace = traces_included(
        ended, lifted_inst.net, lifted_inst.initial, max_nodes
    )
    if ok:
        return True, None
    word = _extend_to_acceptance(ended, trace)
    assert word[-1] == fresh
    return False, word[:-1]


def _extend_to_acceptance(a: Fsa, trace):
    """Shortest accepted word extending the given trace (exists by trimming)."""
    step, close = _step_fn(a)
    current = close(frozenset([a.initial]))
    for x in trace:
        current = step(current, x)
    letters = sorted(a.alphabet)
    seen = {current}
    queue = deque([(current, tuple(trace))])
    while queue:
        states, w = queue.popleft()
        if states & a.finals:
            return w
        for x in letters:
            nxt = step(states, x)
            if nxt and nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, w + (x,)))
    raise AssertionError("a trimmed automaton must reach acceptance")


@dataclass(frozen=True)
class IsClosedResult:
    answer: str  # "yes" | "no" | "unknown"
    counterexample: tuple | None = None
    detail: str = ""


def is_closed(
    inst: NetInstance,
    direction: str,
    max_nodes: int = 50_000,
    certified_ceiling: int = 10**6,
) -> IsClosedResult:
    """Is the coverability language equal to its upward or downward closure?

    One inclusion always holds, so the question reduces to containment of the
    closure automaton in the language; unknown when no exact closure automaton
    fits the budget.
    """
    if direction not in ("up", "down"):
        raise ValueError("direction must be 'up' or 'down'")
    bpp = is_bpp(inst.net)
    try:
        if direction == "down":
            if bpp:
                closure = dc_fsa_bpp(inst, max_states=max_nodes)
            else:
                result = dc_fsa_pn(inst, max_nodes=max_nodes)
                if not result.exact:
                    return IsClosedResult(
                        "unknown", detail="coverability graph budget exceeded"
                    )
                closure = result.fsa
        else:
            if bpp:
                closure = uc_fsa_bpp(inst, max_states=max_nodes)
            else:
                closure = uc_fsa(
                    inst, mode="certified", ceiling=certified_ceiling
                ).fsa
    except CertifiedBoundTooLarge as err:
        return IsClosedResult("unknown", detail=str(err))
    except BudgetExceeded as err:
        return IsClosedResult("unknown", detail=str(err))
    try:
        ok, word = regular_included_in_lang(closure, inst, max_nodes)
    except BudgetExceeded as err:
        return IsClosedResult("unknown", detail=str(err))
    if ok:
        return IsClosedResult("yes")
    return IsClosedResult("no", counterexample=word)
