"""Decision engines: backward coverability, Karp-Miller graph, simultaneous
unboundedness, membership oracles, and the bounded brute-force explorer used
as a test oracle.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import BudgetExceeded, NotEnabled
from .nets import (
    EPSILON,
    Marking,
    NetInstance,
    PetriNet,
    Word,
    fire,
    sync_with_fsa,
)


class _Omega:
    """Token count larger than every natural number."""

    __slots__ = ()

    def __repr__(self):
        return "OMEGA"


OMEGA = _Omega()

#: An omega-marking is a tuple over int | OMEGA aligned with the net's places.
OmegaMarking = tuple


def om_is_omega(v) -> bool:
    return v is OMEGA


def om_geq(a, b) -> bool:
    """Pointwise >= with OMEGA above every number (and equal to itself)."""
    for x, y in zip(a, b):
        if x is OMEGA:
            continue
        if y is OMEGA or x < y:
            return False
    return True


def om_covers_marking(a: OmegaMarking, m: Marking) -> bool:
    return all(x is OMEGA or x >= c for x, c in zip(a, m.counts))


def om_fire(net: PetriNet, m: OmegaMarking, name: str) -> OmegaMarking | None:
    """Fire with omega treated as infinity; None when not enabled."""
    t = net.transition(name)
    idx = net.place_index
    counts = list(m)
    for p, w in t.pre:
        v = counts[idx[p]]
        if v is OMEGA:
            continue
        if v < w:
            return None
        counts[idx[p]] = v - w
    for p, w in t.post:
        v = counts[idx[p]]
        if v is not OMEGA:
            counts[idx[p]] = v + w
    return tuple(counts)


def om_accelerate(candidate: OmegaMarking, ancestors) -> OmegaMarking:
    """Set omega on places strictly increased over some dominated ancestor."""
    current = candidate
    changed = True
    while changed:
        changed = False
        for anc in ancestors:
            if anc == current or not om_geq(current, anc):
                continue
            lifted = tuple(
                OMEGA if (x is not OMEGA and y is not OMEGA and x > y) else x
                for x, y in zip(current, anc)
            )
            if lifted != current:
                current = lifted
                changed = True
    return current


@dataclass(frozen=True)
class KmGraph:
    """Coverability graph: omega-markings as nodes, fired transitions as edges."""

    nodes: tuple
    edges: tuple  # (source-index, transition-name, target-index)
    root: int
    node_index: dict
    complete: bool = True

    def covering_nodes(self, m: Marking):
        return [i for i, node in enumerate(self.nodes) if om_covers_marking(node, m)]


def km_graph(
    net: PetriNet, m0: Marking, max_nodes: int = 100_000, partial: bool = False
) -> KmGraph:
    """Classical Karp-Miller construction with ancestor acceleration and
    merging of identical omega-markings (FIFO frontier for reproducibility).

    With partial=True a budget overrun returns the explored prefix instead of
    raising; the result is then flagged incomplete.
    """
    root = tuple(m0.counts)
    index = {root: 0}
    nodes = [root]
    edges = []
    frontier = deque([(root, (root,))])
    names = [t.name for t in net.transitions]
    complete = True
    while frontier:
        current, path = frontier.popleft()
        for name in names:
            succ = om_fire(net, current, name)
            if succ is None:
                continue
            succ = om_accelerate(succ, path)
            if succ not in index:
                if len(nodes) >= max_nodes:
                    if not partial:
                        raise BudgetExceeded("karp-miller nodes", max_nodes)
                    complete = False
                    continue
                index[succ] = len(nodes)
                nodes.append(succ)
                frontier.append((succ, path + (succ,)))
            edges.append((index[current], name, index[succ]))
    return KmGraph(tuple(nodes), tuple(edges), 0, index, complete)


def simultaneously_unbounded(
    net: PetriNet, m0: Marking, places, max_nodes: int = 100_000
) -> bool:
    """True iff one run can make every place of the set arbitrarily large.

    Decided on the coverability graph: some node must carry omega on all of
    them.  The search stops as soon as such a node appears.
    """
    targets = [net.place_index[p] for p in places]
    if not targets:
        return True

    def hit(node):
        return all(node[i] is OMEGA for i in targets)

    root = tuple(m0.counts)
    if hit(root):
        return True
    index = {root}
    frontier = deque([(root, (root,))])
    names = [t.name for t in net.transitions]
    count = 1
    while frontier:
        current, path = frontier.popleft()
        for name in names:
            succ = om_fire(net, current, name)
            if succ is None:
                continue
            succ = om_accelerate(succ, path)
            if succ in index:
                continue
            if hit(succ):
                return True
            if count >= max_nodes:
                raise BudgetExceeded("karp-miller nodes", max_nodes)
            index.add(succ)
            count += 1
            frontier.append((succ, path + (succ,)))
    return False


# Backward coverability


@dataclass
class UpwardClosedSet:
    """Finite basis (an antichain of minimal elements) of an upward-closed set."""

    basis: list

    def __init__(self, markings=()):
        self.basis = []
        for m in markings:
            self.insert(m)

    def contains(self, m: Marking) -> bool:
        return any(m.covers(b) for b in self.basis)

    def insert(self, m: Marking) -> bool:
        """Add a new minimal element; returns False if m was already covered."""
        if self.contains(m):
            return False
        self.basis = [b for b in self.basis if not b.covers(m)]
        self.basis.append(m)
        return True

    def is_antichain(self) -> bool:
        return not any(
            a is not b and a.covers(b) for a in self.basis for b in self.basis
        )


def _pre_marking(net: PetriNet, target: Marking, t) -> Marking:
    """Smallest marking from which firing t yields a marking covering target."""
    idx = net.place_index
    counts = list(target.counts)
    for p, w in t.post:
        counts[idx[p]] = max(counts[idx[p]] - w, 0)
    for p, w in t.pre:
        counts[idx[p]] += w
    return Marking(tuple(counts))


def coverable(inst: NetInstance):
    """Exact backward coverability; returns (answer, witness-or-None).

    The witness is a transition sequence whose replay from the initial marking
    covers the final marking.
    """
    net = inst.net
    goal = UpwardClosedSet([inst.final])
    # chain[marking] = (transition-name, next-basis-marking) toward the goal
    chain = {inst.final: None}

    def extract():
        start = next((b for b in goal.basis if inst.initial.covers(b)), None)
        if start is None:
            return None
        witness = []
        step = chain[start]
        while step is not None:
            name, nxt = step
            witness.append(name)
            step = chain[nxt]
        return witness

    frontier = [inst.final]
    while frontier:
        new_frontier = []
        for b in frontier:
            for t in net.transitions:
                pre = _pre_marking(net, b, t)
                if goal.insert(pre):
                    chain[pre] = (t.name, b)
                    new_frontier.append(pre)
        assert goal.is_antichain()
        frontier = new_frontier
        witness = extract()
        if witness is not None:
            return True, witness
    witness = extract()
    if witness is not None:
        return True, witness
    return False, None


def is_coverable(inst: NetInstance) -> bool:
    return coverable(inst)[0]


# Membership oracles


def member(w: Word, inst: NetInstance, mode: str = "exact", max_nodes=100_000) -> bool:
    """Exact membership of a word in L, uc(L), or dc(L) of a coverability language.

    Implemented by composing the instance with a word automaton and deciding
    coverability of the composite.
    """
    from .fsa import saturate_down, word_fsa

    if mode not in ("exact", "up", "down"):
        raise ValueError(f"unknown membership mode {mode!r}")
    unknown = set(w) - set(inst.net.alphabet)
    if unknown:
        raise ValueError(f"word uses undeclared letters {sorted(unknown)}")
    target = word_fsa(inst.net.alphabet, tuple(w))
    if mode == "down":
        synced = sync_with_fsa(inst.net, target, "right")
    elif mode == "exact":
        synced = sync_with_fsa(inst.net, target, "full")
    else:  # up: some word of L embeds into w
        synced = sync_with_fsa(inst.net, saturate_down(target), "full")
    return is_coverable(synced.make_instance(inst))


def brute_force_language(inst: NetInstance, k: int) -> set:
    """Exactly the words of covering runs of length at most k (test oracle).

    Memoizes on (marking, steps left); exact because the suffix language of a
    configuration depends only on the marking and the remaining budget.
    """
    net = inst.net
    final = inst.final
    memo = {}

    def explore(m: Marking, remaining: int) -> frozenset:
        key = (m, remaining)
        cached = memo.get(key)
        if cached is not None:
            return cached
        words = set()
        if m.covers(final):
            words.add(())
        if remaining > 0:
            for t in net.transitions:
                try:
                    nxt = fire(net, m, t.name)
                except Exception:
                    continue
                suffixes = explore(nxt, remaining - 1)
                if t.label == EPSILON:
                    words |= suffixes
                else:
                    words |= {(t.label,) + s for s in suffixes}
        result = frozenset(words)
        memo[key] = result
        return result

    return set(explore(inst.initial, k))


def longest_run_length(net: PetriNet, m0: Marking, max_nodes: int = 200_000) -> int:
    """Length of the longest firing sequence of a terminating net.

    Raises ValueError when runs are unbounded, detected as a reachable cycle
    or a marking strictly dominating one of its DFS ancestors (a pump).
    """
    memo = {}
    on_path = {m0}
    # frame: [marking, successor list or None, next successor index, best depth]
    frames = [[m0, None, 0, 0]]
    while frames:
        frame = frames[-1]
        m = frame[0]
        if frame[1] is None:
            succs = []
            for t in net.transitions:
                try:
                    succs.append(fire(net, m, t.name))
                except NotEnabled:
                    continue
            frame[1] = succs
        if frame[2] < len(frame[1]):
            nxt = frame[1][frame[2]]
            frame[2] += 1
            if nxt in memo:
                frame[3] = max(frame[3], 1 + memo[nxt])
                continue
            if nxt in on_path:
                raise ValueError("reachable cycle: runs are unbounded")
            if any(nxt.covers(anc) for anc in on_path):
                raise ValueError("reachable pump: runs are unbounded")
            if len(memo) + len(on_path) > max_nodes:
                raise BudgetExceeded("reachable markings", max_nodes)
            on_path.add(nxt)
            frames.append([nxt, None, 0, 0])
        else:
            memo[m] = frame[3]
            on_path.discard(m)
            frames.pop()
            if frames:
                frames[-1][3] = max(frames[-1][3], 1 + frame[3])
    return memo[m0]
