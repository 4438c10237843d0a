"""Deciders for inclusion of a simple regular expression in the upward or
downward closure of a coverability language.

The general route reduces each product to simultaneous unboundedness of
counting places in a synchronized product net.  The communication-free route
compiles the staged-witness characterizations to existential arithmetic and
discharges them with the bounded solver (or an external SMT solver).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .closures import bpp_cutoff_bound, bpp_short_bound
from .errors import (
    AlphabetMismatch,
    BudgetExceeded,
    Disagreement,
    NotBpp,
    SolverUnavailable,
)
from .nets import (
    EPSILON,
    Marking,
    NetInstance,
    PetriNet,
    Transition,
    fire_sequence,
    is_bpp,
    right_product,
    subword,
)
from .presburger import (
    Const,
    Leq,
    Var,
    bpp_reach_formula,
    conj,
    equals,
    implies,
    lt,
    run_external_solver,
    smtlib_export,
    solve_bounded,
)
from .reach import member, simultaneously_unbounded
from .sre import (
    AlphabetOrder,
    Product,
    Sre,
    default_order,
    lin_to_net,
    linearize,
    min_word,
    normalized_slots,
)


@dataclass(frozen=True)
class Verdict:
    answer: str  # "holds" | "fails" | "unknown"
    failing_product: Product | None = None
    witness: object = None
    detail: str = ""

    @property
    def holds(self) -> bool:
        return self.answer == "holds"


HOLDS = Verdict("holds")


def _check_alphabet(s: Sre, inst: NetInstance):
    extra = s.letters_used() - set(inst.net.alphabet)
    if extra:
        raise AlphabetMismatch(
            f"expression uses letters {sorted(extra)} the net does not declare"
        )


def pump_threshold(inst: NetInstance) -> int:
    """Token threshold beyond which a place of a communication-free net is
    pumpable; raised above the marking maxima to stay meaningful on nets with
    degenerate flow."""
    return max(
        bpp_cutoff_bound(inst).value,
        max(inst.initial.counts, default=0) + 1,
        max(inst.final.counts, default=0) + 1,
        1,
    )


# General nets: reduction to simultaneous unboundedness


def dc_unboundedness_system(p: Product, inst: NetInstance, order: AlphabetOrder):
    """Synchronized product plus goal place whose simultaneous unboundedness
    together with the iteration counters captures inclusion of the product in
    the downward closure.

    The goal-feeding transition also requires the control chain to have read a
    complete word of the linearized product, which enforces trailing mandatory
    letters.
    """
    net = inst.net
    lin = lin_to_net(linearize(p, order), net.alphabet)
    prod = right_product(net, lin.net)
    goal = "goal"
    t_cover_pre = {f"left.{pl}": w for pl, w in inst.final.as_dict(net).items()}
    t_cover_pre[f"right.{lin.exit_place}"] = 1
    t_cover = Transition.make(
        "t_cover", EPSILON, t_cover_pre, {f"right.{lin.exit_place}": 1, goal: 1}
    )
    t_pump = Transition.make("t_pump", EPSILON, {goal: 1}, {goal: 2})
    augmented = PetriNet(
        prod.alphabet,
        prod.places + (goal,),
        prod.transitions + (t_cover, t_pump),
    )
    start = {f"left.{pl}": w for pl, w in inst.initial.as_dict(net).items()}
    start[f"right.{lin.entry_place}"] = 1
    m0 = Marking.of(augmented, start)
    targets = [f"right.{c}" for c in lin.counting_places] + [goal]
    return augmented, m0, targets


def product_in_dc_pn(
    p: Product,
    inst: NetInstance,
    order: AlphabetOrder | None = None,
    max_nodes: int = 100_000,
) -> bool:
    order = order or default_order(inst.net.alphabet)
    net, m0, targets = dc_unboundedness_system(p, inst, order)
    return simultaneously_unbounded(net, m0, targets, max_nodes=max_nodes)


def sre_in_dc_pn(
    s: Sre,
    inst: NetInstance,
    order: AlphabetOrder | None = None,
    max_nodes: int = 100_000,
) -> Verdict:
    """Inclusion of the expression in the downward closure (any net)."""
    _check_alphabet(s, inst)
    for p in s.products:
        try:
            if not product_in_dc_pn(p, inst, order, max_nodes):
                return Verdict("fails", failing_product=p)
        except BudgetExceeded as err:
            return Verdict("unknown", failing_product=p, detail=str(err))
    return HOLDS


def sre_in_uc_pn(s: Sre, inst: NetInstance, max_nodes: int = 100_000) -> Verdict:
    """Inclusion in the upward closure: the minimal word of every product must
    be in it."""
    _check_alphabet(s, inst)
    for p in s.products:
        w = min_word(p)
        if not member(w, inst, "up", max_nodes=max_nodes):
            return Verdict("fails", failing_product=p, witness=w)
    return HOLDS


# Communication-free nets: staged-witness systems in existential arithmetic


@dataclass(frozen=True)
class PWitnessSpec:
    """Staged-computation certificate for product inclusion in the downward
    closure: markings M_1, M_1', ..., M_n, M_n' chained by letter runs and
    repeatable pump runs."""

    instance: NetInstance
    letters: tuple  # n slots; None marks an absent mandatory letter
    blocks: tuple  # n-1 letter sets, ordered per the alphabet order
    order: AlphabetOrder
    threshold: int

    def deq(self, m1: Marking, m2: Marking) -> bool:
        """m1 related to m2: wherever m2 stays below the threshold it must
        dominate m1 (so the run from m1 to m2 can be repeated)."""
        return all(
            b >= self.threshold or a <= b for a, b in zip(m1.counts, m2.counts)
        )

    def check(self, markings, runs) -> bool:
        """Verify conditions of the certificate against concrete runs."""
        inst = self.instance
        n = len(self.letters)
        if len(markings) != 2 * n or len(runs) != 2 * n - 1:
            return False
        if markings[0] != inst.initial:
            return False
        for i, sigma in enumerate(runs):
            if fire_sequence(inst.net, markings[i], sigma) != markings[i + 1]:
                return False
        labels = lambda sigma: tuple(
            inst.net.transition(t).label
            for t in sigma
            if inst.net.transition(t).label != EPSILON
        )
        for j, letter in enumerate(self.letters):
            if letter is not None and not subword((letter,), labels(runs[2 * j])):
                return False
        for j, block in enumerate(self.blocks):
            need = self.order.project(block)
            if not subword(need, labels(runs[2 * j + 1])):
                return False
            if not self.deq(markings[2 * j + 1], markings[2 * j + 2]):
                return False
        return self.deq(inst.final, markings[-1])


def p_witness_system(
    p: Product, inst: NetInstance, order: AlphabetOrder | None = None
):
    """Replica net and formula whose satisfiable reachable markings are exactly
    the staged witnesses for the product."""
    if not is_bpp(inst.net):
        raise NotBpp("staged witnesses need a communication-free net")
    order = order or default_order(inst.net.alphabet)
    letters, blocks = normalized_slots(p)
    n = len(letters)
    c = pump_threshold(inst)
    spec = PWitnessSpec(inst, letters, blocks, order, c)

    net = inst.net
    places = []
    transitions = []
    replicas = 2 * n - 1

    def e(r, pl):
        return f"e{r}.{pl}"

    def b(r, pl):
        return f"b{r}.{pl}"

    for r in range(1, replicas + 1):
        for pl in net.places:
            places += [e(r, pl), b(r, pl)]
            transitions.append(
                Transition.make(
                    f"tc{r}.{pl}", EPSILON, {}, {e(r, pl): 1, b(r, pl): 1}
                )
            )
        # counting places exist even when no transition can feed them, so the
        # occurrence constraints below stay grounded in the replica net
        if r % 2 == 1:
            if letters[(r - 1) // 2] is not None:
                places.append(f"l{r}")
        else:
            places.extend(f"l{r}.{a}" for a in sorted(blocks[r // 2 - 1]))
        for t in net.transitions:
            pre = {e(r, pl): w for pl, w in t.pre}
            post = {e(r, pl): w for pl, w in t.post}
            if r % 2 == 1:
                letter = letters[(r - 1) // 2]
                if letter is not None and t.label == letter:
                    post[f"l{r}"] = post.get(f"l{r}", 0) + 1
            else:
                block = blocks[r // 2 - 1]
                if t.label != EPSILON and t.label in block:
                    counter = f"l{r}.{t.label}"
                    post[counter] = post.get(counter, 0) + 1
            transitions.append(Transition.make(f"te{r}.{t.name}", EPSILON, pre, post))

    nprime = PetriNet((), tuple(places), tuple(transitions))

    parts = []
    for r in range(1, replicas):
        for pl in net.places:
            parts.append(equals(Var(e(r, pl)), Var(b(r + 1, pl))))
    for j in range(1, n):  # even replicas 2j are the repeatable pump runs
        r = 2 * j
        for pl in net.places:
            parts.append(
                implies(
                    lt(Var(e(r, pl)), Const(c)), Leq(Var(b(r, pl)), Var(e(r, pl)))
                )
            )
    for j, letter in enumerate(spec.letters):
        if letter is not None:
            parts.append(Leq(Const(1), Var(f"l{2 * j + 1}")))
    for j, block in enumerate(spec.blocks):
        for a in sorted(block):
            parts.append(Leq(Const(1), Var(f"l{2 * j + 2}.{a}")))
    for pl in net.places:
        parts.append(equals(Var(b(1, pl)), Const(inst.initial.get(net, pl))))
    for pl in net.places:
        parts.append(
            implies(
                lt(Var(e(replicas, pl)), Const(c)),
                Leq(Const(inst.final.get(net, pl)), Var(e(replicas, pl))),
            )
        )
    formula = conj(bpp_reach_formula(nprime, Marking.zero(nprime)), *parts)
    return nprime, formula, spec


def _dc_box_bound(inst: NetInstance, nprime: PetriNet) -> int:
    c = pump_threshold(inst)
    return max(
        4 * (c + 1)
        + inst.initial.token_count()
        + inst.final.token_count()
        + 16,
        len(nprime.transitions) + 1,
    )


@dataclass
class SolverConfig:
    """How to discharge satisfiability queries: external SMT binary if set,
    otherwise the built-in bounded solver."""

    path: str | None = None
    emit_smt_to: str | None = None
    _counter: int = field(default=0, repr=False)

    def maybe_emit(self, formula, tag: str):
        if not self.emit_smt_to:
            return None
        import pathlib

        directory = pathlib.Path(self.emit_smt_to)
        directory.mkdir(parents=True, exist_ok=True)
        self._counter += 1
        target = directory / f"{tag}-{self._counter}.smt2"
        target.write_text(smtlib_export(formula))
        return str(target)

    def decide(self, formula, box_bound: int, tag: str):
        """Returns (verdict bool or None, witness, detail)."""
        artifact = self.maybe_emit(formula, tag)
        detail = f"smt2: {artifact}" if artifact else ""
        if self.path:
            try:
                sat, model = run_external_solver(formula, self.path)
            except SolverUnavailable as err:
                artifact = artifact or self.maybe_emit_fallback(formula, tag)
                return None, None, f"{err} (formula at {artifact})"
            return sat, model, detail or "external solver"
        try:
            model = solve_bounded(formula, box_bound)
        except SolverUnavailable as err:
            artifact = artifact or self.maybe_emit_fallback(formula, tag)
            return None, None, f"{err} (formula at {artifact})"
        if model is None:
            return False, None, detail or f"no witness within box {box_bound}"
        return True, model, detail

    def maybe_emit_fallback(self, formula, tag: str):
        import tempfile

        handle = tempfile.NamedTemporaryFile(
            "w", suffix=".smt2", prefix=f"covlang-{tag}-", delete=False
        )
        handle.write(smtlib_export(formula))
        handle.close()
        return handle.name


def sre_in_dc_bpp(
    s: Sre,
    inst: NetInstance,
    order: AlphabetOrder | None = None,
    solver: SolverConfig | None = None,
) -> Verdict:
    """Downward-closure inclusion for communication-free nets via staged
    witnesses compiled to existential arithmetic."""
    _check_alphabet(s, inst)
    if not is_bpp(inst.net):
        raise NotBpp("use sre_in_dc_pn for nets with synchronization")
    solver = solver or SolverConfig()
    for p in s.products:
        nprime, formula, _spec = p_witness_system(p, inst, order)
        sat, model, detail = solver.decide(
            formula, _dc_box_bound(inst, nprime), "p-witness"
        )
        if sat is None:
            return Verdict("unknown", failing_product=p, detail=detail)
        if not sat:
            return Verdict("fails", failing_product=p, detail=detail)
    return HOLDS


def staged_cover_system(w, inst: NetInstance):
    """Replica net and formula for membership of a word in the upward closure:
    stage i may fire silent transitions and at most one transition labeled with
    the i-th letter, and the last stage must cover the final marking."""
    if not is_bpp(inst.net):
        raise NotBpp("staged covering needs a communication-free net")
    net = inst.net
    stages = max(len(w), 1)
    places = []
    transitions = []

    def e(r, pl):
        return f"e{r}.{pl}"

    def b(r, pl):
        return f"b{r}.{pl}"

    for r in range(1, stages + 1):
        letter = w[r - 1] if r <= len(w) else None
        for pl in net.places:
            places += [e(r, pl), b(r, pl)]
            transitions.append(
                Transition.make(
                    f"tc{r}.{pl}", EPSILON, {}, {e(r, pl): 1, b(r, pl): 1}
                )
            )
        if letter is not None:
            places.append(f"l{r}")
        for t in net.transitions:
            if t.label != EPSILON and t.label != letter:
                continue
            pre = {e(r, pl): ww for pl, ww in t.pre}
            post = {e(r, pl): ww for pl, ww in t.post}
            if letter is not None and t.label == letter:
                post[f"l{r}"] = post.get(f"l{r}", 0) + 1
            transitions.append(Transition.make(f"te{r}.{t.name}", EPSILON, pre, post))

    nprime = PetriNet((), tuple(places), tuple(transitions))
    parts = []
    for pl in net.places:
        parts.append(equals(Var(b(1, pl)), Const(inst.initial.get(net, pl))))
    for r in range(1, stages):
        for pl in net.places:
            parts.append(equals(Var(e(r, pl)), Var(b(r + 1, pl))))
    for pl in net.places:
        parts.append(Leq(Const(inst.final.get(net, pl)), Var(e(stages, pl))))
    for r in range(1, len(w) + 1):
        parts.append(Leq(Var(f"l{r}"), Const(1)))
    formula = conj(bpp_reach_formula(nprime, Marking.zero(nprime)), *parts)
    return nprime, formula


def _uc_box_bound(inst: NetInstance, nprime: PetriNet) -> int:
    steps = bpp_short_bound(inst).value + 2
    m = inst.net.max_arc_weight()
    return max(
        inst.initial.token_count() + (m + 1) * steps + 8,
        len(nprime.transitions) + 1,
    )


def sre_in_uc_bpp(
    s: Sre,
    inst: NetInstance,
    solver: SolverConfig | None = None,
    max_nodes: int = 100_000,
) -> Verdict:
    """Upward-closure inclusion for communication-free nets.

    Runs both the staged-covering formula and the coverability-based check on
    every minimal word and insists that they agree.
    """
    _check_alphabet(s, inst)
    if not is_bpp(inst.net):
        raise NotBpp("use sre_in_uc_pn for nets with synchronization")
    solver = solver or SolverConfig()
    for p in s.products:
        w = min_word(p)
        by_coverability = member(w, inst, "up", max_nodes=max_nodes)
        nprime, formula = staged_cover_system(w, inst)
        sat, model, detail = solver.decide(
            formula, _uc_box_bound(inst, nprime), "staged-cover"
        )
        if sat is None:
            if not by_coverability:
                return Verdict("fails", failing_product=p, witness=w, detail=detail)
            return Verdict("unknown", failing_product=p, detail=detail)
        if sat != by_coverability:
            raise Disagreement(
                f"staged formula says {sat}, coverability says {by_coverability} "
                f"for minimal word {''.join(w) or 'the empty word'}"
            )
        if not sat:
            return Verdict("fails", failing_product=p, witness=w)
    return HOLDS
