"""Existential Presburger arithmetic over natural-valued variables.

Terms live in the integers, variables in the naturals.  The bounded solver is
sound and complete within its box: tiny problems go through exhaustive
enumeration, everything else through a big-M integer program (scipy/HiGHS)
whose models are re-checked symbolically before being returned.
"""

from __future__ import annotations

import itertools
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import NotBpp, SolverUnavailable, UnboundVariable
from .nets import Marking, PetriNet
from . import nets as _nets

# Terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


ZERO = Const(0)
ONE = Const(1)


# Formulas


@dataclass(frozen=True)
class Leq:
    left: object
    right: object


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Exists:
    var: str
    body: object


TRUE = Leq(ZERO, ZERO)
FALSE = Leq(ONE, ZERO)


def conj(*formulas):
    formulas = [f for f in formulas if f != TRUE]
    if not formulas:
        return TRUE
    result = formulas[0]
    for f in formulas[1:]:
        result = And(result, f)
    return result


def disj(*formulas):
    if not formulas:
        return FALSE
    result = formulas[0]
    for f in formulas[1:]:
        result = Or(result, f)
    return result


def implies(a, b):
    return Or(Not(a), b)


def equals(a, b):
    return And(Leq(a, b), Leq(b, a))


def lt(a, b):
    return Leq(Add(a, ONE), b)


def exists(names, body):
    for name in reversed(list(names)):
        body = Exists(name, body)
    return body


def term_vars(t) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Const):
        return set()
    return term_vars(t.left) | term_vars(t.right)


def free_vars(f) -> set:
    if isinstance(f, Leq):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (Or, And)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Exists):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def eval_term(t, asg) -> int:
    if isinstance(t, Var):
        if t.name not in asg:
            raise UnboundVariable(t.name)
        return asg[t.name]
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Add):
        return eval_term(t.left, asg) + eval_term(t.right, asg)
    if isinstance(t, Sub):
        return eval_term(t.left, asg) - eval_term(t.right, asg)
    raise TypeError(f"not a term: {t!r}")


def evaluate(f, asg, exists_window: int | None = None) -> bool:
    """Standard semantics; existential quantifiers search [0..window].

    The default window adapts to the constants of the formula and the values
    of the assignment, which is enough for the formulas built in this package;
    callers with deeper quantification should pass an explicit window.
    """
    if exists_window is None:
        exists_window = 2 * (_max_const(f) + max([0, *map(abs, asg.values())])) + 8
    if any(v < 0 for v in asg.values()):
        raise ValueError("variables range over naturals")

    def go(f, asg):
        if isinstance(f, Leq):
            return eval_term(f.left, asg) <= eval_term(f.right, asg)
        if isinstance(f, Not):
            return not go(f.body, asg)
        if isinstance(f, Or):
            return go(f.left, asg) or go(f.right, asg)
        if isinstance(f, And):
            return go(f.left, asg) and go(f.right, asg)
        if isinstance(f, Exists):
            return any(
                go(f.body, {**asg, f.var: v}) for v in range(exists_window + 1)
            )
        raise TypeError(f"not a formula: {f!r}")

    return go(f, asg)


def _max_const(f) -> int:
    def term_max(t):
        if isinstance(t, Const):
            return abs(t.value)
        if isinstance(t, Var):
            return 0
        return max(term_max(t.left), term_max(t.right))

    if isinstance(f, Leq):
        return max(term_max(f.left), term_max(f.right))
    if isinstance(f, Not):
        return _max_const(f.body)
    if isinstance(f, (Or, And)):
        return max(_max_const(f.left), _max_const(f.right))
    if isinstance(f, Exists):
        return _max_const(f.body)
    return 0


def _substitute_var(f, old: str, new: str):
    def in_term(t):
        if isinstance(t, Var):
            return Var(new) if t.name == old else t
        if isinstance(t, Const):
            return t
        return type(t)(in_term(t.left), in_term(t.right))

    if isinstance(f, Leq):
        return Leq(in_term(f.left), in_term(f.right))
    if isinstance(f, Not):
        return Not(_substitute_var(f.body, old, new))
    if isinstance(f, (Or, And)):
        return type(f)(
            _substitute_var(f.left, old, new), _substitute_var(f.right, old, new)
        )
    if isinstance(f, Exists):
        if f.var == old:
            return f
        return Exists(f.var, _substitute_var(f.body, old, new))
    raise TypeError(f"not a formula: {f!r}")


def flatten_exists(f):
    """Rename existential variables apart and strip the quantifiers.

    Returns (quantifier-free formula, renaming {fresh: original}).  Fails on
    quantifiers under negation: the fragment here is purely existential.
    """
    renaming = {}
    used = set(free_vars(f))
    counter = itertools.count()

    def fresh(base):
        name = base
        while name in used:
            name = f"{base}~{next(counter)}"
        used.add(name)
        return name

    def go(f, positive):
        if isinstance(f, Leq):
            return f
        if isinstance(f, Not):
            return Not(go(f.body, not positive))
        if isinstance(f, (Or, And)):
            return type(f)(go(f.left, positive), go(f.right, positive))
        if isinstance(f, Exists):
            if not positive:
                raise ValueError("existential quantifier under negation")
            name = fresh(f.var)
            renaming[name] = f.var
            return go(_substitute_var(f.body, f.var, name), positive)
        raise TypeError(f"not a formula: {f!r}")

    return go(f, True), renaming


def _linearize(term) -> tuple[dict, int]:
    """Term as (coefficients, constant)."""
    if isinstance(term, Var):
        return {term.name: 1}, 0
    if isinstance(term, Const):
        return {}, term.value
    lc, lk = _linearize(term.left)
    rc, rk = _linearize(term.right)
    sign = 1 if isinstance(term, Add) else -1
    coeffs = dict(lc)
    for v, c in rc.items():
        coeffs[v] = coeffs.get(v, 0) + sign * c
    return coeffs, lk + sign * rk


def _to_nnf(f):
    if isinstance(f, Leq):
        return f
    if isinstance(f, Not):
        inner = f.body
        if isinstance(inner, Leq):
            return Leq(Add(inner.right, ONE), inner.left)
        if isinstance(inner, Not):
            return _to_nnf(inner.body)
        if isinstance(inner, Or):
            return And(_to_nnf(Not(inner.left)), _to_nnf(Not(inner.right)))
        if isinstance(inner, And):
            return Or(_to_nnf(Not(inner.left)), _to_nnf(Not(inner.right)))
        raise ValueError("quantifier under negation")
    if isinstance(f, (Or, And)):
        return type(f)(_to_nnf(f.left), _to_nnf(f.right))
    raise TypeError(f"not quantifier-free: {f!r}")


def solve_exhaustive(f, bound: int):
    """Reference solver: enumerate the whole box (only viable for tiny formulas)."""
    qf, renaming = flatten_exists(f)
    names = sorted(free_vars(qf))
    for values in itertools.product(range(bound + 1), repeat=len(names)):
        asg = dict(zip(names, values))
        if evaluate(qf, asg):
            return _present_model(asg, renaming, free_vars(f))
    return None


def _present_model(asg, renaming, original_free):
    """Expose witnesses under their source names where unambiguous."""
    result = {}
    for name, value in asg.items():
        source = renaming.get(name, name)
        if source in result or (source in original_free and source != name):
            result[name] = value
        else:
            result[source] = value
    return result


def solve_bounded(f, bound: int, prefer_exhaustive: bool = False):
    """Find an assignment in [0..bound]^vars satisfying f, or None.

    None means no solution inside the box, not unsatisfiability.
    """
    if bound < 0:
        raise ValueError("bound must be non-negative")
    qf, renaming = flatten_exists(f)
    names = sorted(free_vars(qf))
    if prefer_exhaustive or (bound + 1) ** len(names) <= 50_000:
        return solve_exhaustive(f, bound)
    asg = _solve_milp(qf, names, bound)
    if asg is None:
        return None
    if not evaluate(qf, asg):
        # numerically suspect model: retry exhaustively only if feasible
        raise RuntimeError("relaxation produced an invalid model")
    return _present_model(asg, renaming, free_vars(f))


def _solve_milp(qf, names, bound: int):
    try:
        import numpy as np
        from scipy.optimize import Bounds, LinearConstraint, milp
    except ImportError as err:  # pragma: no cover - scipy is a hard dependency
        raise SolverUnavailable("scipy is required for the built-in solver") from err

    nnf = _to_nnf(qf)
    var_index = {name: i for i, name in enumerate(names)}
    n_int = len(names)
    rows = []  # (coeff-vector-over-all-vars, ub)
    n_bin = 0
    gates = []  # per formula node: binary index

    def new_bin():
        nonlocal n_bin
        n_bin += 1
        return n_int + n_bin - 1

    def emit(f):
        """Return the binary index gating this subformula (monotone encoding)."""
        g = new_bin()
        if isinstance(f, Leq):
            coeffs, const = _linearize(Sub(f.left, f.right))
            # sum + const <= 0 must hold when gate is 1:
            # sum + M*g <= M - const, with M an upper bound of sum + const
            m_val = sum(c * bound for c in coeffs.values() if c > 0) + const
            big_m = max(m_val, 0)
            row = [0] * n_int
            for v, c in coeffs.items():
                row[var_index[v]] = c
            gates.append((g, row, big_m, const))
        elif isinstance(f, And):
            gl = emit(f.left)
            gr = emit(f.right)
            rows.append(_gate_le(g, [gl]))
            rows.append(_gate_le(g, [gr]))
        elif isinstance(f, Or):
            gl = emit(f.left)
            gr = emit(f.right)
            rows.append(_gate_or(g, [gl, gr]))
        else:
            raise TypeError(f"unexpected node after NNF: {f!r}")
        return g

    def _gate_le(g, children):
        # g - child <= 0
        return ("le", g, children)

    def _gate_or(g, children):
        # g - sum children <= 0
        return ("or", g, children)

    root = emit(nnf)
    total = n_int + n_bin

    a_rows = []
    ubs = []
    for g, row, big_m, const in gates:
        vec = np.zeros(total)
        vec[: n_int] = row
        vec[g] = big_m
        a_rows.append(vec)
        ubs.append(big_m - const)
    for kind, g, children in rows:
        vec = np.zeros(total)
        vec[g] = 1.0
        for c in children:
            vec[c] = -1.0
        a_rows.append(vec)
        ubs.append(0.0)
    # force the root gate
    vec = np.zeros(total)
    vec[root] = -1.0
    a_rows.append(vec)
    ubs.append(-1.0)

    lower = np.zeros(total)
    upper = np.concatenate([np.full(n_int, float(bound)), np.ones(n_bin)])
    constraints = LinearConstraint(
        np.vstack(a_rows), -np.inf * np.ones(len(ubs)), np.array(ubs)
    )
    result = milp(
        c=np.zeros(total),
        constraints=constraints,
        integrality=np.ones(total),
        bounds=Bounds(lower, upper),
    )
    if not result.success or result.x is None:
        return None
    values = [int(round(v)) for v in result.x[:n_int]]
    return dict(zip(names, values))


def bpp_reach_formula(net: PetriNet, m0: Marking):
    """Existential formula whose natural models over the place variables are
    exactly the markings reachable from m0 (communication-free nets only).

    Marking equation plus a support condition: a used transition needs its
    pre-place to be initially marked or fed by a used transition of strictly
    smaller depth.
    """
    if not _nets.is_bpp(net):
        raise NotBpp("reachability characterization needs a communication-free net")
    count_of = {t.name: Var(f"x.{t.name}") for t in net.transitions}
    depth_of = {t.name: Var(f"z.{t.name}") for t in net.transitions}
    parts = []
    for i, p in enumerate(net.places):
        total = Const(m0.counts[i])
        for t in net.transitions:
            delta = t.post_map.get(p, 0) - t.pre_map.get(p, 0)
            if delta > 0:
                total = Add(total, _scaled(count_of[t.name], delta))
            elif delta < 0:
                total = Sub(total, _scaled(count_of[t.name], -delta))
        parts.append(equals(Var(p), total))
    max_depth = Const(len(net.transitions))
    for t in net.transitions:
        parts.append(Leq(depth_of[t.name], max_depth))
        pre = [p for p, w in t.pre for _ in range(w)]
        if not pre:
            continue
        q = pre[0]
        if m0.get(net, q) >= 1:
            continue
        producers = [
            u for u in net.transitions if u.post_map.get(q, 0) >= 1 and u.name != t.name
        ]
        feeders = [
            And(
                Leq(ONE, count_of[u.name]),
                lt(depth_of[u.name], depth_of[t.name]),
            )
            for u in producers
        ]
        parts.append(disj(Leq(count_of[t.name], ZERO), *feeders))
    body = conj(*parts)
    bound_names = [v.name for v in count_of.values()] + [
        v.name for v in depth_of.values()
    ]
    return exists(bound_names, body)


def _scaled(var, k: int):
    term = var
    for _ in range(k - 1):
        term = Add(term, var)
    return term


# SMT-LIB 2 export and the optional external solver


def _term_smt(t) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return str(t.value) if t.value >= 0 else f"(- {-t.value})"
    op = "+" if isinstance(t, Add) else "-"
    return f"({op} {_term_smt(t.left)} {_term_smt(t.right)})"


def _formula_smt(f) -> str:
    if isinstance(f, Leq):
        return f"(<= {_term_smt(f.left)} {_term_smt(f.right)})"
    if isinstance(f, Not):
        return f"(not {_formula_smt(f.body)})"
    if isinstance(f, Or):
        return f"(or {_formula_smt(f.left)} {_formula_smt(f.right)})"
    if isinstance(f, And):
        return f"(and {_formula_smt(f.left)} {_formula_smt(f.right)})"
    raise TypeError(f"not quantifier-free: {f!r}")


def smtlib_export(f) -> str:
    """QF_LIA script: naturals as non-negative Ints, quantifiers flattened."""
    qf, _renaming = flatten_exists(f)
    lines = ["(set-logic QF_LIA)"]
    for name in sorted(free_vars(qf)):
        lines.append(f"(declare-fun {name} () Int)")
        lines.append(f"(assert (>= {name} 0))")
    lines.append(f"(assert {_formula_smt(qf)})")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def _tokenize_sexpr(text: str):
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _read_sexprs(tokens):
    stack = [[]]
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    return stack[0]


def parse_smtlib_script(text: str):
    """Read back a script produced by smtlib_export: (variables, formula)."""
    exprs = _read_sexprs(_tokenize_sexpr(text))
    names = []
    asserts = []
    for e in exprs:
        if not isinstance(e, list) or not e:
            continue
        if e[0] == "declare-fun":
            names.append(e[1])
        elif e[0] == "assert":
            asserts.append(_sexpr_formula(e[1]))
    return names, conj(*asserts)


def _sexpr_term(e):
    if isinstance(e, str):
        if e.lstrip("-").isdigit():
            return Const(int(e))
        return Var(e)
    op, *args = e
    if op == "-" and len(args) == 1:
        return Sub(ZERO, _sexpr_term(args[0]))
    terms = [_sexpr_term(a) for a in args]
    result = terms[0]
    for t in terms[1:]:
        result = Add(result, t) if op == "+" else Sub(result, t)
    return result


def _sexpr_formula(e):
    op, *args = e
    if op == "<=":
        return Leq(_sexpr_term(args[0]), _sexpr_term(args[1]))
    if op == ">=":
        return Leq(_sexpr_term(args[1]), _sexpr_term(args[0]))
    if op == "not":
        return Not(_sexpr_formula(args[0]))
    if op == "or":
        return disj(*[_sexpr_formula(a) for a in args])
    if op == "and":
        return conj(*[_sexpr_formula(a) for a in args])
    raise ValueError(f"unsupported operator {op!r}")


def run_external_solver(f, solver_path: str, timeout: float = 60.0):
    """Run an SMT-LIB2 solver binary; returns (verdict, model-or-None).

    verdict is True/False/None (sat/unsat/unknown).  Models are re-checked
    with evaluate before being trusted.
    """
    script = smtlib_export(f)
    with tempfile.NamedTemporaryFile(
        "w", suffix=".smt2", delete=False, prefix="covlang-"
    ) as handle:
        handle.write(script)
        path = handle.name
    try:
        proc = subprocess.run(
            [solver_path, path],
            capture_output=True,
            text=True,
            timeout=timeout,
        )
    except (OSError, subprocess.TimeoutExpired) as err:
        raise SolverUnavailable(f"cannot run {solver_path!r}: {err}") from err
    finally:
        Path(path).unlink(missing_ok=True)
    out = proc.stdout.strip().splitlines()
    if not out:
        raise SolverUnavailable(f"{solver_path!r} produced no output")
    status = out[0].strip()
    if status == "unsat":
        return False, None
    if status != "sat":
        return None, None
    model = _parse_model("\n".join(out[1:]))
    qf, renaming = flatten_exists(f)
    full = {name: model.get(name, 0) for name in free_vars(qf)}
    if not evaluate(qf, full):
        raise SolverUnavailable(f"{solver_path!r} returned an invalid model")
    return True, _present_model(full, renaming, free_vars(f))


def _parse_model(text: str) -> dict:
    model = {}
    for e in _read_sexprs(_tokenize_sexpr(text)):
        items = e if isinstance(e, list) else [e]
        stack = [items]
        while stack:
            node = stack.pop()
            if isinstance(node, list) and node[:1] == ["define-fun"] and len(node) >= 5:
                name = node[1]
                value = node[4]
                if isinstance(value, list) and value[:1] == ["-"]:
                    model[name] = -int(value[1])
                elif isinstance(value, str) and value.lstrip("-").isdigit():
                    model[name] = int(value)
            elif isinstance(node, list):
                stack.extend(node)
    return model
