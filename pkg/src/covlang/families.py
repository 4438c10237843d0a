"""Built-in net families: hard and illustrative instances.

rackoff-ce: three-place net whose language a+b | a*c separates shortest
covering runs from the runs needed to produce all minimal words.
bpp-power(n): communication-free net with the singleton language a^(2^n).
ackermann(n, x): terminating net whose word lengths range up to Acker_n(x).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

from .errors import InfeasibleParams
from .nets import EPSILON, Marking, NetInstance, PetriNet, Transition


def rackoff_counterexample() -> NetInstance:
    """One pump place feeding a synchronizing exit; language a+b | a*c."""
    net = PetriNet(
        ("a", "b", "c"),
        ("run", "temp", "stop"),
        (
            Transition.make("rt_help", "a", {"run": 1}, {"run": 1, "temp": 1}),
            Transition.make("rt_b", "b", {"run": 1, "temp": 1}, {"stop": 1}),
            Transition.make("rt_a", "c", {"run": 1}, {"stop": 1}),
        ),
    )
    return NetInstance(
        net, Marking.of(net, {"run": 1}), Marking.of(net, {"stop": 1})
    )


def bpp_power_instance(n: int) -> NetInstance:
    """Language { a^(2^n) } with a polynomially sized net.

    The initial token sits on the place feeding the token multiplier, so the
    unique covering run is the multiplier step followed by 2^n letter steps.
    """
    if n < 0:
        raise InfeasibleParams("n must be non-negative")
    if n > 64:
        raise InfeasibleParams("2^n tokens would be astronomical")
    net = PetriNet(
        ("a",),
        ("p0", "p1", "pf"),
        (
            Transition.make("t", EPSILON, {"p0": 1}, {"p1": 2**n}),
            Transition.make("ta", "a", {"p1": 1}, {"pf": 1}),
        ),
    )
    return NetInstance(
        net, Marking.of(net, {"p0": 1}), Marking.of(net, {"pf": 2**n})
    )


def _check_ackermann_params(n: int, x: int, allow_large: bool):
    if n < 0 or x < 0:
        raise InfeasibleParams("parameters must be non-negative")
    if not allow_large and n >= 3 and x >= 2:
        raise InfeasibleParams(
            f"Acker_{n}({x}) is out of desk range; pass allow_large to override"
        )


def ackermann_value(n: int, x: int, allow_large: bool = False) -> int:
    """Exact Ackermann value by memoized recursion."""
    _check_ackermann_params(n, x, allow_large)
    memo = {}
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 50_000))
    try:
        def acker(n, x):
            if n == 0:
                return x + 1
            key = (n, x)
            if key in memo:
                return memo[key]
            if x == 0:
                value = acker(n - 1, 1)
            else:
                inner = acker(n, x - 1)
                if inner.bit_length() > 10**6:
                    raise InfeasibleParams("intermediate Ackermann value too large")
                value = acker(n - 1, inner)
            memo[key] = value
            return value

        return acker(n, x)
    finally:
        sys.setrecursionlimit(limit)


def _ackermann_net_parts(n: int):
    """Places and transitions of all stages up to n (all silent)."""
    places = ["in0", "out0", "start0", "stop0", "copy0"]
    transitions = [
        Transition.make("t_start0", EPSILON, {"start0": 1}, {"copy0": 1}),
        Transition.make(
            "t_copy0",
            EPSILON,
            {"in0": 1, "copy0": 1},
            {"out0": 1, "copy0": 1},
        ),
        Transition.make(
            "t_stop0", EPSILON, {"copy0": 1}, {"stop0": 1, "out0": 1}
        ),
    ]
    for i in range(1, n + 1):
        places += [
            f"in{i}",
            f"start{i}",
            f"copy{i}",
            f"out{i}",
            f"stop{i}",
            f"swap{i}",
            f"tmp{i}",
        ]
        transitions += [
            Transition.make(
                f"t_start{i}",
                EPSILON,
                {f"start{i}": 1},
                {f"in{i-1}": 1, f"start{i-1}": 1},
            ),
            Transition.make(
                f"t_in{i}", EPSILON, {f"in{i}": 1, f"stop{i-1}": 1}, {f"swap{i}": 1}
            ),
            Transition.make(
                f"t_swap{i}",
                EPSILON,
                {f"swap{i}": 1, f"out{i-1}": 1},
                {f"swap{i}": 1, f"in{i-1}": 1},
            ),
            Transition.make(
                f"t_restart{i}", EPSILON, {f"swap{i}": 1}, {f"start{i-1}": 1}
            ),
            Transition.make(
                f"t_tmp{i}", EPSILON, {f"stop{i-1}": 1}, {f"tmp{i}": 1}
            ),
            Transition.make(
                f"t_copy{i}",
                EPSILON,
                {f"tmp{i}": 1, f"out{i-1}": 1},
                {f"tmp{i}": 1, f"out{i}": 1},
            ),
            Transition.make(
                f"t_stop{i}", EPSILON, {f"tmp{i}": 1}, {f"stop{i}": 1}
            ),
        ]
    return places, transitions


def ackermann_instance(n: int, x: int, allow_large: bool = False) -> NetInstance:
    """Terminating net with language { a^k | k <= Acker_n(x) }."""
    _check_ackermann_params(n, x, allow_large)
    places, transitions = _ackermann_net_parts(n)
    places = places + ["final"]
    transitions = transitions + [
        Transition.make("t_final", "a", {f"out{n}": 1}, {"final": 1})
    ]
    net = PetriNet(("a",), tuple(places), tuple(transitions))
    return NetInstance(
        net,
        Marking.of(net, {f"start{n}": 1, f"in{n}": x}),
        Marking.zero(net),
    )


@dataclass(frozen=True)
class FamilyParams:
    family: str  # rackoff-ce | bpp-power | ackermann
    n: int = 0
    x: int = 0
    allow_large: bool = False


def generate(params: FamilyParams) -> NetInstance:
    if params.family == "rackoff-ce":
        return rackoff_counterexample()
    if params.family == "bpp-power":
        return bpp_power_instance(params.n)
    if params.family == "ackermann":
        return ackermann_instance(params.n, params.x, params.allow_large)
    raise ValueError(f"unknown family {params.family!r}")
