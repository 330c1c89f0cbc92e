"""The fixture library shipped with the repository.

fix1  a0 -a-> a1; a1 -b-> a2; a1 -c-> a3      (one a-branch, then b/c fork)
fix2  b0 -a-> b1, b0 -a-> b1x; b1 -b-> b2; b1x -c-> b3   (fork moved to the root)
fix3  c0 -a-> c1 (terminal); c0 -a-> c2 -b-> c3
fix4  d0 -a-> d1 -b-> d2                       (a plain chain)
fix5  e0 [p] -a-> e1 [q]                       (a chain with propositions)
loop  x -a-> x                                 (a single self-loop)
chain2 / chain3   2- and 3-node directed R-chains, no point
"""

from __future__ import annotations

import os

from .structures import PointedStructure, Signature, Structure, dump_structure

MODAL_SIG = Signature((("a", 2), ("b", 2), ("c", 2)), modal=True)
PROP_SIG = Signature((("p", 1), ("q", 1), ("a", 2)), modal=True)
PLAIN_SIG = Signature((("R", 2),))


def _pointed(sig: Signature, universe, point, **relations) -> PointedStructure:
    interp = {name: frozenset(map(tuple, tuples)) for name, tuples in relations.items()}
    return PointedStructure(Structure(sig, tuple(universe), interp), point)


def fix1() -> PointedStructure:
    return _pointed(
        MODAL_SIG,
        ["a0", "a1", "a2", "a3"],
        "a0",
        a=[("a0", "a1")],
        b=[("a1", "a2")],
        c=[("a1", "a3")],
    )


def fix2() -> PointedStructure:
    return _pointed(
        MODAL_SIG,
        ["b0", "b1", "b1x", "b2", "b3"],
        "b0",
        a=[("b0", "b1"), ("b0", "b1x")],
        b=[("b1", "b2")],
        c=[("b1x", "b3")],
    )


def fix3() -> PointedStructure:
    return _pointed(
        MODAL_SIG,
        ["c0", "c1", "c2", "c3"],
        "c0",
        a=[("c0", "c1"), ("c0", "c2")],
        b=[("c2", "c3")],
    )


def fix4() -> PointedStructure:
    return _pointed(
        MODAL_SIG,
        ["d0", "d1", "d2"],
        "d0",
        a=[("d0", "d1")],
        b=[("d1", "d2")],
    )


def fix5() -> PointedStructure:
    return _pointed(
        PROP_SIG,
        ["e0", "e1"],
        "e0",
        p=[("e0",)],
        q=[("e1",)],
        a=[("e0", "e1")],
    )


def loop() -> PointedStructure:
    return _pointed(
        Signature((("a", 2),), modal=True), ["x"], "x", a=[("x", "x")]
    )


def chain2() -> Structure:
    return Structure(PLAIN_SIG, ("n0", "n1"), {"R": frozenset({("n0", "n1")})})


def chain3() -> Structure:
    return Structure(
        PLAIN_SIG, ("n0", "n1", "n2"), {"R": frozenset({("n0", "n1"), ("n1", "n2")})}
    )


ALL_POINTED = {
    "fix1": fix1,
    "fix2": fix2,
    "fix3": fix3,
    "fix4": fix4,
    "fix5": fix5,
    "loop": loop,
}

ALL_PLAIN = {"chain2": chain2, "chain3": chain3}


def write_fixture_files(directory: str) -> list[str]:
    """Write every fixture to ``directory`` as a structure JSON file."""
    os.makedirs(directory, exist_ok=True)
    written = []
    for name, make in ALL_POINTED.items():
        p = make()
        path = os.path.join(directory, f"{name}.json")
        dump_structure(p.base, p.point, path)
        written.append(path)
    for name, make in ALL_PLAIN.items():
        path = os.path.join(directory, f"{name}.json")
        dump_structure(make(), None, path)
        written.append(path)
    return written
