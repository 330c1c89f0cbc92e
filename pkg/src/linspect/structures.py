"""Finite relational structures, pointed variants, and structure-level constructions.

Element ids are opaque strings.  Universes are ordered lists so that every
enumeration downstream (run listing, morphism search, trace sets) is
deterministic across runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence


Tuple_ = tuple[str, ...]


class SignatureMismatch(ValueError):
    """Raised when an operation combines structures over different signatures."""


class UnknownElement(KeyError):
    """Raised when an element id is not part of a structure's universe."""


@dataclass(frozen=True)
class Signature:
    """A finite set of relation symbols with arities.

    A signature flagged ``modal`` may only contain unary relations
    (propositions) and binary relations (actions).
    """

    relations: tuple[tuple[str, int], ...]
    modal: bool = False

    def __post_init__(self) -> None:
        names = [name for name, _ in self.relations]
        if len(names) != len(set(names)):
            raise ValueError("relation names must be unique")
        for name, arity in self.relations:
            if arity < 1:
                raise ValueError(f"relation {name!r} must have positive arity")
            if self.modal and arity > 2:
                raise ValueError(f"modal signature forbids arity {arity} ({name!r})")

    def arity(self, name: str) -> int:
        for rel, ar in self.relations:
            if rel == name:
                return ar
        raise KeyError(name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.relations)

    @property
    def propositions(self) -> tuple[str, ...]:
        """Unary relation names (valuations), in declaration order."""
        return tuple(name for name, ar in self.relations if ar == 1)

    @property
    def actions(self) -> tuple[str, ...]:
        """Binary relation names (transitions), in declaration order."""
        return tuple(name for name, ar in self.relations if ar == 2)


@dataclass(frozen=True)
class Structure:
    """A finite structure: ordered universe plus per-relation tuple sets."""

    signature: Signature
    universe: tuple[str, ...]
    interp: Mapping[str, frozenset[Tuple_]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        frozen = {name: frozenset(map(tuple, tuples)) for name, tuples in self.interp.items()}
        for name in self.signature.names:
            frozen.setdefault(name, frozenset())
        object.__setattr__(self, "interp", frozen)

    def tuples(self, relation: str) -> frozenset[Tuple_]:
        return self.interp[relation]

    def has(self, relation: str, *elements: str) -> bool:
        return tuple(elements) in self.interp[relation]

    def valuation(self, element: str) -> frozenset[str]:
        """The set of unary relation names holding at ``element``."""
        return frozenset(
            p for p in self.signature.propositions if (element,) in self.interp[p]
        )

    def successors(self, element: str, action: str) -> tuple[str, ...]:
        """Targets of ``action``-transitions out of ``element``, in universe order."""
        targets = {b for (a, b) in self.interp[action] if a == element}
        return tuple(x for x in self.universe if x in targets)

    def enabled_actions(self, element: str) -> frozenset[str]:
        """The ready set: actions with at least one transition out of ``element``."""
        return frozenset(
            act
            for act in self.signature.actions
            if any(a == element for (a, _) in self.interp[act])
        )

    def is_terminal(self, element: str) -> bool:
        return not self.enabled_actions(element)


@dataclass(frozen=True)
class PointedStructure:
    """A structure with a distinguished point."""

    base: Structure
    point: str

    def __post_init__(self) -> None:
        if self.point not in self.base.universe:
            raise UnknownElement(self.point)

    @property
    def signature(self) -> Signature:
        return self.base.signature


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    errors: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def validate(s: Structure) -> ValidationReport:
    """Check every structure invariant; report all violations rather than the first."""
    errors: list[str] = []
    seen: set[str] = set()
    for e in s.universe:
        if e in seen:
            errors.append(f"duplicate element {e!r}")
        seen.add(e)
    names = set(s.signature.names)
    for name, tuples in s.interp.items():
        if name not in names:
            errors.append(f"unknown relation {name!r}")
            continue
        arity = s.signature.arity(name)
        for tup in sorted(tuples):
            if len(tup) != arity:
                errors.append(f"arity mismatch in {name!r}: {tup} has width {len(tup)}, expected {arity}")
            for e in tup:
                if e not in seen:
                    errors.append(f"unknown element {e!r} in tuple {tup} of {name!r}")
    return ValidationReport(ok=not errors, errors=tuple(sorted(errors)))


def gaifman_graph(s: Structure) -> dict[str, set[str]]:
    """Adjacency map: a ~ a' iff a = a' or they co-occur in some interpreted tuple."""
    adj: dict[str, set[str]] = {e: {e} for e in s.universe}
    for tuples in s.interp.values():
        for tup in tuples:
            for a in tup:
                for b in tup:
                    adj[a].add(b)
                    adj[b].add(a)
    return adj


def distance(s: Structure, a: str, b: str) -> float:
    """Shortest-path distance in the Gaifman graph; ``inf`` if disconnected."""
    for e in (a, b):
        if e not in s.universe:
            raise UnknownElement(e)
    if a == b:
        return 0
    adj = gaifman_graph(s)
    dist = {a: 0}
    frontier = [a]
    while frontier:
        nxt: list[str] = []
        for x in frontier:
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    if y == b:
                        return dist[y]
                    nxt.append(y)
        frontier = nxt
    return float("inf")


def _distances_from(s: Structure, a: str) -> dict[str, int]:
    adj = gaifman_graph(s)
    dist = {a: 0}
    frontier = [a]
    while frontier:
        nxt: list[str] = []
        for x in frontier:
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    return dist


def induced(s: Structure, keep: Iterable[str]) -> Structure:
    """Induced substructure on ``keep`` (order inherited from the universe)."""
    kept = [e for e in s.universe if e in set(keep)]
    kset = set(kept)
    interp = {
        name: frozenset(t for t in tuples if all(e in kset for e in t))
        for name, tuples in s.interp.items()
    }
    return Structure(s.signature, tuple(kept), interp)


def ball(p: PointedStructure, k: int) -> PointedStructure:
    """Induced substructure on elements at Gaifman distance <= k from the point."""
    dist = _distances_from(p.base, p.point)
    keep = [e for e in p.base.universe if dist.get(e, k + 1) <= k]
    return PointedStructure(induced(p.base, keep), p.point)


def _retag(s: Structure, tag: str) -> tuple[tuple[str, ...], dict[str, frozenset[Tuple_]]]:
    ren = {e: f"{e}{tag}" for e in s.universe}
    universe = tuple(ren[e] for e in s.universe)
    interp = {
        name: frozenset(tuple(ren[e] for e in t) for t in tuples)
        for name, tuples in s.interp.items()
    }
    return universe, interp


def disjoint_union(a: Structure, b: Structure) -> Structure:
    """Coproduct; elements are tagged ``#0`` / ``#1`` by origin."""
    if a.signature != b.signature:
        raise SignatureMismatch("disjoint_union requires a shared signature")
    ua, ia = _retag(a, "#0")
    ub, ib = _retag(b, "#1")
    interp = {name: ia[name] | ib[name] for name in a.signature.names}
    return Structure(a.signature, ua + ub, interp)


def sum_many(parts: Sequence[Structure], signature: Signature) -> Structure:
    """n-ary disjoint union with ``#i`` origin tags; allows the empty sum."""
    universe: list[str] = []
    interp: dict[str, set[Tuple_]] = {name: set() for name in signature.names}
    for i, part in enumerate(parts):
        if part.signature != signature:
            raise SignatureMismatch("sum_many requires a shared signature")
        u, itp = _retag(part, f"#{i}")
        universe.extend(u)
        for name in signature.names:
            interp[name] |= itp[name]
    return Structure(signature, tuple(universe), {k: frozenset(v) for k, v in interp.items()})


def copies(a: Structure, n: int) -> Structure:
    """n-fold disjoint union of ``a`` with itself."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return sum_many([a] * n, a.signature)


def pointed_sum(p: PointedStructure, extra: Structure) -> PointedStructure:
    """Disjoint extension: p + extra, keeping p's point (tagged ``#0``)."""
    return PointedStructure(disjoint_union(p.base, extra), f"{p.point}#0")


def pair_id(x: str, y: str) -> str:
    return f"({x},{y})"


def product(a: PointedStructure, b: PointedStructure) -> PointedStructure:
    """Pointed product: relations hold componentwise on both projections."""
    if a.signature != b.signature:
        raise SignatureMismatch("product requires a shared signature")
    sig = a.signature
    universe = tuple(pair_id(x, y) for x in a.base.universe for y in b.base.universe)
    interp: dict[str, frozenset[Tuple_]] = {}
    for name, arity in sig.relations:
        tuples = set()
        for ta in a.base.interp[name]:
            for tb in b.base.interp[name]:
                tuples.add(tuple(pair_id(x, y) for x, y in zip(ta, tb)))
        interp[name] = frozenset(tuples)
    return PointedStructure(
        Structure(sig, universe, interp), pair_id(a.point, b.point)
    )


# --- file format -----------------------------------------------------------
#
# {"signature": {"modal": bool, "relations": [{"name": str, "arity": int}]},
#  "universe": [str], "point": str|null, "interp": {name: [[str, ...], ...]}}
#
# Unknown fields are rejected.

_TOP_FIELDS = {"signature", "universe", "point", "interp", "forest"}
_SIG_FIELDS = {"modal", "relations"}
_REL_FIELDS = {"name", "arity"}


class FormatError(ValueError):
    """Raised when a structure file does not match the documented schema."""


def structure_from_dict(data: dict) -> tuple[Structure, Optional[str], Optional[dict]]:
    """Decode the JSON object form; returns (structure, point-or-None, forest block)."""
    if not isinstance(data, dict):
        raise FormatError("top level must be an object")
    unknown = set(data) - _TOP_FIELDS
    if unknown:
        raise FormatError(f"unknown fields: {sorted(unknown)}")
    for required in ("signature", "universe", "interp"):
        if required not in data:
            raise FormatError(f"missing field {required!r}")
    sig_data = data["signature"]
    if not isinstance(sig_data, dict) or set(sig_data) - _SIG_FIELDS:
        raise FormatError("bad signature block")
    rels = []
    for rel in sig_data.get("relations", []):
        if not isinstance(rel, dict) or set(rel) - _REL_FIELDS:
            raise FormatError("bad relation entry")
        rels.append((str(rel["name"]), int(rel["arity"])))
    sig = Signature(tuple(rels), modal=bool(sig_data.get("modal", False)))
    universe = tuple(str(e) for e in data["universe"])
    interp = {
        str(name): frozenset(tuple(str(e) for e in t) for t in tuples)
        for name, tuples in data["interp"].items()
    }
    s = Structure(sig, universe, interp)
    report = validate(s)
    if not report.ok:
        raise FormatError("; ".join(report.errors))
    point = data.get("point")
    if point is not None:
        point = str(point)
        if point not in universe:
            raise FormatError(f"point {point!r} not in universe")
    return s, point, data.get("forest")


def structure_to_dict(s: Structure, point: Optional[str] = None) -> dict:
    return {
        "signature": {
            "modal": s.signature.modal,
            "relations": [{"name": n, "arity": a} for n, a in s.signature.relations],
        },
        "universe": list(s.universe),
        "point": point,
        "interp": {name: sorted(map(list, s.interp[name])) for name in s.signature.names},
    }


def load_structure(path: str) -> tuple[Structure, Optional[str]]:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    s, point, _ = structure_from_dict(data)
    return s, point


def load_pointed(path: str) -> PointedStructure:
    s, point = load_structure(path)
    if point is None:
        raise FormatError(f"{path}: a pointed structure requires a point")
    return PointedStructure(s, point)


def dump_structure(s: Structure, point: Optional[str] = None, path: Optional[str] = None) -> str:
    text = json.dumps(structure_to_dict(s, point), indent=2, sort_keys=True)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text
