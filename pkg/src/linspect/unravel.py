"""Unraveling constructions: linear modal, branching tree, branch decomposition,
depth-bounded grafting, and the pebble-sequence forest over a general signature.

The linear modal unraveling at depth k has one chain per *maximal* run: a run
of length exactly k, or a shorter run ending in a terminal state.  Chains for
extendable shorter runs would dead-end and manufacture spurious complete
traces; with maximal runs only, the construction is idempotent and the grafted
variant is complete-trace equivalent to its source.  The node count is
therefore 1 + sum of the lengths of the maximal runs.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional


from .structures import PointedStructure, Signature, Structure, induced
from .traces import NonModalSignature, Run, maximal_runs, runs_upto


@dataclass
class ForestObject:
    """A forest-ordered structure: nodes, parent map, labels, optional pebbles.

    ``interp`` interprets the signature's relations over the nodes.  For modal
    forests the binary relations sit exactly on covering pairs, one action per
    pair; pebbled forests interpret relations by the pebble-reuse conditions
    and may relate non-covering nodes.
    """

    kind: str  # "modal" | "pebbled"
    signature: Signature
    nodes: tuple[str, ...]
    parent: dict[str, str]
    roots: tuple[str, ...]
    interp: dict[str, frozenset[tuple[str, ...]]]
    origin: dict[str, str] = field(default_factory=dict)
    valuation: dict[str, frozenset[str]] = field(default_factory=dict)
    action_in: dict[str, str] = field(default_factory=dict)
    pebble: dict[str, int] = field(default_factory=dict)
    # source of the counit map; pebbled path comparisons consult its relations
    origin_structure: Optional[Structure] = None

    def __post_init__(self) -> None:
        self._children: dict[str, list[str]] = {n: [] for n in self.nodes}
        for child, par in self.parent.items():
            self._children[par].append(child)
        for n, par in self.parent.items():
            seen = {n}
            while par is not None:
                if par in seen:
                    raise ValueError(f"parent cycle through {n!r}")
                seen.add(par)
                par = self.parent.get(par)
        rootset = set(self.roots)
        for n in self.nodes:
            if (n in self.parent) == (n in rootset):
                raise ValueError(f"node {n!r} must be exactly one of root/child")

    def children(self, node: str) -> tuple[str, ...]:
        return tuple(self._children[node])

    def is_leaf(self, node: str) -> bool:
        return not self._children[node]

    def depth(self, node: str) -> int:
        d = 0
        while node in self.parent:
            node = self.parent[node]
            d += 1
        return d

    def path_to_root(self, node: str) -> tuple[str, ...]:
        """The down-set of ``node`` as a root-first chain."""
        chain = [node]
        while node in self.parent:
            node = self.parent[node]
            chain.append(node)
        return tuple(reversed(chain))

    @property
    def linear(self) -> bool:
        """True iff every up-set of a non-root node is a chain."""
        return all(
            len(self._children[n]) <= 1 for n in self.nodes if n not in set(self.roots)
        )

    def node_count(self) -> int:
        return len(self.nodes)


def check_modal_covering(f: ForestObject) -> list[str]:
    """Condition (M): each covering pair carries exactly one action."""
    problems = []
    for child, par in f.parent.items():
        actions = [
            act for act in f.signature.actions if (par, child) in f.interp[act]
        ]
        if len(actions) != 1:
            problems.append(f"covering pair ({par!r},{child!r}) carries {actions}")
    return problems


def check_condition_p(f: ForestObject) -> list[str]:
    """Pebble discipline: if nodes a <= a' co-occur in a relation tuple, no node
    in the half-open segment (a, a'] may reuse a's pebble."""
    problems = []
    for leaf in (n for n in f.nodes if f.is_leaf(n)):
        chain = f.path_to_root(leaf)
        pos = {node: i for i, node in enumerate(chain)}
        chain_set = set(chain)
        for rel in f.interp.values():
            for t in rel:
                if not all(e in chain_set for e in t):
                    continue
                for a in t:
                    for a2 in t:
                        if pos[a] >= pos[a2]:
                            continue
                        for mid in chain[pos[a] + 1 : pos[a2] + 1]:
                            if f.pebble[mid] == f.pebble[a]:
                                problems.append(
                                    f"pebble {f.pebble[a]} reused at {mid!r} within ({a!r},{a2!r}]"
                                )
    return sorted(set(problems))


# --- linear modal unraveling -------------------------------------------------


def _run_string(run: Run) -> str:
    steps = "".join(
        f">{act}:{state}" for act, state in zip(run.actions, run.states[1:])
    )
    return f"{run.states[0]}{steps}"


def _run_node(run: Run, i: int) -> str:
    # the full run tags the chain: distinct runs get disjoint chains even
    # when they share a prefix
    return f"{_run_string(run)}|{i}"


def ml_unravel(p: PointedStructure, k: int) -> tuple[ForestObject, dict[str, str]]:
    """Depth-k linear unraveling: a linear tree with one chain per maximal run.

    Returns the forest and the counit map from nodes to source elements.
    """
    if not p.signature.modal:
        raise NonModalSignature("ml_unravel requires a modal signature")
    root = p.point
    nodes = [root]
    parent: dict[str, str] = {}
    origin = {root: p.point}
    valuation = {root: p.base.valuation(p.point)}
    action_in: dict[str, str] = {}
    binary: dict[str, set[tuple[str, str]]] = {a: set() for a in p.signature.actions}
    for run in maximal_runs(p, k):
        prev = root
        for i in range(1, len(run) + 1):
            node = _run_node(run, i)
            nodes.append(node)
            parent[node] = prev
            origin[node] = run.states[i]
            valuation[node] = p.base.valuation(run.states[i])
            action_in[node] = run.actions[i - 1]
            binary[run.actions[i - 1]].add((prev, node))
            prev = node
    interp: dict[str, frozenset[tuple[str, ...]]] = {}
    for prop in p.signature.propositions:
        interp[prop] = frozenset((n,) for n in nodes if prop in valuation[n])
    for act in p.signature.actions:
        interp[act] = frozenset(binary[act])
    forest = ForestObject(
        kind="modal",
        signature=p.signature,
        nodes=tuple(nodes),
        parent=parent,
        roots=(root,),
        interp=interp,
        origin=origin,
        valuation=valuation,
        action_in=action_in,
        origin_structure=p.base,
    )
    return forest, dict(origin)


def ml_node_count(p: PointedStructure, k: int) -> int:
    """Closed form for the linear unraveling's size: 1 + total maximal-run length."""
    return 1 + sum(len(r) for r in maximal_runs(p, k))


def tree_unravel(p: PointedStructure, k: int) -> ForestObject:
    """Depth-k synchronization tree: nodes are runs, children extend by a step."""
    if not p.signature.modal:
        raise NonModalSignature("tree_unravel requires a modal signature")
    root = f"@{p.point}"
    nodes = [root]
    parent: dict[str, str] = {}
    origin = {root: p.point}
    valuation = {root: p.base.valuation(p.point)}
    action_in: dict[str, str] = {}
    binary: dict[str, set[tuple[str, str]]] = {a: set() for a in p.signature.actions}

    def node_id(run: Run) -> str:
        if len(run) == 0:
            return root
        return "@" + _run_node(run, len(run)).rsplit("|", 1)[0]

    for run in runs_upto(p, k):
        if len(run) == 0:
            continue
        node = node_id(run)
        prefix = Run(run.states[:-1], run.actions[:-1])
        par = node_id(prefix)
        nodes.append(node)
        parent[node] = par
        origin[node] = run.last
        valuation[node] = p.base.valuation(run.last)
        action_in[node] = run.actions[-1]
        binary[run.actions[-1]].add((par, node))
    interp: dict[str, frozenset[tuple[str, ...]]] = {}
    for prop in p.signature.propositions:
        interp[prop] = frozenset((n,) for n in nodes if prop in valuation[n])
    for act in p.signature.actions:
        interp[act] = frozenset(binary[act])
    return ForestObject(
        kind="modal",
        signature=p.signature,
        nodes=tuple(nodes),
        parent=parent,
        roots=(root,),
        interp=interp,
        origin=origin,
        valuation=valuation,
        action_in=action_in,
        origin_structure=p.base,
    )


def coreflect(x: ForestObject) -> ForestObject:
    """Branch decomposition: one disjoint chain per maximal node's down-set."""
    maximal = [n for n in x.nodes if x.is_leaf(n)]
    nodes: list[str] = []
    parent: dict[str, str] = {}
    roots: list[str] = []
    origin: dict[str, str] = {}
    valuation: dict[str, frozenset[str]] = {}
    action_in: dict[str, str] = {}
    pebble: dict[str, int] = {}
    tuples: dict[str, set[tuple[str, ...]]] = {name: set() for name in x.signature.names}
    for b, leaf in enumerate(maximal):
        chain = x.path_to_root(leaf)
        rename = {orig: f"b{b}.{i}" for i, orig in enumerate(chain)}
        for i, orig in enumerate(chain):
            node = rename[orig]
            nodes.append(node)
            if i == 0:
                roots.append(node)
            else:
                parent[node] = rename[chain[i - 1]]
                if orig in x.action_in:
                    action_in[node] = x.action_in[orig]
            if orig in x.origin:
                origin[node] = x.origin[orig]
            if orig in x.valuation:
                valuation[node] = x.valuation[orig]
            if orig in x.pebble:
                pebble[node] = x.pebble[orig]
        chain_set = set(chain)
        for name, rel in x.interp.items():
            for t in rel:
                if all(e in chain_set for e in t):
                    tuples[name].add(tuple(rename[e] for e in t))
    return ForestObject(
        kind=x.kind,
        signature=x.signature,
        nodes=tuple(nodes),
        parent=parent,
        roots=tuple(roots),
        interp={name: frozenset(ts) for name, ts in tuples.items()},
        origin=origin,
        valuation=valuation,
        action_in=action_in,
        pebble=pebble,
        origin_structure=x.origin_structure,
    )


def branch_label_multiset(x: ForestObject) -> Counter:
    """Multiset of maximal-branch label sequences (valuations and actions)."""
    leaves = [n for n in x.nodes if x.is_leaf(n)]
    out: Counter = Counter()
    for leaf in leaves:
        chain = x.path_to_root(leaf)
        labels = tuple(
            (tuple(sorted(x.valuation.get(n, frozenset()))), x.action_in.get(n))
            for n in chain
        )
        out[labels] += 1
    return out


def as_pointed(x: ForestObject) -> PointedStructure:
    """Re-read a single-rooted modal forest as a pointed structure."""
    if x.kind != "modal":
        raise ValueError("as_pointed requires a modal forest")
    if len(x.roots) != 1:
        raise ValueError("as_pointed requires a single root")
    return PointedStructure(
        Structure(x.signature, x.nodes, dict(x.interp)), x.roots[0]
    )


def reachable_part(s: Structure, start: str) -> Structure:
    """Induced substructure on elements reachable from ``start`` via actions."""
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for e in frontier:
            for act in s.signature.actions:
                for t in s.successors(e, act):
                    if t not in seen:
                        seen.add(t)
                        nxt.append(t)
        frontier = nxt
    return induced(s, seen)


def ml_graft(p: PointedStructure, k: int) -> PointedStructure:
    """Depth-k unraveling with a copy of the source grafted onto each depth-k leaf.

    The grafted copy at leaf (s,k) is the part of the source reachable from the
    leaf's origin; the copy's anchor element is identified with the leaf, so no
    explicit quotient classes are needed.  Grafted nodes are named
    ``leaf-id/element-id``.
    """
    forest, counit = ml_unravel(p, k)
    base = as_pointed(forest)
    universe = list(base.base.universe)
    interp: dict[str, set[tuple[str, ...]]] = {
        name: set(base.base.interp[name]) for name in p.signature.names
    }
    depth_k_leaves = [
        n for n in forest.nodes if forest.is_leaf(n) and forest.depth(n) == k
    ]
    for leaf in depth_k_leaves:
        anchor = counit[leaf]
        part = reachable_part(p.base, anchor)
        rename = {e: (leaf if e == anchor else f"{leaf}/{e}") for e in part.universe}
        for e in part.universe:
            if e != anchor:
                universe.append(rename[e])
        for name in p.signature.names:
            for t in part.interp[name]:
                interp[name].add(tuple(rename[e] for e in t))
    return PointedStructure(
        Structure(
            p.signature,
            tuple(universe),
            {name: frozenset(ts) for name, ts in interp.items()},
        ),
        forest.roots[0],
    )


# --- pebble-sequence forest ---------------------------------------------------


def _seq_node(seq: tuple[tuple[int, str], ...], i: int) -> str:
    body = "".join(f"({p}:{e})" for p, e in seq)
    return f"{body}|{i}"


def pr_unravel(
    s: Structure, k: int, n: int
) -> tuple[ForestObject, dict[str, str]]:
    """Linear forest of pebble-placement sequences of length <= n over k pebbles.

    A relation tuple holds at positions of one chain iff each position's pebble
    is not reused later (up to the tuple's maximal index) and the relation
    holds on the placed elements in the source structure.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    alphabet = [(pb, el) for pb in range(1, k + 1) for el in s.universe]
    nodes: list[str] = []
    parent: dict[str, str] = {}
    roots: list[str] = []
    origin: dict[str, str] = {}
    pebble: dict[str, int] = {}
    tuples: dict[str, set[tuple[str, ...]]] = {name: set() for name in s.signature.names}

    def add_chain(seq: tuple[tuple[int, str], ...]) -> None:
        ids = [_seq_node(seq, i + 1) for i in range(len(seq))]
        for i, node in enumerate(ids):
            nodes.append(node)
            origin[node] = seq[i][1]
            pebble[node] = seq[i][0]
            if i == 0:
                roots.append(node)
            else:
                parent[node] = ids[i - 1]
        for name, arity in s.signature.relations:
            for combo in _index_tuples(len(seq), arity):
                top = max(combo)
                ok = True
                for idx in combo:
                    reused = any(
                        seq[j][0] == seq[idx - 1][0] for j in range(idx, top)
                    )
                    if reused:
                        ok = False
                        break
                if not ok:
                    continue
                if tuple(seq[idx - 1][1] for idx in combo) in s.interp[name]:
                    tuples[name].add(tuple(ids[idx - 1] for idx in combo))

    def extend(seq: tuple[tuple[int, str], ...]) -> None:
        if seq:
            add_chain(seq)
        if len(seq) < n:
            for step in alphabet:
                extend(seq + (step,))

    extend(())
    forest = ForestObject(
        kind="pebbled",
        signature=s.signature,
        nodes=tuple(nodes),
        parent=parent,
        roots=tuple(roots),
        interp={name: frozenset(ts) for name, ts in tuples.items()},
        origin=origin,
        pebble=pebble,
        origin_structure=s,
    )
    return forest, dict(origin)


def _index_tuples(length: int, arity: int):
    if arity == 0:
        yield ()
        return
    for rest in _index_tuples(length, arity - 1):
        for i in range(1, length + 1):
            yield (i,) + rest


@dataclass(frozen=True)
class CounitReport:
    ok: bool
    violations: tuple[str, ...] = ()


def counit_check(x: ForestObject, origin: Structure) -> CounitReport:
    """Verify that the origin map is a homomorphism onto the source structure."""
    violations = []
    for name, rel in x.interp.items():
        for t in sorted(rel):
            image = tuple(x.origin[e] for e in t)
            if image not in origin.interp[name]:
                violations.append(f"{name}{t} maps to {name}{image} which does not hold")
    return CounitReport(ok=not violations, violations=tuple(violations))


def forest_to_dict(x: ForestObject) -> dict:
    """Structure-file form with the added forest block."""
    from .structures import structure_to_dict

    data = structure_to_dict(
        Structure(x.signature, x.nodes, dict(x.interp)),
        x.roots[0] if len(x.roots) == 1 else None,
    )
    block: dict = {
        "parent": {c: p for c, p in sorted(x.parent.items())},
        "roots": list(x.roots),
    }
    if x.pebble:
        block["pebble"] = {n: x.pebble[n] for n in sorted(x.pebble)}
        # pebbled path comparisons need placement identity, which node names
        # alone do not carry
        block["origin"] = {n: x.origin[n] for n in sorted(x.origin)}
    data["forest"] = block
    return data


def forest_from_dict(data: dict) -> ForestObject:
    from .structures import structure_from_dict

    s, point, block = structure_from_dict(data)
    if block is None:
        raise ValueError("missing forest block")
    parent = {str(c): str(p) for c, p in block["parent"].items()}
    roots = tuple(str(r) for r in block["roots"])
    pebble = {str(n): int(v) for n, v in block.get("pebble", {}).items()}
    origin = {str(n): str(e) for n, e in block.get("origin", {}).items()}
    kind = "pebbled" if pebble else "modal"
    valuation: dict[str, frozenset[str]] = {}
    action_in: dict[str, str] = {}
    if kind == "modal":
        for node in s.universe:
            valuation[node] = s.valuation(node)
        for act in s.signature.actions:
            for (a, b) in s.interp[act]:
                action_in[b] = act
    return ForestObject(
        kind=kind,
        signature=s.signature,
        nodes=s.universe,
        parent=parent,
        roots=roots,
        interp=dict(s.interp),
        origin=origin or {n: n for n in s.universe},
        valuation=valuation,
        action_in=action_in,
        pebble=pebble,
        origin_structure=s,
    )
