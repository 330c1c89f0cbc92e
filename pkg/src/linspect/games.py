"""Fixpoint solvers for the back-and-forth game on forest objects, depth-bounded
bisimulation, the all-in-one two-sided pebble game, and the round-bounded
spoiler/duplicator game for first-order equivalence.

All solvers are deterministic: move enumeration follows universe order, and
verdicts come with machine-checkable witnesses (a response table for the
surviving player, or a winning attack for the other).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

from .structures import PointedStructure, SignatureMismatch, Structure
from .unravel import ForestObject


Variant = Literal["full", "existential", "existential_positive"]

DUPLICATOR = "Duplicator"
SPOILER = "Spoiler"


@dataclass(frozen=True)
class PathHandle:
    """A path of a forest object: the down-set of ``node`` (None = empty path)."""

    owner: ForestObject
    node: Optional[str]

    def chain(self) -> tuple[str, ...]:
        if self.node is None:
            return ()
        return self.owner.path_to_root(self.node)


@dataclass(frozen=True)
class Position:
    """A game position: a path on each board."""

    left: PathHandle
    right: PathHandle


@dataclass(frozen=True)
class GameResult:
    winner: str
    witness: Optional[object] = None

    @property
    def duplicator_wins(self) -> bool:
        return self.winner == DUPLICATOR


class CategoryMismatch(ValueError):
    pass


# --- path comparisons --------------------------------------------------------


def _modal_labels(f: ForestObject, chain: tuple[str, ...]):
    return [(f.action_in.get(n), tuple(sorted(f.valuation[n]))) for n in chain]


def _last_placements(
    x: ForestObject, cx: tuple[str, ...], i: int
) -> dict[int, int]:
    """Pebble -> index of its last placement within the first i positions."""
    out: dict[int, int] = {}
    for j in range(i):
        out[x.pebble[cx[j]]] = j
    return out


def _pairs_partial_iso(
    pairs: list[tuple[str, str]],
    left: Structure,
    right: Structure,
    reflect: bool,
) -> bool:
    """Functional + injective + relation preservation (and reflection when
    ``reflect``) over the listed (left, right) element pairs."""
    fwd: dict[str, str] = {}
    bwd: dict[str, str] = {}
    for a, b in pairs:
        if fwd.setdefault(a, b) != b:
            return False
        if reflect and bwd.setdefault(b, a) != a:
            return False
    dom = sorted(fwd)
    for name, arity in left.signature.relations:
        for combo in _tuples_over(dom, arity):
            holds_l = combo in left.interp[name]
            holds_r = tuple(fwd[e] for e in combo) in right.interp[name]
            if holds_l and not holds_r:
                return False
            if reflect and holds_r and not holds_l:
                return False
    return True


def _tuples_over(elements: list, arity: int):
    if arity == 0:
        yield ()
        return
    for rest in _tuples_over(elements, arity - 1):
        for e in elements:
            yield (e,) + rest


def _pebbled_compatible(
    x: ForestObject,
    cx: tuple[str, ...],
    y: ForestObject,
    cy: tuple[str, ...],
    reflect: bool,
    prefix_checked: int = 0,
) -> bool:
    """Equal pebble sequences, and at every index the pairing of last
    placements is a partial isomorphism.

    Identity of placed elements comes from the origin labels; the relational
    part is read off the forests' own interpretations, which is sound because
    a tuple of last placements never reuses a pebble before the tuple's
    maximal index, exactly the freshness condition under which a forest tuple
    matches the source.
    """
    if len(cx) != len(cy):
        return False
    if any(x.pebble[cx[j]] != y.pebble[cy[j]] for j in range(len(cx))):
        return False
    for i in range(prefix_checked + 1, len(cx) + 1):
        last = list(_last_placements(x, cx, i).values())
        fwd: dict[str, str] = {}
        bwd: dict[str, str] = {}
        for j in last:
            a, b = x.origin[cx[j]], y.origin[cy[j]]
            if fwd.setdefault(a, b) != b:
                return False
            if reflect and bwd.setdefault(b, a) != a:
                return False
        for name, arity in x.signature.relations:
            for combo in _tuples_over(last, arity):
                holds_l = tuple(cx[j] for j in combo) in x.interp[name]
                holds_r = tuple(cy[j] for j in combo) in y.interp[name]
                if holds_l and not holds_r:
                    return False
                if reflect and holds_r and not holds_l:
                    return False
    return True


def path_iso(a: PathHandle, b: PathHandle) -> bool:
    """Are the two paths isomorphic?

    Modal case: equal root-to-node label sequences (valuation, incoming
    action).  Pebbled case: equal pebble sequences and, at every index, the
    induced pairing of last placements is a partial isomorphism between the
    origin structures.
    """
    if a.owner.kind != b.owner.kind:
        raise CategoryMismatch(f"cannot compare {a.owner.kind} with {b.owner.kind}")
    ca, cb = a.chain(), b.chain()
    if a.owner.kind == "modal":
        return _modal_labels(a.owner, ca) == _modal_labels(b.owner, cb)
    return _pebbled_compatible(a.owner, ca, b.owner, cb, True)


def path_hom_compatible(a: PathHandle, b: PathHandle) -> bool:
    """Is there a label-componentwise morphism from a's path to b's path?"""
    if a.owner.kind != b.owner.kind:
        raise CategoryMismatch(f"cannot compare {a.owner.kind} with {b.owner.kind}")
    ca, cb = a.chain(), b.chain()
    if a.owner.kind == "modal":
        la, lb = _modal_labels(a.owner, ca), _modal_labels(b.owner, cb)
        return len(la) == len(lb) and all(
            xa == xb and set(va) <= set(vb) for (xa, va), (xb, vb) in zip(la, lb)
        )
    return _pebbled_compatible(a.owner, ca, b.owner, cb, False)


# --- the back-and-forth game ---------------------------------------------------


def solve_back_and_forth(
    x: ForestObject, y: ForestObject, variant: Variant = "full"
) -> GameResult:
    """Solve the safety game on path pairs by memoized backward induction.

    Positions are pairs of paths; the initial position is the pair of roots
    (the empty paths for pebbled forests).  Spoiler extends a path by one
    covering step; Duplicator must answer on the other side and keep the pair
    inside the winning condition (path isomorphism, or a componentwise
    morphism for the existential-positive variant).
    """
    if x.kind != y.kind:
        raise CategoryMismatch(f"cannot play {x.kind} against {y.kind}")
    modal = x.kind == "modal"
    reflect = variant != "existential_positive"
    if modal:
        if len(x.roots) != 1 or len(y.roots) != 1:
            raise ValueError("modal game needs single-rooted forests")
        bottom = (x.roots[0], y.roots[0])
    else:
        bottom = (None, None)

    def covers(forest: ForestObject, node: Optional[str]) -> tuple[str, ...]:
        if node is None:
            return forest.roots
        return forest.children(node)

    def step_ok(u: Optional[str], v: Optional[str]) -> bool:
        """Winning-condition increment for the freshly extended pair."""
        if modal:
            if reflect:
                vals_ok = x.valuation[u] == y.valuation[v]
            else:
                vals_ok = x.valuation[u] <= y.valuation[v]
            return vals_ok and x.action_in.get(u) == y.action_in.get(v)
        cu = x.path_to_root(u) if u is not None else ()
        cv = y.path_to_root(v) if v is not None else ()
        return _pebbled_compatible(
            x, cu, y, cv, reflect, prefix_checked=max(len(cu) - 1, 0)
        )

    duplicator_table: dict[tuple, tuple] = {}
    spoiler_table: dict[tuple, tuple] = {}
    memo: dict[tuple, bool] = {}

    def win(u: Optional[str], v: Optional[str]) -> bool:
        key = (u, v)
        if key in memo:
            return memo[key]
        result = True
        for u2 in covers(x, u):
            ok = next(
                (v2 for v2 in covers(y, v) if step_ok(u2, v2) and win(u2, v2)), None
            )
            if ok is None:
                result = False
                spoiler_table[key] = ("left", u2)
                break
            duplicator_table[(key, ("left", u2))] = ("right", ok)
        if result and variant == "full":
            for v2 in covers(y, v):
                ok = next(
                    (u2 for u2 in covers(x, u) if step_ok(u2, v2) and win(u2, v2)), None
                )
                if ok is None:
                    result = False
                    spoiler_table[key] = ("right", v2)
                    break
                duplicator_table[(key, ("right", v2))] = ("left", ok)
        memo[key] = result
        return result

    if modal and not step_ok(*bottom):
        return GameResult(SPOILER, {"initial": "root labels differ"})
    if win(*bottom):
        reachable = _reachable_strategy(bottom, covers, x, y, duplicator_table, variant)
        return GameResult(DUPLICATOR, reachable)
    return GameResult(SPOILER, dict(spoiler_table))


def _reachable_strategy(bottom, covers, x, y, table, variant):
    """Restrict the response table to positions reachable under the strategy."""
    out = {}
    stack = [bottom]
    seen = {bottom}
    while stack:
        u, v = stack.pop()
        moves = [("left", u2) for u2 in covers(x, u)]
        if variant == "full":
            moves += [("right", v2) for v2 in covers(y, v)]
        for move in moves:
            resp = table.get(((u, v), move))
            if resp is None:
                continue
            out[((u, v), move)] = resp
            nxt = (move[1], resp[1]) if move[0] == "left" else (resp[1], move[1])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return out


def replay_duplicator(
    x: ForestObject, y: ForestObject, variant: Variant, table: dict
) -> bool:
    """Check a Duplicator table: every Spoiler move from every reachable
    position has a response that stays inside the winning condition."""
    modal = x.kind == "modal"
    reflect = variant != "existential_positive"
    bottom = (x.roots[0], y.roots[0]) if modal else (None, None)

    def extensions(forest: ForestObject, node: Optional[str]) -> tuple[str, ...]:
        return forest.children(node) if node is not None else forest.roots

    def ok_pair(u, v) -> bool:
        hu, hv = PathHandle(x, u), PathHandle(y, v)
        return path_iso(hu, hv) if reflect else path_hom_compatible(hu, hv)

    if not ok_pair(*bottom):
        return False
    stack, seen = [bottom], {bottom}
    while stack:
        u, v = stack.pop()
        moves = [("left", u2) for u2 in extensions(x, u)]
        if variant == "full":
            moves += [("right", v2) for v2 in extensions(y, v)]
        for move in moves:
            if ((u, v), move) not in table:
                return False
            _, resp = table[((u, v), move)]
            nxt = (move[1], resp) if move[0] == "left" else (resp, move[1])
            if not ok_pair(*nxt):
                return False
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return True


# --- depth-bounded bisimulation -------------------------------------------------


def solve_bisim(a: PointedStructure, b: PointedStructure, k: int) -> GameResult:
    """Depth-k bisimulation by backward induction on state pairs."""
    if a.signature != b.signature:
        raise SignatureMismatch("bisimulation requires matching signatures")
    memo: dict[tuple[str, str, int], bool] = {}
    spoiler_line: dict[tuple[str, str, int], tuple] = {}

    def win(x: str, y: str, depth: int) -> bool:
        key = (x, y, depth)
        if key in memo:
            return memo[key]
        result = a.base.valuation(x) == b.base.valuation(y)
        if not result:
            spoiler_line[key] = ("labels", x, y)
        if result and depth > 0:
            for act in a.signature.actions:
                for x2 in a.base.successors(x, act):
                    if not any(
                        win(x2, y2, depth - 1) for y2 in b.base.successors(y, act)
                    ):
                        result = False
                        spoiler_line[key] = ("left", act, x2)
                        break
                if not result:
                    break
                for y2 in b.base.successors(y, act):
                    if not any(
                        win(x2, y2, depth - 1) for x2 in a.base.successors(x, act)
                    ):
                        result = False
                        spoiler_line[key] = ("right", act, y2)
                        break
                if not result:
                    break
        memo[key] = result
        return result

    if win(a.point, b.point, k):
        winning = frozenset(key for key, value in memo.items() if value)
        return GameResult(DUPLICATOR, winning)
    return GameResult(SPOILER, dict(spoiler_line))


# --- all-in-one two-sided pebble game -------------------------------------------


def solve_ppeb(a: Structure, b: Structure, k: int, n: int) -> GameResult:
    """Duplicator's winning strategy in the two-sided all-in-one k-pebble game,
    with Spoiler's placement sequences bounded by length n.

    The winning condition is prefix-closed, so the one-shot exchange is decided
    by backward induction over placement prefixes; the memo key is the current
    pebble-to-pair assignment.
    """
    if a.signature != b.signature:
        raise SignatureMismatch("the pebble game requires matching signatures")
    if k < 1:
        raise ValueError("k must be >= 1")

    duplicator_table: dict[tuple, str] = {}
    spoiler_table: dict[tuple, tuple] = {}
    memo: dict[tuple, bool] = {}

    def gamma_key(gamma: dict[int, tuple[str, str]]) -> tuple:
        return tuple(sorted(gamma.items()))

    def win(gamma: dict[int, tuple[str, str]], remaining: int) -> bool:
        key = (gamma_key(gamma), remaining)
        if key in memo:
            return memo[key]
        result = True
        if remaining > 0:
            for side, source, target in (("A", a, b), ("B", b, a)):
                for p in range(1, k + 1):
                    for xelt in source.universe:
                        answered = None
                        for yelt in target.universe:
                            pair = (xelt, yelt) if side == "A" else (yelt, xelt)
                            g2 = dict(gamma)
                            g2[p] = pair
                            if _pairs_partial_iso(list(g2.values()), a, b, True) and win(
                                g2, remaining - 1
                            ):
                                answered = yelt
                                break
                        if answered is None:
                            result = False
                            spoiler_table[key] = (side, p, xelt)
                            break
                        duplicator_table[(key, (side, p, xelt))] = answered
                    if not result:
                        break
                if not result:
                    break
        memo[key] = result
        return result

    if win({}, n):
        return GameResult(DUPLICATOR, dict(duplicator_table))
    return GameResult(SPOILER, dict(spoiler_table))


# --- rounds-bounded first-order game --------------------------------------------


def solve_ef(
    a: Structure,
    b: Structure,
    r: int,
    tuple_a: tuple[str, ...] = (),
    tuple_b: tuple[str, ...] = (),
) -> GameResult:
    """The classic r-round element game: Duplicator wins at 0 rounds iff the
    current pairing is a partial isomorphism, and at r+1 iff every element
    choice on either side has a response winning r rounds."""
    if a.signature != b.signature:
        raise SignatureMismatch("the element game requires matching signatures")
    if len(tuple_a) != len(tuple_b):
        raise ValueError("distinguished tuples must have equal length")

    memo: dict[tuple, bool] = {}

    def win(pairs: frozenset[tuple[str, str]], rounds: int) -> bool:
        key = (pairs, rounds)
        if key in memo:
            return memo[key]
        result = _pairs_partial_iso(sorted(pairs), a, b, True)
        if result and rounds > 0:
            for x in a.universe:
                if not any(win(pairs | {(x, y)}, rounds - 1) for y in b.universe):
                    result = False
                    break
            if result:
                for y in b.universe:
                    if not any(win(pairs | {(x, y)}, rounds - 1) for x in a.universe):
                        result = False
                        break
        memo[key] = result
        return result

    start = frozenset(zip(tuple_a, tuple_b))
    winner = DUPLICATOR if win(start, r) else SPOILER
    return GameResult(winner)


def witness_records(result: GameResult) -> list[tuple]:
    """Flatten a strategy witness into sorted (position, response) records,
    naming nodes by their forest ids."""
    if not isinstance(result.witness, dict):
        return []
    return sorted((repr(k), repr(v)) for k, v in result.witness.items())


def replay_spoiler(
    x: ForestObject, y: ForestObject, variant: Variant, table: dict
) -> bool:
    """Check a Spoiler table: following its moves, every Duplicator response
    chain eventually leaves the winning condition or strands Duplicator."""
    modal = x.kind == "modal"
    reflect = variant != "existential_positive"
    bottom = (x.roots[0], y.roots[0]) if modal else (None, None)

    def extensions(forest: ForestObject, node) -> tuple[str, ...]:
        return forest.children(node) if node is not None else forest.roots

    def ok_pair(u, v) -> bool:
        hu, hv = PathHandle(x, u), PathHandle(y, v)
        return path_iso(hu, hv) if reflect else path_hom_compatible(hu, hv)

    def defeated(u, v) -> bool:
        if not ok_pair(u, v):
            return True
        if (u, v) not in table:
            return False
        side, move = table[(u, v)]
        if side == "left":
            responses = extensions(y, v)
            return all(defeated(move, v2) for v2 in responses)
        responses = extensions(x, u)
        return all(defeated(u2, move) for u2 in responses)

    if isinstance(table, dict) and table.get("initial") is not None:
        return not ok_pair(*bottom)
    return defeated(*bottom)


def replay_ppeb_duplicator(
    a: Structure, b: Structure, k: int, n: int, table: dict
) -> bool:
    """Check a pebble-game response table: every placement sequence answered
    move by move keeps the pairing a partial isomorphism."""

    def gamma_key(gamma: dict[int, tuple[str, str]]) -> tuple:
        return tuple(sorted(gamma.items()))

    def walk(gamma: dict[int, tuple[str, str]], remaining: int) -> bool:
        if remaining == 0:
            return True
        key = (gamma_key(gamma), remaining)
        for side, source in (("A", a), ("B", b)):
            for p in range(1, k + 1):
                for xelt in source.universe:
                    move = (side, p, xelt)
                    if (key, move) not in table:
                        return False
                    yelt = table[(key, move)]
                    pair = (xelt, yelt) if side == "A" else (yelt, xelt)
                    g2 = dict(gamma)
                    g2[p] = pair
                    if not _pairs_partial_iso(list(g2.values()), a, b, True):
                        return False
                    if not walk(g2, remaining - 1):
                        return False
        return True

    return walk({}, n)
