import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linspect.fixtures import chain2, chain3, fix1, fix2, fix4
from linspect.games import (
    CategoryMismatch,
    DUPLICATOR,
    SPOILER,
    PathHandle,
    path_hom_compatible,
    path_iso,
    replay_duplicator,
    solve_back_and_forth,
    solve_bisim,
    solve_ef,
    solve_ppeb,
)
from linspect.structures import Signature, Structure
from linspect.unravel import ml_unravel, pr_unravel, tree_unravel

from conftest import pointed_pairs, plain_structures


def cycle(n: int) -> Structure:
    sig = Signature((("R", 2),))
    edges = {(f"v{i}", f"v{(i + 1) % n}") for i in range(n)}
    return Structure(sig, tuple(f"v{i}" for i in range(n)), {"R": frozenset(edges)})


class TestPathIso:
    def test_reflexive(self):
        forest, _ = ml_unravel(fix2(), 2)
        for node in forest.nodes:
            h = PathHandle(forest, node)
            assert path_iso(h, h)

    def test_modal_valuation_difference(self):
        from linspect.fixtures import fix5
        from linspect.structures import PointedStructure

        rich = fix5()
        poor = PointedStructure(
            Structure(rich.signature, ("u0", "u1"), {"a": frozenset({("u0", "u1")})}),
            "u0",
        )
        fr, _ = ml_unravel(rich, 1)
        fp, _ = ml_unravel(poor, 1)
        leaf_r = next(n for n in fr.nodes if fr.is_leaf(n))
        leaf_p = next(n for n in fp.nodes if fp.is_leaf(n))
        assert not path_iso(PathHandle(fr, leaf_r), PathHandle(fp, leaf_p))
        assert path_hom_compatible(PathHandle(fp, leaf_p), PathHandle(fr, leaf_r))

    def test_category_mismatch(self):
        modal, _ = ml_unravel(fix4(), 1)
        pebbled, _ = pr_unravel(chain2(), 1, 1)
        with pytest.raises(CategoryMismatch):
            path_iso(PathHandle(modal, modal.nodes[0]), PathHandle(pebbled, pebbled.nodes[0]))

    def test_pebbled_gamma_break(self):
        # a self-loop walk against a 2-cycle walk: the pairing breaks as soon
        # as the loop element must match two distinct cycle elements
        loop1 = Structure(Signature((("R", 2),)), ("x",), {"R": frozenset({("x", "x")})})
        two = cycle(2)
        fl, _ = pr_unravel(loop1, 2, 3)
        fc, _ = pr_unravel(two, 2, 3)

        def node_for(forest, seq):
            body = "".join(f"({p}:{e})" for p, e in seq)
            return f"{body}|{len(seq)}"

        sl = node_for(fl, [(1, "x"), (2, "x"), (1, "x")])
        tl = node_for(fc, [(1, "v0"), (2, "v1"), (1, "v0")])
        assert not path_iso(PathHandle(fl, sl), PathHandle(fc, tl))

    def test_pebbled_walks_on_cycles(self):
        # walking a 2-cycle against a 3-cycle: fine after one placement, but
        # the wrap-around edge of the 2-cycle breaks the pairing at step two
        f2, _ = pr_unravel(cycle(2), 2, 3)
        f3, _ = pr_unravel(cycle(3), 2, 3)

        def node_for(seq):
            body = "".join(f"({p}:{e})" for p, e in seq)
            return f"{body}|{len(seq)}"

        s = node_for([(1, "v0"), (2, "v1"), (1, "v0")])
        t = node_for([(1, "v0"), (2, "v1"), (1, "v2")])
        assert not path_iso(PathHandle(f2, s), PathHandle(f3, t))
        one_s = f2.parent[f2.parent[s]]
        one_t = f3.parent[f3.parent[t]]
        assert path_iso(PathHandle(f2, one_s), PathHandle(f3, one_t))


class TestBackAndForth:
    def test_copycat(self):
        forest, _ = ml_unravel(fix2(), 2)
        res = solve_back_and_forth(forest, forest, "full")
        assert res.winner == DUPLICATOR
        assert replay_duplicator(forest, forest, "full", res.witness)

    def test_ml_fix1_fix2_duplicator(self):
        x, _ = ml_unravel(fix1(), 3)
        y, _ = ml_unravel(fix2(), 3)
        res = solve_back_and_forth(x, y, "full")
        assert res.winner == DUPLICATOR
        assert replay_duplicator(x, y, "full", res.witness)

    def test_tree_fix1_fix2_spoiler(self):
        x = tree_unravel(fix1(), 2)
        y = tree_unravel(fix2(), 2)
        assert solve_back_and_forth(x, y, "full").winner == SPOILER

    def test_root_label_mismatch(self):
        from linspect.fixtures import fix5
        from linspect.structures import PointedStructure

        rich, _ = ml_unravel(fix5(), 1)
        poor, _ = ml_unravel(
            PointedStructure(
                Structure(fix5().signature, ("u",), {}), "u"
            ),
            1,
        )
        res = solve_back_and_forth(rich, poor, "full")
        assert res.winner == SPOILER

    @given(pointed_pairs(max_size=3), st.integers(min_value=0, max_value=2))
    @settings(max_examples=40, deadline=None)
    def test_variant_ladder(self, pair, k):
        a, b = pair
        x, _ = ml_unravel(a, k)
        y, _ = ml_unravel(b, k)
        full = solve_back_and_forth(x, y, "full").duplicator_wins
        exist = solve_back_and_forth(x, y, "existential").duplicator_wins
        expos = solve_back_and_forth(x, y, "existential_positive").duplicator_wins
        if full:
            assert exist
        if exist:
            assert expos

    @given(pointed_pairs(max_size=3), st.integers(min_value=0, max_value=2))
    @settings(max_examples=40, deadline=None)
    def test_duplicator_tables_replay(self, pair, k):
        a, b = pair
        x, _ = ml_unravel(a, k)
        y, _ = ml_unravel(b, k)
        for variant in ("full", "existential", "existential_positive"):
            res = solve_back_and_forth(x, y, variant)
            if res.duplicator_wins:
                assert replay_duplicator(x, y, variant, res.witness)


class TestBisim:
    def test_reflexive(self):
        assert solve_bisim(fix1(), fix1(), 3).winner == DUPLICATOR

    def test_fix1_fix2_depth_two(self):
        assert solve_bisim(fix1(), fix2(), 2).winner == SPOILER

    def test_fix1_fix2_depth_one(self):
        assert solve_bisim(fix1(), fix2(), 1).winner == DUPLICATOR

    @given(pointed_pairs(max_size=3), st.integers(min_value=0, max_value=3))
    @settings(max_examples=50, deadline=None)
    def test_agrees_with_tree_game(self, pair, k):
        a, b = pair
        direct = solve_bisim(a, b, k).duplicator_wins
        game = solve_back_and_forth(
            tree_unravel(a, k), tree_unravel(b, k), "full"
        ).duplicator_wins
        assert direct == game

    def test_duplicator_witness_is_closed(self):
        a, b, k = fix1(), fix2(), 1
        res = solve_bisim(a, b, k)
        winning = res.witness
        assert (a.point, b.point, k) in winning
        for (x, y, d) in winning:
            assert a.base.valuation(x) == b.base.valuation(y)
            if d > 0:
                for act in a.signature.actions:
                    for x2 in a.base.successors(x, act):
                        assert any(
                            (x2, y2, d - 1) in winning
                            for y2 in b.base.successors(y, act)
                        )
                    for y2 in b.base.successors(y, act):
                        assert any(
                            (x2, y2, d - 1) in winning
                            for x2 in a.base.successors(x, act)
                        )


class TestPpeb:
    def test_copycat(self):
        s = chain3()
        assert solve_ppeb(s, s, 2, 3).winner == DUPLICATOR

    def test_edge_versus_edgeless(self):
        edge = chain2()
        bare = Structure(edge.signature, ("m0", "m1"), {})
        assert solve_ppeb(edge, bare, 2, 2).winner == SPOILER

    def test_triangle_versus_square(self):
        # every distinct pair in a 3-cycle is adjacent one way or the other,
        # so two pebbles on a non-adjacent 4-cycle pair defeat it immediately
        assert solve_ppeb(cycle(3), cycle(4), 2, 2).winner == SPOILER

    def test_larger_cycles_survive_two_pebbles(self):
        assert solve_ppeb(cycle(4), cycle(5), 2, 4).winner == DUPLICATOR

    def test_requires_a_pebble(self):
        with pytest.raises(ValueError):
            solve_ppeb(chain2(), chain2(), 0, 1)

    @given(plain_structures(), plain_structures(), st.integers(min_value=1, max_value=3))
    @settings(max_examples=25, deadline=None)
    def test_matches_back_and_forth_on_sequence_forests(self, a, b, n):
        k = 2
        direct = solve_ppeb(a, b, k, n).duplicator_wins
        fa, _ = pr_unravel(a, k, n)
        fb, _ = pr_unravel(b, k, n)
        game = solve_back_and_forth(fa, fb, "full").duplicator_wins
        assert direct == game


class TestEf:
    def test_isomorphic_structures(self):
        assert solve_ef(chain3(), chain3(), 3).winner == DUPLICATOR

    def test_chains_rank_one(self):
        assert solve_ef(chain2(), chain3(), 1).winner == DUPLICATOR

    def test_chains_rank_two(self):
        assert solve_ef(chain2(), chain3(), 2).winner == SPOILER

    def test_tuple_length_mismatch(self):
        with pytest.raises(ValueError):
            solve_ef(chain2(), chain3(), 1, ("n0",), ())

    @given(plain_structures(), plain_structures(), st.integers(min_value=1, max_value=2))
    @settings(max_examples=25, deadline=None)
    def test_monotone_in_rounds(self, a, b, r):
        if solve_ef(a, b, r).duplicator_wins:
            assert solve_ef(a, b, r - 1).duplicator_wins


class TestWitnessSerialization:
    def test_records_are_sorted_pairs(self):
        from linspect.games import witness_records

        x, _ = ml_unravel(fix1(), 2)
        res = solve_back_and_forth(x, x, "full")
        records = witness_records(res)
        assert records == sorted(records)
        assert all(len(r) == 2 for r in records)

    @given(pointed_pairs(max_size=3), st.integers(min_value=0, max_value=2))
    @settings(max_examples=40, deadline=None)
    def test_spoiler_tables_replay(self, pair, k):
        from linspect.games import replay_spoiler

        a, b = pair
        x, _ = ml_unravel(a, k)
        y, _ = ml_unravel(b, k)
        for variant in ("full", "existential"):
            res = solve_back_and_forth(x, y, variant)
            if not res.duplicator_wins:
                assert replay_spoiler(x, y, variant, res.witness)


class TestPpebReplay:
    @given(plain_structures(max_size=2), plain_structures(max_size=2))
    @settings(max_examples=10, deadline=None)
    def test_duplicator_tables_replay(self, a, b):
        from linspect.games import replay_ppeb_duplicator, solve_ppeb

        res = solve_ppeb(a, b, 2, 2)
        if res.duplicator_wins:
            assert replay_ppeb_duplicator(a, b, 2, 2, res.witness)


class TestSerializedPebbledGames:
    def test_round_tripped_forests_play_identically(self):
        from linspect.unravel import forest_from_dict, forest_to_dict, pr_unravel

        sig = Signature((("R", 2),))
        loop1 = Structure(sig, ("x",), {"R": frozenset({("x", "x")})})
        two = cycle(2)
        # the edgeless pair is decided purely by placement identity: dropping
        # origins on deserialization would flip it
        bare1 = Structure(sig, ("x",), {})
        bare2 = Structure(sig, ("u", "v"), {})
        for a, b in ((loop1, two), (two, cycle(3)), (cycle(3), cycle(3)), (bare1, bare2)):
            fa, _ = pr_unravel(a, 2, 3)
            fb, _ = pr_unravel(b, 2, 3)
            direct = solve_back_and_forth(fa, fb, "full").winner
            ra = forest_from_dict(forest_to_dict(fa))
            rb = forest_from_dict(forest_to_dict(fb))
            assert solve_back_and_forth(ra, rb, "full").winner == direct
