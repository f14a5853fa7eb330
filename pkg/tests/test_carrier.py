"""Carrier grammar, canonical enumeration, and arrow typechecking."""

import random

import pytest

from polyspan import (
    ArrowTypeError,
    CarrierMismatchError,
    CarrierSyntaxError,
    Element,
    GraphContext,
    InputError,
    SizeCapError,
    build_arrow,
    element_at,
    eval_arrow,
    parse_carrier,
    preimage,
    rank,
    size,
)


class TestGraphContext:
    def test_sparse_basics(self, g1):
        assert g1.n == 3
        assert g1.m == 3
        assert g1.source(1) == 0 and g1.target(1) == 2 and g1.weight(1) == 7
        assert not g1.full

    def test_rejects_bad_endpoint(self):
        with pytest.raises(InputError):
            GraphContext(2, ((0, 5, 1),))

    def test_full_mode_edges(self):
        g = GraphContext.fully_connected(2, {(0, 1): 4})
        assert g.full
        assert g.m == 4
        # Edge k connects k//n -> k%n, so the edge set is exactly V^2.
        assert [(g.source(k), g.target(k)) for k in range(4)] == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert g.weight(1) == 4
        assert g.weight(0) == 0  # diagonal defaults to no-cost
        assert g.weight(2) is None

    def test_full_mode_rejects_scrambled_edges(self):
        with pytest.raises(InputError):
            GraphContext(2, ((0, 0, 0), (1, 0, None), (0, 1, None), (1, 1, 0)), full=True)


class TestParse:
    @pytest.mark.parametrize("text,terms", [
        ("V", (("V",),)),
        ("E", (("E",),)),
        ("1", ((),)),
        ("V + E", (("V",), ("E",))),
        ("V*E", (("V", "E"),)),
        ("V^3", (("V", "V", "V"),)),
        ("1 + V + V^2", ((), ("V",), ("V", "V"))),
        ("(V + E) + (V + E)", (("V",), ("E",), ("V",), ("E",))),
    ])
    def test_shapes(self, text, terms):
        assert parse_carrier(text).terms == terms

    def test_product_distributes_over_sum(self):
        # (V + E) * V flattens to V*V + E*V.
        assert parse_carrier("(V + E) * V").terms == (("V", "V"), ("E", "V"))

    def test_one_is_identity_for_product(self):
        assert parse_carrier("1 * V").terms == (("V",),)
        assert parse_carrier("V * 1 * V").terms == (("V", "V"),)

    def test_text_roundtrip(self):
        for text in ("V", "E", "1", "V + E", "V^2", "V*E", "1 + V + V^2"):
            c = parse_carrier(text)
            assert parse_carrier(c.text()) == c

    @pytest.mark.parametrize("bad", ["", "V +", "V ^", "V^0", "W", "(V", "V)", "V ** E", "+ V"])
    def test_syntax_errors(self, bad):
        with pytest.raises(CarrierSyntaxError):
            parse_carrier(bad)

    def test_error_carries_position(self):
        with pytest.raises(CarrierSyntaxError) as info:
            parse_carrier("V + W")
        assert info.value.position == 4
        assert "position 4" in str(info.value)


class TestEnumeration:
    def test_frozen_square(self):
        g = GraphContext(3, ())
        c = parse_carrier("V^2")
        assert size(c, g) == 9
        assert element_at(c, g, 5) == Element(0, (1, 2))
        assert rank(c, g, Element(0, (1, 2))) == 5

    def test_frozen_sum(self, g1):
        c = parse_carrier("V + E")
        assert size(c, g1) == 6
        assert element_at(c, g1, 2) == Element(0, (2,))
        assert element_at(c, g1, 3) == Element(1, (0,))

    def test_unit_term(self, g1):
        c = parse_carrier("1 + V")
        assert size(c, g1) == 4
        assert element_at(c, g1, 0) == Element(0, ())
        assert element_at(c, g1, 1) == Element(1, (0,))

    def test_last_factor_fastest(self, g1):
        c = parse_carrier("V*E")
        assert element_at(c, g1, 0) == Element(0, (0, 0))
        assert element_at(c, g1, 1) == Element(0, (0, 1))
        assert element_at(c, g1, 3) == Element(0, (1, 0))

    @pytest.mark.parametrize("text", [
        "V", "E", "1", "V+E", "V^2", "V^3", "V*E", "1+V+V^2", "(V+E)+(V+E)", "E+(E+E)+E",
    ])
    def test_rank_roundtrip(self, text):
        r = random.Random(7)
        c = parse_carrier(text)
        for _ in range(6):
            n = r.randrange(1, 8)
            edges = tuple(
                (r.randrange(n), r.randrange(n), r.randrange(9))
                for _ in range(r.randrange(0, 10))
            )
            g = GraphContext(n, edges)
            total = size(c, g)
            assert total <= 10_000
            for i in range(total):
                assert rank(c, g, element_at(c, g, i)) == i

    def test_rank_rejects_foreign_element(self, g1):
        c = parse_carrier("V")
        with pytest.raises(CarrierMismatchError):
            rank(c, g1, Element(1, (0,)))
        with pytest.raises(CarrierMismatchError):
            rank(c, g1, Element(0, (3,)))

    def test_size_cap(self):
        g = GraphContext(500, ())
        with pytest.raises(SizeCapError):
            size(parse_carrier("V^4"), g)


V = parse_carrier("V")
E = parse_carrier("E")
VE = parse_carrier("V + E")
VV = parse_carrier("V^2")


class TestArrows:
    def test_id(self, g1):
        a = build_arrow("id", V, V, g1)
        assert eval_arrow(a, Element(0, (2,)), g1) == Element(0, (2,))

    def test_bang(self, g1):
        one = parse_carrier("1")
        a = build_arrow("bang", V, one, g1)
        assert eval_arrow(a, Element(0, (1,)), g1) == Element(0, ())

    def test_src_tgt(self, g1):
        s = build_arrow("src", E, V, g1)
        t = build_arrow("tgt", E, V, g1)
        assert eval_arrow(s, Element(0, (1,)), g1) == Element(0, (0,))
        assert eval_arrow(t, Element(0, (1,)), g1) == Element(0, (2,))

    def test_full_mode_src_tgt(self):
        g = GraphContext.fully_connected(3)
        t = build_arrow("tgt", E, V, g)
        assert eval_arrow(t, Element(0, (5,)), g) == Element(0, (2,))

    def test_proj(self, g1):
        a = build_arrow("proj[2]", VV, V, g1)
        assert eval_arrow(a, Element(0, (1, 2)), g1) == Element(0, (2,))
        vvv = parse_carrier("V^3")
        b = build_arrow("proj[1,3]", vvv, VV, g1)
        assert eval_arrow(b, Element(0, (0, 1, 2)), g1) == Element(0, (0, 2))

    def test_inj(self, g1):
        a = build_arrow("inj[2]", E, VE, g1)
        assert eval_arrow(a, Element(0, (1,)), g1) == Element(1, (1,))

    def test_copair_frozen(self, g1):
        a = build_arrow("[id; src]", VE, V, g1)
        assert eval_arrow(a, Element(0, (1,)), g1) == Element(0, (1,))
        # Edge 2 runs 1 -> 2, so the second branch lands on node 1.
        assert eval_arrow(a, Element(1, (2,)), g1) == Element(0, (1,))

    def test_composition_right_to_left(self, g1):
        a = build_arrow("inj[1].src", E, VE, g1)
        assert eval_arrow(a, Element(0, (2,)), g1) == Element(0, (1,))

    def test_preimage_frozen_and_sorted(self, g1):
        t = build_arrow("tgt", E, V, g1)
        pre = preimage(t, Element(0, (2,)), g1)
        assert pre == [Element(0, (1,)), Element(0, (2,))]
        assert preimage(t, Element(0, (0,)), g1) == []

    def test_preimage_of_copair(self, g1):
        a = build_arrow("[id; tgt]", VE, V, g1)
        pre = preimage(a, Element(0, (2,)), g1)
        assert pre == [Element(0, (2,)), Element(1, (1,)), Element(1, (2,))]


class TestArrowErrors:
    def test_proj_needs_product(self, g1):
        with pytest.raises(ArrowTypeError):
            build_arrow("proj[1]", VE, V, g1)

    def test_proj_index_range(self, g1):
        with pytest.raises(ArrowTypeError):
            build_arrow("proj[3]", VV, V, g1)

    def test_inj_range(self, g1):
        with pytest.raises(ArrowTypeError):
            build_arrow("inj[3]", E, VE, g1)

    def test_inj_term_mismatch(self, g1):
        with pytest.raises(ArrowTypeError):
            build_arrow("inj[1]", E, VE, g1)

    def test_copair_branch_count(self, g1):
        with pytest.raises(ArrowTypeError) as info:
            build_arrow("[id; src; tgt]", VE, V, g1)
        assert "3 branch(es)" in str(info.value)

    def test_copair_on_single_term_domain(self, g1):
        with pytest.raises(ArrowTypeError):
            build_arrow("[proj[2]; id]", VV, parse_carrier("V + V^2"), g1)

    def test_inj_must_be_outermost(self, g1):
        # src.inj[1] would need the injection's codomain mid-chain.
        with pytest.raises(ArrowTypeError):
            build_arrow("src.inj[1]", E, V, g1)

    def test_wrong_codomain_reported(self, g1):
        with pytest.raises(ArrowTypeError):
            build_arrow("src", E, E, g1)

    def test_label_in_message(self, g1):
        with pytest.raises(ArrowTypeError) as info:
            build_arrow("src", E, E, g1, label="o")
        assert "o" in str(info.value)

    def test_arrow_syntax_error(self, g1):
        with pytest.raises(CarrierSyntaxError):
            build_arrow("id.", V, V, g1)

    def test_eval_rejects_foreign_element(self, g1):
        a = build_arrow("id", V, V, g1)
        with pytest.raises(CarrierMismatchError):
            eval_arrow(a, Element(0, (9,)), g1)
