"""Core semantics: gates, the inhibition rule, validation, evaluation."""

import random

import pytest

from afdt.errors import InvalidModelError, UnknownLeafError
from afdt.model import (
    BAD_ARITY,
    BAS_IN_DEFENSE_SLOT,
    BDS_OUTSIDE_DEFENSE,
    CYCLE,
    DANGLING_REF,
    DUPLICATE_ID,
    MISSING_TLE,
    UNREACHABLE,
    GateKind,
    LeafKind,
    Model,
    Node,
    and_,
    bas,
    bcf,
    bds,
    evaluate,
    inh,
    leaves,
    or_,
    topological_order,
    validate,
    vot,
)

from conftest import make_random_model


def build(*nodes: Node, tle: str = "TLE") -> Model:
    return Model.from_nodes(nodes, tle)


def inh_model(disabler: bool) -> Model:
    extra = [bcf("X")] if disabler else []
    return build(
        inh("TLE", "E", "D", "X" if disabler else None),
        bas("E"),
        bds("D"),
        *extra,
    )


class TestInhibition:
    def test_undeployed_defense_passes_event_through(self):
        model = inh_model(disabler=False)
        assert evaluate(model, {"E"}) is True
        assert evaluate(model, set()) is False

    def test_deployed_defense_blocks(self):
        model = inh_model(disabler=False)
        assert evaluate(model, {"E", "D"}) is False

    def test_missing_disabler_means_unconditional_block(self):
        # no disabler slot: nothing can re-enable the event
        model = inh_model(disabler=False)
        assert evaluate(model, {"E", "D"}) is False

    def test_disabler_restores_event(self):
        model = inh_model(disabler=True)
        assert evaluate(model, {"E", "D", "X"}) is True
        assert evaluate(model, {"E", "D"}) is False
        assert evaluate(model, {"E", "X"}) is True
        assert evaluate(model, {"D", "X"}) is False

    def test_fig4_defense_columns(self, fig4):
        # first defense blocks the AND branch unless its disabler fails it
        assert evaluate(fig4, {"A1", "C1"}) is True
        assert evaluate(fig4, {"A1", "C1", "D1"}) is False
        assert evaluate(fig4, {"A1", "C1", "C3", "D1"}) is True
        # second defense kills the voting branch outright
        assert evaluate(fig4, {"A1", "A2", "D2"}) is False
        assert evaluate(fig4, {"A1", "A2", "D1"}) is True


class TestGates:
    def test_and_or(self):
        model = build(and_("TLE", ["A", "B"]), bas("A"), bas("B"))
        assert evaluate(model, {"A"}) is False
        assert evaluate(model, {"A", "B"}) is True
        model = build(or_("TLE", ["A", "B"]), bas("A"), bas("B"))
        assert evaluate(model, {"B"}) is True
        assert evaluate(model, set()) is False

    @pytest.mark.parametrize("k,active,expected", [
        (1, {"A"}, True),
        (2, {"A"}, False),
        (2, {"A", "C"}, True),
        (3, {"A", "B"}, False),
        (3, {"A", "B", "C"}, True),
    ])
    def test_vot_threshold(self, k, active, expected):
        model = build(vot("TLE", k, ["A", "B", "C"]), bas("A"), bas("B"), bcf("C"))
        assert evaluate(model, active) is expected

    def test_shared_leaf_feeds_both_branches(self, fig3):
        # A1 alone satisfies neither branch; with C1 the AND fires
        assert evaluate(fig3, {"A1"}) is False
        assert evaluate(fig3, {"A1", "C1"}) is True
        assert evaluate(fig3, {"A1", "C2"}) is True

    def test_unknown_or_non_leaf_ids_rejected(self, fig3):
        with pytest.raises(UnknownLeafError):
            evaluate(fig3, {"nope"})
        with pytest.raises(UnknownLeafError):
            evaluate(fig3, {"G1"})  # gate ids are not assignable


class TestValidate:
    def test_corpus_is_clean(self, fig3, fig4, gsaas):
        for model in (fig3, fig4, gsaas):
            assert validate(model) == []

    def test_cycle(self):
        model = build(or_("TLE", ["X"]), and_("X", ["Y"]), and_("Y", ["X"]))
        codes = {v.code for v in validate(model)}
        assert CYCLE in codes

    def test_duplicate_id(self):
        model = Model.from_nodes([bas("A"), bcf("A"), or_("TLE", ["A"])], "TLE")
        found = [v for v in validate(model) if v.code == DUPLICATE_ID]
        assert [v.node for v in found] == ["A"]

    @pytest.mark.parametrize("nodes", [
        (vot("TLE", 3, ["A", "B"]), bas("A"), bas("B")),
        (vot("TLE", 0, ["A"]), bas("A")),
        (Node("TLE", GateKind.AND),),
        (Node("TLE", LeafKind.BAS, children=("A",)), bas("A")),
        (Node("TLE", GateKind.INH, event="A"), bas("A")),
        (Node("TLE", GateKind.AND, children=("A",), k=2), bas("A")),
    ])
    def test_bad_arity(self, nodes):
        model = build(*nodes)
        assert BAD_ARITY in {v.code for v in validate(model)}

    def test_bds_outside_defense(self):
        model = build(or_("TLE", ["A", "D"]), bas("A"), bds("D"))
        assert BDS_OUTSIDE_DEFENSE in {v.code for v in validate(model)}

    def test_bds_in_disabler_slot(self):
        model = build(
            inh("TLE", "A", "D", "D2"), bas("A"), bds("D"), bds("D2")
        )
        assert BDS_OUTSIDE_DEFENSE in {v.code for v in validate(model)}

    def test_bas_in_defense_slot(self):
        model = build(inh("TLE", "A", "B"), bas("A"), bas("B"))
        assert BAS_IN_DEFENSE_SLOT in {v.code for v in validate(model)}

    def test_vot_gate_in_defense_slot(self):
        model = build(
            inh("TLE", "A", "V"),
            bas("A"),
            vot("V", 1, ["D1", "D2"]),
            bds("D1"),
            bds("D2"),
        )
        assert BAS_IN_DEFENSE_SLOT in {v.code for v in validate(model)}

    def test_inh_gate_in_disabler_slot(self):
        model = build(
            inh("TLE", "A", "D", "I2"),
            bas("A"),
            bds("D"),
            inh("I2", "B", "D"),
            bas("B"),
        )
        assert BAS_IN_DEFENSE_SLOT in {v.code for v in validate(model)}

    def test_unreachable(self):
        model = build(or_("TLE", ["A"]), bas("A"), bas("B"))
        found = [v for v in validate(model) if v.code == UNREACHABLE]
        assert [v.node for v in found] == ["B"]

    def test_missing_tle(self):
        model = build(bas("A"), tle="GONE")
        assert MISSING_TLE in {v.code for v in validate(model)}

    def test_dangling_ref(self):
        model = build(or_("TLE", ["A", "GHOST"]), bas("A"))
        found = [v for v in validate(model) if v.code == DANGLING_REF]
        assert found and "GHOST" in found[0].message

    def test_violations_are_sorted_and_deterministic(self):
        model = build(or_("TLE", ["A", "GHOST"]), bas("A"), bas("B"), bds("D"))
        first = validate(model)
        assert first == validate(model)
        assert first == sorted(first, key=lambda v: (v.code, v.node or "", v.message))

    def test_random_models_validate_clean(self):
        rng = random.Random(20240817)
        for _ in range(50):
            assert validate(make_random_model(rng)) == []


class TestStructure:
    def test_leaf_partition(self, fig4):
        part = leaves(fig4)
        assert part.bas == {"A1", "A2"}
        assert part.bcf == {"C1", "C2", "C3"}
        assert part.bds == {"D1", "D2"}
        assert part.risk == {"A1", "A2", "C1", "C2", "C3"}

    def test_topological_order(self, fig4):
        order = topological_order(fig4)
        position = {nid: i for i, nid in enumerate(order)}
        assert set(order) == set(fig4.nodes)
        for node in fig4.nodes.values():
            for ref in node.successors():
                assert position[ref] < position[node.id]

    def test_topological_order_rejects_cycles(self):
        model = build(or_("TLE", ["X"]), and_("X", ["TLE"]))
        with pytest.raises(InvalidModelError):
            topological_order(model)

    def test_evaluate_rejects_cycles(self):
        model = build(or_("TLE", ["X"]), and_("X", ["TLE"]))
        with pytest.raises(InvalidModelError):
            evaluate(model, set())

    def test_structural_equality_ignores_metadata(self, fig3):
        clone = Model(dict(fig3.nodes), fig3.tle, name="other", description="x")
        assert fig3.structurally_equal(clone)
        assert clone.structurally_equal(fig3)

    def test_display_uses_label(self, gsaas):
        assert gsaas.display("HE2") == "HE"
        assert gsaas.display("HE") == "HE"
        assert gsaas.nodes["HE2"].kind is LeafKind.BCF


class TestMonotonicity:
    def test_risk_and_defense_flips(self):
        rng = random.Random(99)
        for _ in range(40):
            model = make_random_model(rng)
            part = leaves(model)
            risk, defs = sorted(part.risk), sorted(part.bds)
            for _ in range(10):
                active = {x for x in risk if rng.random() < 0.5}
                deployed = {d for d in defs if rng.random() < 0.5}
                before = evaluate(model, active | deployed)
                off_risk = [x for x in risk if x not in active]
                if off_risk:
                    flip = rng.choice(off_risk)
                    after = evaluate(model, active | {flip} | deployed)
                    assert not (before and not after), (model, active, flip)
                off_def = [d for d in defs if d not in deployed]
                if off_def:
                    flip = rng.choice(off_def)
                    after = evaluate(model, active | deployed | {flip})
                    assert not (not before and after), (model, deployed, flip)
