import warnings

import pytest

from vslam.errors import ConflictingGroundEffect, PDDLSyntaxError, PDDLTypeError, UnsupportedFeature
from vslam.pddl import (
    Atom,
    PLiteral,
    format_domain,
    format_problem,
    ground,
    load_domain,
    load_problem,
    parse_domain,
    parse_problem,
)

from conftest import DATA

TINY = """
(define (domain tiny)
  (:requirements :strips)
  (:predicates (on ?x ?y))
  (:action stack
    :parameters (?x ?y)
    :precondition (and)
    :effect (and (on ?x ?y))))
"""

TYPED = """
(define (domain typed)
  (:requirements :strips :typing :negative-preconditions)
  (:types block - object table)
  (:predicates (clear ?b - block) (at ?b - block ?t - table))
  (:action wipe
    :parameters (?b - block)
    :precondition (and (not (clear ?b)))
    :effect (and (clear ?b))))
"""


def test_parse_tiny_domain():
    dom = parse_domain(TINY)
    assert dom.name == "tiny"
    assert len(dom.predicates) == 1 and dom.predicates[0].name == "on"
    (stack,) = dom.actions
    assert [v for v, _ in stack.params] == ["?x", "?y"]
    assert stack.effect == (PLiteral(Atom("on", ("?x", "?y"))),)


def test_blocksworld_shape():
    dom = load_domain(DATA / "blocksworld.pddl")
    assert len(dom.actions) == 4
    assert len(dom.predicates) == 5


@pytest.mark.parametrize("feature", ["forall", "exists", "when", "or", "imply"])
def test_unsupported_formulas(feature):
    body = {
        "forall": "(forall (?z) (on ?z ?x))",
        "exists": "(exists (?z) (on ?z ?x))",
        "when": "(when (on ?x ?y) (on ?y ?x))",
        "or": "(or (on ?x ?y) (on ?y ?x))",
        "imply": "(imply (on ?x ?y) (on ?y ?x))",
    }[feature]
    text = TINY.replace(":precondition (and)", f":precondition (and {body})")
    with pytest.raises(UnsupportedFeature) as info:
        parse_domain(text)
    assert info.value.name == feature


@pytest.mark.parametrize("req", [":adl", ":conditional-effects", ":numeric-fluents", ":quantified-preconditions"])
def test_unsupported_requirements(req):
    with pytest.raises(UnsupportedFeature):
        parse_domain(TINY.replace(":strips", f":strips {req}"))


def test_negative_precondition_needs_requirement():
    text = TINY.replace(":precondition (and)", ":precondition (and (not (on ?x ?y)))")
    with pytest.raises(UnsupportedFeature):
        parse_domain(text)
    parse_domain(text.replace(":strips", ":strips :negative-preconditions"))


def test_syntax_error_position():
    with pytest.raises(PDDLSyntaxError) as info:
        parse_domain("(define (domain x)\n  (:predicates (p)\n")
    assert info.value.line >= 1 and info.value.col >= 1
    with pytest.raises(PDDLSyntaxError) as info:
        parse_domain("(define (domain x))\n  )")
    assert info.value.line == 2 and info.value.col == 3


def test_type_errors():
    bad_arity = TINY.replace("(on ?x ?y)))", "(on ?x)))")
    with pytest.raises(PDDLTypeError):
        parse_domain(bad_arity)
    bad_param = TINY.replace("(on ?x ?y)))", "(on ?x ?z)))")
    with pytest.raises(PDDLTypeError):
        parse_domain(bad_param)
    bad_pred = TINY.replace("(on ?x ?y)))", "(under ?x ?y)))")
    with pytest.raises(PDDLTypeError):
        parse_domain(bad_pred)
    dom = parse_domain(TYPED)
    prob = parse_problem("(define (problem p) (:domain typed) (:objects a - crate) (:init) (:goal (and)))")
    with pytest.raises(PDDLTypeError):
        ground(dom, prob)


def test_grounding_counts():
    dom = parse_domain(TYPED)
    prob = parse_problem(
        "(define (problem p) (:domain typed) (:objects a b c - block t - table)"
        " (:init (clear a)) (:goal (and (clear b))))"
    )
    g = ground(dom, prob)
    # 3 clear fluents plus 3 x 1 at fluents
    assert g.universe.n == 6
    assert g.model.action_names == ["wipe a", "wipe b", "wipe c"]
    assert g.universe.true_fluents(g.init) == ["clear a"]
    assert g.universe.literal_names(g.goal) == ["clear b"]


def test_unary_predicate_two_objects():
    dom = parse_domain(
        "(define (domain d) (:requirements :strips) (:predicates (p ?x))"
        " (:action a :parameters (?x) :precondition (and) :effect (and (p ?x))))"
    )
    prob = parse_problem("(define (problem q) (:domain d) (:objects o1 o2) (:init) (:goal (and)))")
    g = ground(dom, prob)
    assert g.universe.fluents == ("p o1", "p o2")
    assert len(g.model.actions) == 2


def test_blocksworld_three_blocks(blocksworld3):
    g = blocksworld3
    assert g.universe.n == 9 + 3 + 3 + 3 + 1
    assert len(g.model.actions) == 18
    assert sorted(g.dropped) == ["stack a a", "stack b b", "stack c c", "unstack a a", "unstack b b", "unstack c c"]
    assert set(g.universe.true_fluents(g.init)) == {"ontable a", "on b a", "clear b", "ontable c", "clear c", "handempty"}


def test_blocksworld_four_blocks(blocksworld4):
    assert blocksworld4.universe.n == 16 + 4 + 4 + 4 + 1
    assert len(blocksworld4.model.actions) == 32


def test_conflicting_ground_actions_warn():
    with pytest.warns(ConflictingGroundEffect):
        ground(load_domain(DATA / "blocksworld.pddl"), load_problem(DATA / "bw-3.pddl"))


def test_grounding_is_deterministic():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        a = ground(load_domain(DATA / "blocksworld.pddl"), load_problem(DATA / "bw-4.pddl"))
        b = ground(load_domain(DATA / "blocksworld.pddl"), load_problem(DATA / "bw-4.pddl"))
    assert a.universe.fluents == b.universe.fluents == tuple(sorted(a.universe.fluents))
    assert a.model.action_names == b.model.action_names
    assert [(x.pre, x.eff) for x in a.model.actions] == [(x.pre, x.eff) for x in b.model.actions]


@pytest.mark.parametrize("name", ["blocksworld.pddl", "blocksworld-extra.pddl"])
def test_printer_roundtrip_domains(name):
    dom = load_domain(DATA / name)
    assert parse_domain(format_domain(dom)) == dom
    dom = parse_domain(TYPED)
    assert parse_domain(format_domain(dom)) == dom


@pytest.mark.parametrize("name", ["bw-3.pddl", "bw-4.pddl", "bw-extra-3.pddl"])
def test_printer_roundtrip_problems(name):
    prob = load_problem(DATA / name)
    assert parse_problem(format_problem(prob)) == prob


def test_extra_parameter_variant_grounds(blocksworld3):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        g = ground(load_domain(DATA / "blocksworld-extra.pddl"), load_problem(DATA / "bw-extra-3.pddl"))
    assert g.universe.fluents == blocksworld3.universe.fluents
    assert len(g.model.actions) > len(blocksworld3.model.actions)


def test_comments_and_case():
    text = TINY.replace("(:predicates", "; a comment\n  (:PREDICATES")
    assert parse_domain(text) == parse_domain(TINY)
