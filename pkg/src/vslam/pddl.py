"""STRIPS PDDL subset: parsing, pretty-printing and naive full grounding.

Supported requirements are ``:strips``, ``:typing`` and
``:negative-preconditions``. Preconditions, effects and goals are
conjunctions of literals. Anything else (quantifiers, conditional effects,
disjunction, equality, numeric fluents, derived predicates, durative actions)
raises ``UnsupportedFeature``.
"""

from __future__ import annotations

import itertools
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .core import FluentUniverse, GroundAction, GroundModel, LiteralSet, State, conflicting
from .errors import ConflictingGroundEffect, PDDLSyntaxError, PDDLTypeError, UnsupportedFeature

SUPPORTED_REQUIREMENTS = frozenset({":strips", ":typing", ":negative-preconditions"})
UNSUPPORTED_KEYWORDS = frozenset(
    {"forall", "exists", "when", "or", "imply", "=", "increase", "decrease", "assign",
     "scale-up", "scale-down", "either", "at", "over", "preference"}
)
UNSUPPORTED_SECTIONS = frozenset(
    {":functions", ":derived", ":durative-action", ":axiom", ":constraints", ":metric", ":timed-initial-literals"}
)
ROOT_TYPE = "object"

# -- s-expressions -------------------------------------------------------------

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


@dataclass
class Sym:
    text: str
    line: int
    col: int


@dataclass
class SList:
    items: list
    line: int
    col: int


def read_sexpr(text: str):
    """Parse one top-level s-expression; tokens are lower-cased."""
    stack: list[SList] = []
    result = None
    line, line_start = 1, 0
    for m in _TOKEN.finditer(text):
        tok = m.group()
        col = m.start() - line_start + 1
        if tok[0].isspace() or tok[0] == ";":
            nl = tok.count("\n")
            if nl:
                line += nl
                line_start = m.start() + tok.rindex("\n") + 1
            continue
        if result is not None:
            raise PDDLSyntaxError(line, col, "end of input", tok)
        if tok == "(":
            stack.append(SList([], line, col))
        elif tok == ")":
            if not stack:
                raise PDDLSyntaxError(line, col, "'(' before ')'", tok)
            node = stack.pop()
            if stack:
                stack[-1].items.append(node)
            else:
                result = node
        else:
            if not stack:
                raise PDDLSyntaxError(line, col, "'('", tok)
            stack[-1].items.append(Sym(tok.lower(), line, col))
    if stack:
        raise PDDLSyntaxError(line, m.end() - line_start + 1 if text else 1, "')'", None)
    if result is None:
        raise PDDLSyntaxError(line, 1, "'('", None)
    return result


def _where(node) -> tuple[int, int]:
    return node.line, node.col


def _sym(node, expected: str) -> str:
    if not isinstance(node, Sym):
        raise PDDLSyntaxError(*_where(node), expected, "(...)")
    return node.text


def _list(node, expected: str) -> SList:
    if not isinstance(node, SList):
        raise PDDLSyntaxError(*_where(node), expected, node.text)
    return node


def _head(node: SList) -> str | None:
    return node.items[0].text if node.items and isinstance(node.items[0], Sym) else None


# -- structures ---------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        return "(" + " ".join((self.predicate,) + self.args) + ")"


@dataclass(frozen=True)
class PLiteral:
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"(not {self.atom})"


@dataclass(frozen=True)
class Predicate:
    name: str
    params: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[tuple[str, str], ...]
    precondition: tuple[PLiteral, ...]
    effect: tuple[PLiteral, ...]


@dataclass(frozen=True)
class LiftedDomain:
    name: str
    requirements: tuple[str, ...] = ()
    types: tuple[tuple[str, str], ...] = ()
    constants: tuple[tuple[str, str], ...] = ()
    predicates: tuple[Predicate, ...] = ()
    actions: tuple[ActionSchema, ...] = ()

    def predicate(self, name: str) -> Predicate | None:
        for p in self.predicates:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True)
class ProblemInstance:
    name: str
    domain: str
    objects: tuple[tuple[str, str], ...] = ()
    init: tuple[Atom, ...] = ()
    goal: tuple[PLiteral, ...] = ()


# -- parsing ------------------------------------------------------------------------


def _typed_list(items: list, variables: bool) -> tuple[tuple[str, str], ...]:
    out: list[tuple[str, str]] = []
    pending: list[str] = []
    i = 0
    while i < len(items):
        tok = _sym(items[i], "name")
        if tok == "-":
            if i + 1 >= len(items):
                raise PDDLSyntaxError(*_where(items[i]), "type name after '-'")
            if isinstance(items[i + 1], SList):
                if _head(items[i + 1]) == "either":
                    raise UnsupportedFeature("either")
            typ = _sym(items[i + 1], "type name")
            if not pending:
                raise PDDLSyntaxError(*_where(items[i]), "names before '-'")
            out.extend((n, typ) for n in pending)
            pending = []
            i += 2
            continue
        if variables and not tok.startswith("?"):
            raise PDDLSyntaxError(*_where(items[i]), "variable (?name)", tok)
        pending.append(tok)
        i += 1
    out.extend((n, ROOT_TYPE) for n in pending)
    return tuple(out)


def _atom(node) -> Atom:
    node = _list(node, "atom")
    if not node.items:
        raise PDDLSyntaxError(*_where(node), "predicate name")
    name = _sym(node.items[0], "predicate name")
    if name in UNSUPPORTED_KEYWORDS:
        raise UnsupportedFeature(name)
    return Atom(name, tuple(_sym(a, "term") for a in node.items[1:]))


def _literal(node) -> PLiteral:
    node = _list(node, "literal")
    if _head(node) == "not":
        if len(node.items) != 2:
            raise PDDLSyntaxError(*_where(node), "(not <atom>)")
        return PLiteral(_atom(node.items[1]), False)
    return PLiteral(_atom(node), True)


def _conjunction(node) -> tuple[PLiteral, ...]:
    node = _list(node, "formula")
    head = _head(node)
    if not node.items:
        return ()
    if head == "and":
        out = []
        for sub in node.items[1:]:
            sub = _list(sub, "literal")
            if _head(sub) == "and":
                out.extend(_conjunction(sub))
            else:
                out.append(_literal(sub))
        return tuple(out)
    if head in UNSUPPORTED_KEYWORDS:
        raise UnsupportedFeature(head)
    return (_literal(node),)


def _define(text: str, kind: str) -> tuple[str, list]:
    root = read_sexpr(text)
    if _head(root) != "define":
        raise PDDLSyntaxError(*_where(root), "(define ...)")
    if len(root.items) < 2:
        raise PDDLSyntaxError(*_where(root), f"({kind} <name>)")
    hdr = _list(root.items[1], f"({kind} <name>)")
    if _head(hdr) != kind or len(hdr.items) != 2:
        raise PDDLSyntaxError(*_where(hdr), f"({kind} <name>)")
    return _sym(hdr.items[1], f"{kind} name"), root.items[2:]


def _requirements(items: list) -> tuple[str, ...]:
    reqs = tuple(_sym(r, "requirement flag") for r in items)
    for r in reqs:
        if r not in SUPPORTED_REQUIREMENTS:
            raise UnsupportedFeature(r)
    return reqs


def parse_domain(text: str) -> LiftedDomain:
    name, sections = _define(text, "domain")
    reqs: tuple[str, ...] = ()
    types: tuple[tuple[str, str], ...] = ()
    constants: tuple[tuple[str, str], ...] = ()
    preds: list[Predicate] = []
    actions: list[ActionSchema] = []
    for sec in sections:
        sec = _list(sec, "domain section")
        key = _head(sec)
        if key is None:
            raise PDDLSyntaxError(*_where(sec), "section keyword")
        if key in UNSUPPORTED_SECTIONS:
            raise UnsupportedFeature(key)
        if key == ":requirements":
            reqs = _requirements(sec.items[1:])
        elif key == ":types":
            types = _typed_list(sec.items[1:], variables=False)
        elif key == ":constants":
            constants = _typed_list(sec.items[1:], variables=False)
        elif key == ":predicates":
            for p in sec.items[1:]:
                p = _list(p, "predicate declaration")
                if not p.items:
                    raise PDDLSyntaxError(*_where(p), "predicate name")
                preds.append(Predicate(_sym(p.items[0], "predicate name"), _typed_list(p.items[1:], True)))
        elif key == ":action":
            actions.append(_action(sec))
        else:
            raise PDDLSyntaxError(*_where(sec), "domain section keyword", key)
    dom = LiftedDomain(name, reqs, types, constants, tuple(preds), tuple(actions))
    _check_domain(dom)
    return dom


def _action(sec: SList) -> ActionSchema:
    if len(sec.items) < 2:
        raise PDDLSyntaxError(*_where(sec), "action name")
    name = _sym(sec.items[1], "action name")
    params: tuple[tuple[str, str], ...] = ()
    pre: tuple[PLiteral, ...] = ()
    eff: tuple[PLiteral, ...] = ()
    rest = sec.items[2:]
    if len(rest) % 2:
        raise PDDLSyntaxError(*_where(rest[-1]), "value after keyword")
    for key_node, value in zip(rest[::2], rest[1::2]):
        key = _sym(key_node, ":parameters, :precondition or :effect")
        if key == ":parameters":
            params = _typed_list(_list(value, "parameter list").items, True)
        elif key == ":precondition":
            pre = _conjunction(value)
        elif key == ":effect":
            eff = _conjunction(value)
        else:
            raise PDDLSyntaxError(*_where(key_node), ":parameters, :precondition or :effect", key)
    return ActionSchema(name, params, pre, eff)


def _ancestors(types: tuple[tuple[str, str], ...]) -> dict[str, set[str]]:
    parent = dict(types)
    out: dict[str, set[str]] = {ROOT_TYPE: {ROOT_TYPE}}
    for t in parent:
        seen = {t, ROOT_TYPE}
        cur = t
        while cur in parent and parent[cur] not in seen:
            cur = parent[cur]
            seen.add(cur)
        out[t] = seen
    return out


def _check_domain(dom: LiftedDomain) -> None:
    known = _ancestors(dom.types)
    for t, parent in dom.types:
        if parent not in known:
            raise PDDLTypeError(f"type {t!r} has undeclared parent {parent!r}")
    for c, t in dom.constants:
        if t not in known:
            raise PDDLTypeError(f"constant {c!r} has undeclared type {t!r}")
    for p in dom.predicates:
        for v, t in p.params:
            if t not in known:
                raise PDDLTypeError(f"predicate {p.name!r}: undeclared type {t!r}")
    if len({p.name for p in dom.predicates}) != len(dom.predicates):
        raise PDDLTypeError("duplicate predicate declaration")
    if len({a.name for a in dom.actions}) != len(dom.actions):
        raise PDDLTypeError("duplicate action schema")
    consts = {c for c, _ in dom.constants}
    neg_ok = ":negative-preconditions" in dom.requirements
    for a in dom.actions:
        names = [v for v, _ in a.params]
        if len(set(names)) != len(names):
            raise PDDLTypeError(f"action {a.name!r}: repeated parameter")
        for v, t in a.params:
            if t not in known:
                raise PDDLTypeError(f"action {a.name!r}: undeclared type {t!r}")
        for lit in a.precondition + a.effect:
            pred = dom.predicate(lit.atom.predicate)
            if pred is None:
                raise PDDLTypeError(f"action {a.name!r}: undeclared predicate {lit.atom.predicate!r}")
            if len(pred.params) != len(lit.atom.args):
                raise PDDLTypeError(f"action {a.name!r}: {lit.atom} has wrong arity")
            for arg in lit.atom.args:
                if arg.startswith("?") and arg not in names:
                    raise PDDLTypeError(f"action {a.name!r}: unbound parameter {arg}")
                if not arg.startswith("?") and arg not in consts:
                    raise PDDLTypeError(f"action {a.name!r}: unknown constant {arg!r}")
        if not neg_ok and any(not lit.positive for lit in a.precondition):
            raise UnsupportedFeature(":negative-preconditions (not declared)")


def parse_problem(text: str) -> ProblemInstance:
    name, sections = _define(text, "problem")
    domain = ""
    objects: tuple[tuple[str, str], ...] = ()
    init: list[Atom] = []
    goal: tuple[PLiteral, ...] = ()
    for sec in sections:
        sec = _list(sec, "problem section")
        key = _head(sec)
        if key in UNSUPPORTED_SECTIONS:
            raise UnsupportedFeature(key)
        if key == ":domain":
            domain = _sym(sec.items[1], "domain name") if len(sec.items) == 2 else ""
            if not domain:
                raise PDDLSyntaxError(*_where(sec), "(:domain <name>)")
        elif key == ":requirements":
            _requirements(sec.items[1:])
        elif key == ":objects":
            objects = _typed_list(sec.items[1:], variables=False)
        elif key == ":init":
            for a in sec.items[1:]:
                a = _list(a, "initial atom")
                if _head(a) == "not":
                    continue  # closed world already
                init.append(_atom(a))
        elif key == ":goal":
            if len(sec.items) != 2:
                raise PDDLSyntaxError(*_where(sec), "(:goal <formula>)")
            goal = _conjunction(sec.items[1])
        else:
            raise PDDLSyntaxError(*_where(sec), "problem section keyword", key)
    return ProblemInstance(name, domain, objects, tuple(init), goal)


def load_domain(path: str | Path) -> LiftedDomain:
    return parse_domain(Path(path).read_text())


def load_problem(path: str | Path) -> ProblemInstance:
    return parse_problem(Path(path).read_text())


# -- printing ---------------------------------------------------------------------


def _fmt_typed(pairs) -> str:
    return " ".join(f"{n} - {t}" for n, t in pairs)


def _fmt_conj(lits) -> str:
    return "(and " + " ".join(str(x) for x in lits) + ")" if lits else "(and)"


def format_domain(dom: LiftedDomain) -> str:
    lines = [f"(define (domain {dom.name})"]
    if dom.requirements:
        lines.append("  (:requirements " + " ".join(dom.requirements) + ")")
    if dom.types:
        lines.append("  (:types " + _fmt_typed(dom.types) + ")")
    if dom.constants:
        lines.append("  (:constants " + _fmt_typed(dom.constants) + ")")
    if dom.predicates:
        lines.append("  (:predicates")
        for p in dom.predicates:
            inner = " ".join([p.name] + ([_fmt_typed(p.params)] if p.params else []))
            lines.append(f"    ({inner})")
        lines.append("  )")
    for a in dom.actions:
        lines += [
            f"  (:action {a.name}",
            f"    :parameters ({_fmt_typed(a.params)})",
            f"    :precondition {_fmt_conj(a.precondition)}",
            f"    :effect {_fmt_conj(a.effect)})",
        ]
    lines.append(")")
    return "\n".join(lines) + "\n"


def format_problem(prob: ProblemInstance) -> str:
    lines = [f"(define (problem {prob.name})", f"  (:domain {prob.domain})"]
    if prob.objects:
        lines.append("  (:objects " + _fmt_typed(prob.objects) + ")")
    lines.append("  (:init " + " ".join(str(a) for a in prob.init) + ")")
    lines.append(f"  (:goal {_fmt_conj(prob.goal)})")
    lines.append(")")
    return "\n".join(lines) + "\n"


# -- grounding ---------------------------------------------------------------------


def fluent_name(atom: Atom) -> str:
    return " ".join((atom.predicate,) + atom.args)


@dataclass
class Grounding:
    model: GroundModel
    init: State
    goal: LiteralSet
    dropped: list[str] = field(default_factory=list)

    @property
    def universe(self) -> FluentUniverse:
        return self.model.universe


def ground(dom: LiftedDomain, prob: ProblemInstance | None = None) -> Grounding:
    """Instantiate every predicate and schema with type-consistent objects.

    Orderings are lexicographic by name, then arguments. Ground actions whose
    precondition or effect becomes conflicting are dropped with a
    ``ConflictingGroundEffect`` warning.
    """
    prob = prob or ProblemInstance("empty", dom.name)
    if prob.domain and prob.domain != dom.name:
        raise PDDLTypeError(f"problem is for domain {prob.domain!r}, not {dom.name!r}")
    ancestors = _ancestors(dom.types)
    typed: dict[str, str] = {}
    for o, t in dom.constants + prob.objects:
        if t not in ancestors:
            raise PDDLTypeError(f"object {o!r} has undeclared type {t!r}")
        if typed.setdefault(o, t) != t:
            raise PDDLTypeError(f"object {o!r} declared with two types")
    by_type: dict[str, list[str]] = {}
    for o in sorted(typed):
        for t in ancestors[typed[o]]:
            by_type.setdefault(t, []).append(o)

    def domain_of(t: str) -> list[str]:
        return by_type.get(t, [])

    fluents = []
    for p in sorted(dom.predicates, key=lambda p: p.name):
        for args in itertools.product(*(domain_of(t) for _, t in p.params)):
            fluents.append(Atom(p.name, tuple(args)))
    fluents.sort(key=lambda a: (a.predicate, a.args))
    universe = FluentUniverse(fluent_name(a) for a in fluents)

    def lits(literals, binding) -> LiteralSet:
        mask = 0
        for lit in literals:
            atom = Atom(lit.atom.predicate, tuple(binding.get(x, x) for x in lit.atom.args))
            name = fluent_name(atom)
            if name not in universe:
                raise PDDLTypeError(f"{atom} is not a well-typed fluent")
            idx = universe.index(name)
            mask |= 1 << (2 * idx + (0 if lit.positive else 1))
        return mask

    actions = []
    dropped = []
    for schema in sorted(dom.actions, key=lambda a: a.name):
        variables = [v for v, _ in schema.params]
        for args in itertools.product(*(domain_of(t) for _, t in schema.params)):
            binding = dict(zip(variables, args))
            pre = lits(schema.precondition, binding)
            eff = lits(schema.effect, binding)
            name = " ".join((schema.name,) + args)
            if conflicting(pre) or conflicting(eff):
                dropped.append(name)
                warnings.warn(f"dropping {name!r}: conflicting literals", ConflictingGroundEffect, stacklevel=2)
                continue
            actions.append(GroundAction(name, pre, eff))
    model = GroundModel(universe, actions)

    init_true = []
    for atom in prob.init:
        name = fluent_name(atom)
        if name not in universe:
            raise PDDLTypeError(f"initial atom {atom} is not a well-typed fluent")
        init_true.append(name)
    goal = lits(prob.goal, {})
    if conflicting(goal):
        raise PDDLTypeError("goal is conflicting")
    return Grounding(model, universe.state(init_true), goal, dropped)
