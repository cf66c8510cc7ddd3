"""First-order policy language over provenance graphs.

Grammar (whitespace-insensitive, ``#`` starts a line comment)::

    policy   := expr EOF
    expr     := quant | impl
    quant    := ("exists" | "forall") IDENT ":" sort "." expr
    impl     := orex ("=>" impl)?                  # right-associative
    orex     := andex ("or" andex)*                # left-associative
    andex    := unary ("and" unary)*               # left-associative
    unary    := "not" unary | atom | "true" | "false" | "(" expr ")"
    atom     := "edge" "(" term "," term "," LABEL ")"
              | "member" "(" term "," IDENT ")"
    term     := IDENT
    sort     := key_entity | contract_entity | data_entity | node_agent
              | account_agent | activity | entity | agent | vertex

Operator precedence, loosest first: quantifier bodies extend to the end of
the enclosing scope, then ``=>``, ``or``, ``and``, ``not``. An identifier
in term position is a variable when a quantifier of that name is in scope
and a named constant otherwise; rebinding a name that is already in scope
is an error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .graph import RelationLabel, Sort

__all__ = [
    "Policy",
    "Exists",
    "Forall",
    "And",
    "Or",
    "Not",
    "Implies",
    "EdgeAtom",
    "MemberAtom",
    "Const",
    "Term",
    "Var",
    "ConstRef",
    "parse_policy",
    "pretty_print",
    "Environment",
    "BoundPolicy",
    "bind",
    "PolicyError",
    "ParseError",
    "ShadowingError",
    "UnknownLabelError",
    "UnknownSortError",
    "StrictBindingError",
]


# ---------------------------------------------------------------------------
# abstract syntax
# ---------------------------------------------------------------------------


class Term:
    """Base class for the two term forms appearing inside atoms."""


@dataclass(frozen=True)
class Var(Term):
    """A quantified variable occurrence."""

    name: str


@dataclass(frozen=True)
class ConstRef(Term):
    """A named constant, resolved to a vertex id through an Environment."""

    name: str


class Policy:
    """Base class for policy AST nodes."""


@dataclass(frozen=True)
class Exists(Policy):
    var: str
    sort: Sort
    body: Policy


@dataclass(frozen=True)
class Forall(Policy):
    var: str
    sort: Sort
    body: Policy


@dataclass(frozen=True)
class And(Policy):
    left: Policy
    right: Policy


@dataclass(frozen=True)
class Or(Policy):
    left: Policy
    right: Policy


@dataclass(frozen=True)
class Not(Policy):
    operand: Policy


@dataclass(frozen=True)
class Implies(Policy):
    left: Policy
    right: Policy


@dataclass(frozen=True)
class EdgeAtom(Policy):
    """Does the graph contain the edge ``source -> target`` with ``label``?"""

    source: Term
    target: Term
    label: RelationLabel


@dataclass(frozen=True)
class MemberAtom(Policy):
    """Does the term's vertex id belong to the named id set?"""

    term: Term
    set_name: str


@dataclass(frozen=True)
class Const(Policy):
    """A propositional constant: ``true`` or ``false``."""

    value: bool


# ---------------------------------------------------------------------------
# errors
# ---------------------------------------------------------------------------


class PolicyError(Exception):
    """Base class for policy-language errors."""


class ParseError(PolicyError):
    """The input is not a well-formed policy. Carries a 1-based position."""

    def __init__(self, message: str, line: int, column: int, expected: Iterable[str] = ()):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        super().__init__(f"{message} (line {line}, column {column})")


class ShadowingError(ParseError):
    """A quantifier rebinds a variable name that is already in scope."""


class UnknownLabelError(ParseError):
    """An edge atom names a label outside the six relation labels."""


class UnknownSortError(ParseError):
    """A quantifier names a sort outside the nine quantification sorts."""


class StrictBindingError(PolicyError):
    """Strict binding found names the environment does not resolve."""

    def __init__(self, unresolved: Iterable[str]):
        self.unresolved = tuple(sorted(unresolved))
        super().__init__(
            "environment does not resolve: " + ", ".join(self.unresolved)
        )


# ---------------------------------------------------------------------------
# lexer
# ---------------------------------------------------------------------------

_KEYWORDS = frozenset(
    {"exists", "forall", "and", "or", "not", "true", "false", "edge", "member"}
)
_SORT_NAMES: Mapping[str, Sort] = {s.value: s for s in Sort}
_LABEL_NAMES: Mapping[str, RelationLabel] = {l.value: l for l in RelationLabel}


@dataclass(frozen=True)
class _Token:
    kind: str  # keyword, punctuation, "ident" or "eof"
    value: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, column = 1, 1
    i = 0
    length = len(text)
    while i < length:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            column = 1
            continue
        if ch in " \t\r":
            i += 1
            column += 1
            continue
        if ch == "#":
            while i < length and text[i] != "\n":
                i += 1
            continue
        if ch in "(),:.":
            tokens.append(_Token(ch, ch, line, column))
            i += 1
            column += 1
            continue
        if text.startswith("=>", i):
            tokens.append(_Token("=>", "=>", line, column))
            i += 2
            column += 2
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < length and (text[i].isalnum() or text[i] == "_"):
                i += 1
            word = text[start:i]
            kind = word if word in _KEYWORDS else "ident"
            tokens.append(_Token(kind, word, line, column))
            column += i - start
            continue
        raise ParseError(f"unexpected character {ch!r}", line, column)
    tokens.append(_Token("eof", "", line, column))
    return tokens


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        self.scope: list[str] = []

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def eat(self, kind: str) -> _Token:
        token = self.current
        if token.kind != kind:
            raise ParseError(
                f"expected {kind!r} but found {token.value or 'end of input'!r}",
                token.line,
                token.column,
                expected={kind},
            )
        self.pos += 1
        return token

    def parse(self) -> Policy:
        node = self.expr()
        token = self.current
        if token.kind != "eof":
            raise ParseError(
                f"unexpected trailing input {token.value!r}",
                token.line,
                token.column,
                expected={"eof"},
            )
        return node

    def expr(self) -> Policy:
        if self.current.kind in ("exists", "forall"):
            return self.quantifier()
        return self.implication()

    def quantifier(self) -> Policy:
        keyword = self.eat(self.current.kind)
        name_token = self.eat("ident")
        if name_token.value in self.scope:
            raise ShadowingError(
                f"variable {name_token.value!r} is already bound in this scope",
                name_token.line,
                name_token.column,
            )
        self.eat(":")
        sort_token = self.eat("ident")
        sort = _SORT_NAMES.get(sort_token.value)
        if sort is None:
            raise UnknownSortError(
                f"unknown sort {sort_token.value!r}",
                sort_token.line,
                sort_token.column,
                expected=frozenset(_SORT_NAMES),
            )
        self.eat(".")
        self.scope.append(name_token.value)
        try:
            body = self.expr()
        finally:
            self.scope.pop()
        node = Exists if keyword.kind == "exists" else Forall
        return node(name_token.value, sort, body)

    def implication(self) -> Policy:
        left = self.disjunction()
        if self.current.kind == "=>":
            self.eat("=>")
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Policy:
        node = self.conjunction()
        while self.current.kind == "or":
            self.eat("or")
            node = Or(node, self.conjunction())
        return node

    def conjunction(self) -> Policy:
        node = self.unary()
        while self.current.kind == "and":
            self.eat("and")
            node = And(node, self.unary())
        return node

    def unary(self) -> Policy:
        token = self.current
        if token.kind == "not":
            self.eat("not")
            return Not(self.unary())
        if token.kind == "(":
            self.eat("(")
            node = self.expr()
            self.eat(")")
            return node
        if token.kind == "true":
            self.eat("true")
            return Const(True)
        if token.kind == "false":
            self.eat("false")
            return Const(False)
        if token.kind == "edge":
            return self.edge_atom()
        if token.kind == "member":
            return self.member_atom()
        raise ParseError(
            f"expected an atom, 'not', 'true', 'false' or '(' but found "
            f"{token.value or 'end of input'!r}",
            token.line,
            token.column,
            expected={"edge", "member", "not", "true", "false", "("},
        )

    def edge_atom(self) -> Policy:
        self.eat("edge")
        self.eat("(")
        source = self.term()
        self.eat(",")
        target = self.term()
        self.eat(",")
        label_token = self.eat("ident")
        label = _LABEL_NAMES.get(label_token.value)
        if label is None:
            raise UnknownLabelError(
                f"unknown relation label {label_token.value!r}",
                label_token.line,
                label_token.column,
                expected=frozenset(_LABEL_NAMES),
            )
        self.eat(")")
        return EdgeAtom(source, target, label)

    def member_atom(self) -> Policy:
        self.eat("member")
        self.eat("(")
        term = self.term()
        self.eat(",")
        set_token = self.eat("ident")
        self.eat(")")
        return MemberAtom(term, set_token.value)

    def term(self) -> Term:
        token = self.eat("ident")
        if token.value in self.scope:
            return Var(token.value)
        return ConstRef(token.value)


def parse_policy(text: str) -> Policy:
    """Parse policy source text into an AST.

    Raises ParseError (or a subclass) with a 1-based line/column position
    on any non-conforming input.
    """
    return _Parser(_tokenize(text)).parse()


# ---------------------------------------------------------------------------
# printer
# ---------------------------------------------------------------------------

_PREC_QUANT = 0
_PREC_IMPLIES = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_NOT = 4


def pretty_print(ast: Policy) -> str:
    """Render an AST as canonical policy text with minimal parentheses.

    For well-scoped ASTs (every Var under a quantifier of its name, no
    ConstRef shadowed by an enclosing quantifier) the output re-parses to
    a structurally identical AST.
    """
    return _render(ast, _PREC_QUANT)


def _render(node: Policy, context: int) -> str:
    if isinstance(node, (Exists, Forall)):
        keyword = "exists" if isinstance(node, Exists) else "forall"
        text = f"{keyword} {node.var}: {node.sort.value} . {_render(node.body, _PREC_QUANT)}"
        return f"({text})" if context > _PREC_QUANT else text
    if isinstance(node, Implies):
        text = (
            f"{_render(node.left, _PREC_OR)} => {_render(node.right, _PREC_IMPLIES)}"
        )
        return f"({text})" if context > _PREC_IMPLIES else text
    if isinstance(node, Or):
        text = f"{_render(node.left, _PREC_OR)} or {_render(node.right, _PREC_AND)}"
        return f"({text})" if context > _PREC_OR else text
    if isinstance(node, And):
        text = f"{_render(node.left, _PREC_AND)} and {_render(node.right, _PREC_NOT)}"
        return f"({text})" if context > _PREC_AND else text
    if isinstance(node, Not):
        return f"not {_render(node.operand, _PREC_NOT)}"
    if isinstance(node, EdgeAtom):
        return (
            f"edge({_render_term(node.source)}, {_render_term(node.target)}, "
            f"{node.label.value})"
        )
    if isinstance(node, MemberAtom):
        return f"member({_render_term(node.term)}, {node.set_name})"
    if isinstance(node, Const):
        return "true" if node.value else "false"
    raise TypeError(f"not a policy node: {node!r}")


def _render_term(term: Term) -> str:
    if isinstance(term, (Var, ConstRef)):
        return term.name
    raise TypeError(f"not a term: {term!r}")


# ---------------------------------------------------------------------------
# binding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Environment:
    """Names available to a policy: constants (vertex ids) and id sets."""

    constants: Mapping[str, str] = field(default_factory=dict)
    sets: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "sets",
            {name: frozenset(members) for name, members in self.sets.items()},
        )


@dataclass(frozen=True)
class BoundPolicy:
    """A parsed policy together with its name-resolution table.

    ``constants`` and ``sets`` hold the resolved names; the unresolved
    remainder is kept so evaluation can report it (unresolved names make
    the atoms that mention them false).
    """

    ast: Policy
    constants: Mapping[str, str]
    sets: Mapping[str, frozenset[str]]
    unresolved_constants: tuple[str, ...]
    unresolved_sets: tuple[str, ...]

    @property
    def unresolved(self) -> tuple[str, ...]:
        """All unresolved names, sorted."""
        return tuple(sorted((*self.unresolved_constants, *self.unresolved_sets)))


def referenced_names(ast: Policy) -> tuple[set[str], set[str]]:
    """Return the (constant names, set names) referenced by ``ast``."""
    constants: set[str] = set()
    sets: set[str] = set()
    stack = [ast]
    while stack:
        node = stack.pop()
        if isinstance(node, (Exists, Forall)):
            stack.append(node.body)
        elif isinstance(node, (And, Or, Implies)):
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, Not):
            stack.append(node.operand)
        elif isinstance(node, EdgeAtom):
            for term in (node.source, node.target):
                if isinstance(term, ConstRef):
                    constants.add(term.name)
        elif isinstance(node, MemberAtom):
            if isinstance(node.term, ConstRef):
                constants.add(node.term.name)
            sets.add(node.set_name)
    return constants, sets


def bind(ast: Policy, env: Environment, strict: bool = False) -> BoundPolicy:
    """Resolve the constant and set names of ``ast`` against ``env``.

    Non-strict binding records unresolved names and leaves them to falsify
    the atoms that mention them at evaluation time; strict binding raises
    StrictBindingError instead. Whether a resolved vertex id exists in any
    particular graph is checked at evaluation time, not here.
    """
    constant_names, set_names = referenced_names(ast)
    constants = {n: env.constants[n] for n in constant_names if n in env.constants}
    sets = {n: env.sets[n] for n in set_names if n in env.sets}
    unresolved_constants = tuple(sorted(constant_names - constants.keys()))
    unresolved_sets = tuple(sorted(set_names - sets.keys()))
    if strict and (unresolved_constants or unresolved_sets):
        raise StrictBindingError((*unresolved_constants, *unresolved_sets))
    return BoundPolicy(ast, constants, sets, unresolved_constants, unresolved_sets)
