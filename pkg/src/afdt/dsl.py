"""Textual DSL, JSON interchange, and DOT export for attack-fault-defense models.

The DSL is a line-oriented statement language (``.afdt`` files, UTF-8):

    // comment
    toplevel TLE;
    TLE or G1 G2;
    G1 and C1 A1;
    G2 vot 2 of A1 A2 C2;
    I1 inh event=G1 defense=D1 disabler=C3;
    A1 bas;
    C1 bcf;
    D1 bds;
    HE2 bcf label="HE";

Statements are ``;``-terminated; identifiers are bare (``[A-Za-z0-9_.-]+``) or
double-quoted (may then contain spaces; escapes are limited to ``\\"`` and
``\\\\``).  Leaf statements take an optional display ``label=`` so distinct
nodes can share a rendered name.  The parser only rejects malformed text;
structural problems (arity, stratification, cycles) are left to
``model.validate``.

The JSON form (``.afdt.json``) is the machine interchange schema::

    {"name": ..., "tle": ..., "nodes": [{"id", "kind", "k"?, "children"?,
                                         "event"?, "defense"?, "disabler"?,
                                         "label"?}, ...]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .errors import AfdtError, SchemaError
from .model import (
    BARE_ID_RE,
    GateKind,
    ID_RE,
    LeafKind,
    Model,
    Node,
)

# ---------------------------------------------------------------------------
# Parsing

SYNTAX = "SYNTAX"
UNKNOWN_KEYWORD = "UNKNOWN_KEYWORD"
DUPLICATE_DEF = "DUPLICATE_DEF"
BAD_NUMBER = "BAD_NUMBER"

_LEAF_KEYWORDS = {k.value: k for k in LeafKind}
_GATE_KEYWORDS = {k.value: k for k in GateKind}


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    code: str
    message: str

    def as_dict(self) -> dict[str, object]:
        return {
            "line": self.span.line,
            "column": self.span.column,
            "length": self.span.length,
            "code": self.code,
            "message": self.message,
        }


class ParseFailure(AfdtError):
    """Raised by ``parse`` with the full list of errors found in the text."""

    code = "PARSE_ERROR"

    def __init__(self, errors: list[ParseError]):
        first = errors[0]
        super().__init__(
            f"{len(errors)} parse error(s); first at "
            f"{first.span.line}:{first.span.column}: {first.message}"
        )
        self.errors = errors


@dataclass(frozen=True)
class _Token:
    kind: str  # "word" | "quoted" | "punct"
    value: str
    line: int
    column: int
    length: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.column, self.length)


def _tokenize(text: str) -> tuple[list[_Token], list[ParseError]]:
    tokens: list[_Token] = []
    errors: list[ParseError] = []
    # lines are "\n"-separated (CRLF tolerated); other breaks like \x0c are
    # ordinary in-line characters, legal inside quoted strings
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.removesuffix("\r")
        i = 0
        n = len(line)
        while i < n:
            ch = line[i]
            if ch.isspace():
                i += 1
                continue
            if ch == "/" and line[i + 1 : i + 2] == "/":
                break  # comment to end of line
            col = i + 1
            if ch in ";=":
                tokens.append(_Token("punct", ch, lineno, col, 1))
                i += 1
                continue
            if ch == '"':
                value, consumed, err = _scan_quoted(line, i, lineno)
                if err is not None:
                    errors.append(err)
                    i = n if consumed == 0 else i + consumed
                    continue
                tokens.append(_Token("quoted", value, lineno, col, consumed))
                i += consumed
                continue
            match = BARE_ID_RE.match(line, i)
            if match:
                word = match.group(0)
                tokens.append(_Token("word", word, lineno, col, len(word)))
                i = match.end()
                continue
            errors.append(
                ParseError(SourceSpan(lineno, col, 1), SYNTAX, f"unexpected character {ch!r}")
            )
            i += 1
    return tokens, errors


def _scan_quoted(line: str, start: int, lineno: int) -> tuple[str, int, ParseError | None]:
    """Scan a double-quoted identifier starting at ``line[start]``."""
    out: list[str] = []
    i = start + 1
    while i < len(line):
        ch = line[i]
        if ch == "\\":
            esc = line[i + 1 : i + 2]
            if esc not in ('"', "\\"):
                return "", 0, ParseError(
                    SourceSpan(lineno, i + 1, 2), SYNTAX, f"unsupported escape \\{esc}"
                )
            out.append(esc)
            i += 2
            continue
        if ch == '"':
            return "".join(out), i - start + 1, None
        out.append(ch)
        i += 1
    return "", 0, ParseError(
        SourceSpan(lineno, start + 1, len(line) - start), SYNTAX, "unterminated quoted identifier"
    )


def parse(text: str) -> Model:
    """Parse DSL text into a Model, raising ParseFailure with every error found.

    The returned model has not been validated; run ``model.validate`` to get
    structural findings.
    """
    tokens, errors = _tokenize(text)
    statements: list[list[_Token]] = []
    current: list[_Token] = []
    for token in tokens:
        if token.kind == "punct" and token.value == ";":
            if current:
                statements.append(current)
                current = []
            # stray ';' with no statement is tolerated
            continue
        current.append(token)
    if current:
        errors.append(ParseError(current[-1].span, SYNTAX, "statement is missing its ';'"))

    nodes: dict[str, Node] = {}
    definition_order: list[Node] = []
    tle: str | None = None
    for statement in statements:
        result = _parse_statement(statement, nodes, errors)
        if result is None:
            continue
        if isinstance(result, Node):
            nodes[result.id] = result
            definition_order.append(result)
        else:  # toplevel declaration
            if tle is not None:
                errors.append(
                    ParseError(statement[0].span, DUPLICATE_DEF, "toplevel declared twice")
                )
            else:
                tle = result[0]

    if not tokens and not errors:
        errors.append(ParseError(SourceSpan(1, 1, 1), SYNTAX, "empty model text"))
    elif tle is None and not any(e.code == SYNTAX and "toplevel" in e.message for e in errors):
        errors.append(
            ParseError(SourceSpan(1, 1, 1), SYNTAX, "missing toplevel declaration")
        )

    if errors:
        errors.sort(key=lambda e: (e.span.line, e.span.column))
        raise ParseFailure(errors)
    assert tle is not None
    return Model.from_nodes(definition_order, tle)


def _parse_statement(
    statement: list[_Token], nodes: Mapping[str, Node], errors: list[ParseError]
) -> Node | tuple[str] | None:
    head = statement[0]
    if head.kind == "punct":
        errors.append(ParseError(head.span, SYNTAX, f"statement cannot start with {head.value!r}"))
        return None
    if head.kind == "word" and head.value == "toplevel":
        if len(statement) != 2 or statement[1].kind == "punct":
            errors.append(ParseError(head.span, SYNTAX, "expected: toplevel <id>;"))
            return None
        name = _identifier(statement[1], errors)
        return (name,) if name is not None else None

    node_id = _identifier(head, errors)
    if node_id is None:
        return None
    if len(statement) < 2:
        errors.append(ParseError(head.span, SYNTAX, f"node {node_id!r} has no kind keyword"))
        return None
    kw = statement[1]
    if kw.kind != "word":
        errors.append(ParseError(kw.span, SYNTAX, "expected a node kind keyword"))
        return None
    if node_id in nodes:
        errors.append(ParseError(head.span, DUPLICATE_DEF, f"node {node_id!r} defined twice"))
        return None

    rest = statement[2:]
    if kw.value in _LEAF_KEYWORDS:
        return _parse_leaf(node_id, _LEAF_KEYWORDS[kw.value], kw, rest, errors)
    if kw.value in ("and", "or"):
        children = _identifier_list(rest, kw, errors)
        if children is None:
            return None
        return Node(node_id, _GATE_KEYWORDS[kw.value], children=children)
    if kw.value == "vot":
        return _parse_vot(node_id, kw, rest, errors)
    if kw.value == "inh":
        return _parse_inh(node_id, kw, rest, errors)
    errors.append(ParseError(kw.span, UNKNOWN_KEYWORD, f"unknown node kind {kw.value!r}"))
    return None


def _parse_leaf(
    node_id: str,
    kind: LeafKind,
    kw: _Token,
    rest: list[_Token],
    errors: list[ParseError],
) -> Node | None:
    label: str | None = None
    if rest:
        if (
            len(rest) == 3
            and rest[0].kind == "word"
            and rest[0].value == "label"
            and rest[1].kind == "punct"
            and rest[1].value == "="
            and rest[2].kind in ("word", "quoted")
        ):
            label = rest[2].value
            if not label:
                errors.append(ParseError(rest[2].span, SYNTAX, "label must not be empty"))
                return None
        else:
            errors.append(
                ParseError(rest[0].span, SYNTAX, "leaf statement takes at most label=<name>")
            )
            return None
    return Node(node_id, kind, label=label)


def _parse_vot(
    node_id: str, kw: _Token, rest: list[_Token], errors: list[ParseError]
) -> Node | None:
    if not rest:
        errors.append(ParseError(kw.span, SYNTAX, "expected: <id> vot <k> of <id>...;"))
        return None
    k_token = rest[0]
    if k_token.kind != "word" or not k_token.value.isdigit():
        errors.append(
            ParseError(k_token.span, BAD_NUMBER, f"vot threshold {k_token.value!r} is not a number")
        )
        return None
    k = int(k_token.value)
    if len(rest) < 2 or rest[1].kind != "word" or rest[1].value != "of":
        errors.append(ParseError(k_token.span, SYNTAX, "expected 'of' after the vot threshold"))
        return None
    children = _identifier_list(rest[2:], rest[1], errors)
    if children is None:
        return None
    return Node(node_id, GateKind.VOT, children=children, k=k)


def _parse_inh(
    node_id: str, kw: _Token, rest: list[_Token], errors: list[ParseError]
) -> Node | None:
    slots: dict[str, str] = {}
    i = 0
    while i < len(rest):
        key = rest[i]
        if key.kind != "word" or key.value not in ("event", "defense", "disabler"):
            code = UNKNOWN_KEYWORD if key.kind == "word" else SYNTAX
            errors.append(ParseError(key.span, code, f"expected event=/defense=/disabler=, got {key.value!r}"))
            return None
        if i + 1 >= len(rest) or rest[i + 1].kind != "punct" or rest[i + 1].value != "=":
            errors.append(ParseError(key.span, SYNTAX, f"expected '=' after {key.value}"))
            return None
        value = rest[i + 2] if i + 2 < len(rest) else None
        if value is None or value.kind == "punct":
            errors.append(ParseError(key.span, SYNTAX, f"missing id after {key.value}="))
            return None
        ident = _identifier(value, errors)
        if ident is None:
            return None
        if key.value in slots:
            errors.append(ParseError(key.span, SYNTAX, f"duplicate {key.value}= slot"))
            return None
        slots[key.value] = ident
        i += 3
    if "event" not in slots or "defense" not in slots:
        errors.append(ParseError(kw.span, SYNTAX, "inh gate needs event= and defense= slots"))
        return None
    return Node(
        node_id,
        GateKind.INH,
        event=slots["event"],
        defense=slots["defense"],
        disabler=slots.get("disabler"),
    )


def _identifier(token: _Token, errors: list[ParseError]) -> str | None:
    if token.kind == "punct":
        errors.append(ParseError(token.span, SYNTAX, f"expected an identifier, got {token.value!r}"))
        return None
    if token.kind == "quoted" and (not token.value or not ID_RE.fullmatch(token.value)):
        errors.append(
            ParseError(token.span, SYNTAX, "quoted identifier is empty or has unsupported characters")
        )
        return None
    return token.value


def _identifier_list(
    rest: list[_Token], anchor: _Token, errors: list[ParseError]
) -> tuple[str, ...] | None:
    if not rest:
        errors.append(ParseError(anchor.span, SYNTAX, "expected at least one input id"))
        return None
    out: list[str] = []
    for token in rest:
        ident = _identifier(token, errors)
        if ident is None:
            return None
        out.append(ident)
    return tuple(out)


# ---------------------------------------------------------------------------
# Serialization

def _quoted(text: str) -> str:
    # quoted strings cannot span lines, so line breaks have no written form
    if not text or "\n" in text or "\r" in text:
        raise ValueError(f"cannot serialize text {text!r}: empty or spans lines")
    escaped = text.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _quote_id(identifier: str) -> str:
    if BARE_ID_RE.fullmatch(identifier) and identifier != "toplevel":
        return identifier
    return _quoted(identifier)


def _statement(node: Node) -> str:
    head = _quote_id(node.id)
    if node.is_leaf:
        label = "" if node.label is None else f" label={_quoted(node.label)}"
        return f"{head} {node.kind.value}{label};"
    if node.kind in (GateKind.AND, GateKind.OR):
        inputs = " ".join(_quote_id(c) for c in node.children)
        return f"{head} {node.kind.value} {inputs};"
    if node.kind is GateKind.VOT:
        inputs = " ".join(_quote_id(c) for c in node.children)
        return f"{head} vot {node.k} of {inputs};"
    parts = [f"event={_quote_id(node.event or '')}", f"defense={_quote_id(node.defense or '')}"]
    if node.disabler is not None:
        parts.append(f"disabler={_quote_id(node.disabler)}")
    return f"{head} inh {' '.join(parts)};"


def serialize(model: Model) -> str:
    """Canonical DSL text: toplevel first, then statements in id order.

    ``parse(serialize(m))`` is structurally identical to ``m`` (child order
    is preserved verbatim); metadata is not carried by the DSL form.
    """
    lines = [f"toplevel {_quote_id(model.tle)};"]
    for node_id in sorted(model.nodes):
        lines.append(_statement(model.nodes[node_id]))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON interchange

_ROOT_KEYS = {"name", "description", "tle", "nodes"}
_NODE_KEYS = {"id", "kind", "label", "k", "children", "event", "defense", "disabler"}
_KINDS: dict[str, LeafKind | GateKind] = {**_LEAF_KEYWORDS, **_GATE_KEYWORDS}


def to_json(model: Model) -> dict[str, Any]:
    """JSON-serializable document; nodes emitted in id order."""
    doc: dict[str, Any] = {}
    if model.name is not None:
        doc["name"] = model.name
    if model.description is not None:
        doc["description"] = model.description
    doc["tle"] = model.tle
    doc["nodes"] = [_node_to_json(model.nodes[i]) for i in sorted(model.nodes)]
    return doc


def _node_to_json(node: Node) -> dict[str, Any]:
    entry: dict[str, Any] = {"id": node.id, "kind": node.kind.value}
    if node.label is not None:
        entry["label"] = node.label
    if node.kind is GateKind.VOT:
        entry["k"] = node.k
    if node.kind in (GateKind.AND, GateKind.OR, GateKind.VOT):
        entry["children"] = list(node.children)
    if node.kind is GateKind.INH:
        entry["event"] = node.event
        entry["defense"] = node.defense
        if node.disabler is not None:
            entry["disabler"] = node.disabler
    return entry


def from_json(doc: Mapping[str, Any] | str) -> Model:
    """Build a Model from the interchange schema.

    Shape problems raise SchemaError with a JSON pointer; duplicate ids and
    structural rule breaches are left for ``model.validate``.
    """
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SchemaError("", f"not valid JSON: {exc}") from None
    if not isinstance(doc, Mapping):
        raise SchemaError("", "model document must be a JSON object")
    for key in doc:
        if key not in _ROOT_KEYS:
            raise SchemaError(f"/{key}", "unknown key")
    tle = doc.get("tle")
    if not isinstance(tle, str) or not tle:
        raise SchemaError("/tle", "tle must be a non-empty string")
    name = _optional_str(doc, "name")
    description = _optional_str(doc, "description")
    raw_nodes = doc.get("nodes")
    if not isinstance(raw_nodes, list):
        raise SchemaError("/nodes", "nodes must be an array")
    nodes = [_node_from_json(item, f"/nodes/{i}") for i, item in enumerate(raw_nodes)]
    return Model.from_nodes(nodes, tle, name=name, description=description)


def _optional_str(doc: Mapping[str, Any], key: str) -> str | None:
    value = doc.get(key)
    if value is not None and not isinstance(value, str):
        raise SchemaError(f"/{key}", f"{key} must be a string")
    return value


def _node_from_json(item: Any, path: str) -> Node:
    if not isinstance(item, Mapping):
        raise SchemaError(path, "node entry must be a JSON object")
    for key in item:
        if key not in _NODE_KEYS:
            raise SchemaError(f"{path}/{key}", "unknown key")
    node_id = item.get("id")
    if not isinstance(node_id, str) or not node_id or not ID_RE.fullmatch(node_id):
        raise SchemaError(f"{path}/id", "id must be a non-empty identifier string")
    kind_value = item.get("kind")
    kind = _KINDS.get(kind_value) if isinstance(kind_value, str) else None
    if kind is None:
        raise SchemaError(f"{path}/kind", f"kind must be one of {sorted(_KINDS)}")

    label = item.get("label")
    if label is not None:
        if not isinstance(kind, LeafKind):
            raise SchemaError(f"{path}/label", "label is only allowed on leaves")
        if not isinstance(label, str) or not label:
            raise SchemaError(f"{path}/label", "label must be a non-empty string")

    allowed = {"id", "kind", "label"}
    if kind in (GateKind.AND, GateKind.OR, GateKind.VOT):
        allowed |= {"children"}
        if kind is GateKind.VOT:
            allowed |= {"k"}
    elif kind is GateKind.INH:
        allowed |= {"event", "defense", "disabler"}
    for key in item:
        if key not in allowed:
            raise SchemaError(f"{path}/{key}", f"key not allowed on a {kind.value} node")

    if isinstance(kind, LeafKind):
        return Node(node_id, kind, label=label)
    if kind is GateKind.INH:
        event = _required_id(item, "event", path)
        defense = _required_id(item, "defense", path)
        disabler = item.get("disabler")
        if disabler is not None and (not isinstance(disabler, str) or not disabler):
            raise SchemaError(f"{path}/disabler", "disabler must be a non-empty string")
        return Node(node_id, kind, event=event, defense=defense, disabler=disabler)
    children = item.get("children")
    if not isinstance(children, list) or not all(isinstance(c, str) and c for c in children):
        raise SchemaError(f"{path}/children", "children must be an array of node ids")
    if kind is GateKind.VOT:
        k = item.get("k")
        if not isinstance(k, int) or isinstance(k, bool):
            raise SchemaError(f"{path}/k", "k must be an integer")
        return Node(node_id, kind, children=tuple(children), k=k)
    return Node(node_id, kind, children=tuple(children))


def _required_id(item: Mapping[str, Any], key: str, path: str) -> str:
    value = item.get(key)
    if not isinstance(value, str) or not value:
        raise SchemaError(f"{path}/{key}", f"{key} must be a non-empty string")
    return value


# ---------------------------------------------------------------------------
# DOT export

_LEAF_STYLE = {
    LeafKind.BAS: ("ellipse", "#e06666"),  # attack: red
    LeafKind.BCF: ("octagon", "#f6b26b"),  # failure: orange
    LeafKind.BDS: ("house", "#93c47d"),  # defense: green
}


def to_dot(model: Model) -> str:
    """Graphviz rendering with the usual visual conventions.

    Leaves get kind-specific shapes/colors; INH defense edges are dashed and
    disabler edges dotted.  Output is deterministic: nodes in id order, edges
    in slot/child order per node.
    """
    def esc(text: str) -> str:
        return text.replace("\\", "\\\\").replace('"', '\\"')

    out = ["digraph afdt {"]
    if model.name:
        out.append(f'  label="{esc(model.name)}";')
    out.append("  rankdir=TB;")
    for node_id in sorted(model.nodes):
        node = model.nodes[node_id]
        if node.is_leaf:
            shape, color = _LEAF_STYLE[node.kind]
            out.append(
                f'  "{esc(node_id)}" [label="{esc(node.display)}", shape={shape}, '
                f'style=filled, fillcolor="{color}"];'
            )
        else:
            gate = node.kind.value.upper()
            if node.kind is GateKind.VOT:
                gate = f"VOT({node.k}/{len(node.children)})"
            out.append(f'  "{esc(node_id)}" [label="{esc(node_id)}\\n{gate}", shape=box];')
    for node_id in sorted(model.nodes):
        node = model.nodes[node_id]
        if node.kind is GateKind.INH:
            if node.event is not None:
                out.append(f'  "{esc(node_id)}" -> "{esc(node.event)}";')
            if node.defense is not None:
                out.append(f'  "{esc(node_id)}" -> "{esc(node.defense)}" [style=dashed];')
            if node.disabler is not None:
                out.append(f'  "{esc(node_id)}" -> "{esc(node.disabler)}" [style=dotted];')
        else:
            for child in node.children:
                out.append(f'  "{esc(node_id)}" -> "{esc(child)}";')
    out.append("}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Files

def read_model_file(path: str | Path) -> Model:
    """Load ``.afdt`` (DSL) or ``.afdt.json`` (JSON) model files."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.name.endswith(".afdt.json") or path.suffix == ".json":
        return from_json(text)
    return parse(text)
