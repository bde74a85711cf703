"""Line-based automaton files and DOT export.

Format (``#`` starts a comment)::

    functor polynomial            # or: functor powerset [max K]
    symbols f/2 g/1 c/0           # polynomial only
    leaves x y
    outputs 0 1
    states q0 q1
    leaf x -> q0
    trans f(q0,q1) -> q1          # or: trans {q0,q1} -> q1 / trans {} -> q0
    default -> q0                 # optional catch-all
    out q0 -> 1
"""

from __future__ import annotations

from .automata import Automaton
from .errors import AutomatonError, ParseError, SignatureError
from .functor import (
    FinitePowerset,
    Layer,
    Leaf,
    Node,
    Polynomial,
    RankedAlphabet,
    SetNode,
    Signature,
    SymLayer,
    enumerate_layer,
    parse_tree,
    set_layer,
)

_HEADER_KEYS = ("functor", "symbols", "leaves", "outputs", "states")


def _arrow(rest: str, lineno: int) -> tuple[str, str]:
    lhs, sep, rhs = rest.partition("->")
    if not sep:
        raise ParseError("expected '->'", lineno)
    rhs = rhs.strip()
    if not rhs or len(rhs.split()) != 1:
        raise ParseError("expected a single name after '->'", lineno)
    return lhs.strip(), rhs


def parse_layer(text: str, sig: Signature, states) -> Layer:
    """Parse ``f(q0,q1)``, ``c``, ``{q0,q1}`` or ``{}`` over state names."""
    t = parse_tree(text, sig.alphabet, leaves=states, allow_hole=False)
    if isinstance(t, Leaf):
        raise ParseError(f"{text!r} is not a transition source")
    for c in t.children:
        if not isinstance(c, Leaf):
            raise ParseError(f"nested term {text!r} is not a transition source")
    if isinstance(t, Node):
        if not isinstance(sig.functor, Polynomial):
            raise ParseError("symbol layer in a powerset automaton")
        return SymLayer(t.symbol, tuple(c.name for c in t.children))
    assert isinstance(t, SetNode)
    if not isinstance(sig.functor, FinitePowerset):
        raise ParseError("set layer in a polynomial automaton")
    return set_layer(c.name for c in t.children)


def parse_automaton(text: str, cap: int | None = None) -> Automaton:
    """Parse and validate an automaton.  Errors carry a line number."""
    header: dict[str, tuple[int, str]] = {}
    body: list[tuple[int, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword in _HEADER_KEYS:
            if keyword in header:
                raise ParseError(f"duplicate {keyword!r} declaration", lineno)
            header[keyword] = (lineno, rest)
        elif keyword in ("leaf", "trans", "out") or line.startswith("default"):
            if line.startswith("default"):
                keyword, rest = "default", line[len("default"):].strip()
            body.append((lineno, keyword, rest))
        else:
            raise ParseError(f"unknown keyword {keyword!r}", lineno)

    for key in ("functor", "leaves", "states"):
        if key not in header:
            raise ParseError(f"missing {key!r} declaration")
    lineno, ftext = header["functor"]
    words = ftext.split()
    if words == ["polynomial"]:
        if "symbols" not in header:
            raise ParseError("polynomial functor needs a 'symbols' line", lineno)
        sl, stext = header["symbols"]
        try:
            functor = Polynomial(RankedAlphabet.parse(stext))
        except SignatureError as exc:
            raise ParseError(str(exc), sl) from None
    elif words and words[0] == "powerset":
        if "symbols" in header:
            raise ParseError("powerset functor takes no symbols", header["symbols"][0])
        if len(words) == 1:
            functor = FinitePowerset()
        elif len(words) == 3 and words[1] == "max" and words[2].isdigit():
            functor = FinitePowerset(int(words[2]))
        else:
            raise ParseError(f"bad functor declaration {ftext!r}", lineno)
    else:
        raise ParseError(f"bad functor declaration {ftext!r}", lineno)

    outputs = tuple(header["outputs"][1].split()) if "outputs" in header else ("0", "1")
    sig = Signature(functor, tuple(header["leaves"][1].split()), outputs)
    try:
        sig.validate()
    except SignatureError as exc:
        raise ParseError(str(exc), header["leaves"][0]) from None
    sl, stext = header["states"]
    states = tuple(stext.split())
    if not states:
        raise ParseError("no states declared", sl)
    if len(set(states)) != len(states):
        raise ParseError("duplicate state name", sl)
    stateset = set(states)

    leaf_init: dict[str, str] = {}
    trans: dict[Layer, str] = {}
    output: dict[str, str] = {}
    default = None
    default_line = None
    for lineno, keyword, rest in body:
        lhs, rhs = _arrow(rest, lineno)
        if rhs not in stateset and keyword != "out":
            raise ParseError(f"unknown state {rhs!r}", lineno)
        if keyword == "leaf":
            if lhs not in sig.leaves:
                raise ParseError(f"unknown leaf {lhs!r}", lineno)
            if lhs in leaf_init:
                raise ParseError(f"leaf {lhs!r} assigned twice", lineno)
            leaf_init[lhs] = rhs
        elif keyword == "trans":
            try:
                layer = parse_layer(lhs, sig, states)
            except ParseError as exc:
                raise ParseError(str(exc), lineno) from None
            if layer in trans:
                raise ParseError(f"transition {layer} defined twice", lineno)
            if (
                isinstance(functor, FinitePowerset)
                and functor.max_branch is not None
                and len(layer.items) > functor.max_branch
            ):
                raise ParseError(f"{layer} exceeds max branch {functor.max_branch}", lineno)
            trans[layer] = rhs
        elif keyword == "out":
            if lhs not in stateset:
                raise ParseError(f"unknown state {lhs!r}", lineno)
            if rhs not in sig.outputs:
                raise ParseError(f"unknown output value {rhs!r}", lineno)
            if lhs in output:
                raise ParseError(f"output of {lhs!r} given twice", lineno)
            output[lhs] = rhs
        else:
            if lhs:
                raise ParseError("expected 'default -> state'", lineno)
            if default is not None:
                raise ParseError("duplicate default clause", lineno)
            default, default_line = rhs, lineno

    kwargs = {} if cap is None else {"cap": cap}
    aut = Automaton(sig, states, leaf_init, trans, output, default, **kwargs)
    try:
        aut.validate()
    except AutomatonError as exc:
        # point at the declaration the missing item belongs to
        msg = str(exc)
        if "no transition" in msg:
            line = default_line or header["states"][0]
        elif "initial state" in msg:
            line = header["leaves"][0]
        else:
            line = header["states"][0]
        raise ParseError(msg, line) from None
    return aut


def format_automaton(aut: Automaton, comments: dict[str, str] | None = None) -> str:
    """Print ``aut`` with every transition explicit."""
    sig = aut.signature
    lines = [f"functor {sig.functor}"]
    if sig.alphabet is not None:
        lines.append(f"symbols {sig.alphabet}")
    lines.append("leaves " + " ".join(sig.leaves))
    lines.append("outputs " + " ".join(sig.outputs))
    lines.append("states " + " ".join(aut.states))
    if comments:
        for q in aut.states:
            if q in comments:
                lines.append(f"# {q} = {comments[q]}")
    for x in sig.leaves:
        lines.append(f"leaf {x} -> {aut.leaf_init[x]}")
    for layer in enumerate_layer(aut.functor, aut.states, aut.cap):
        lines.append(f"trans {layer} -> {aut.delta(layer)}")
    for q in aut.states:
        lines.append(f"out {q} -> {aut.output[q]}")
    return "\n".join(lines) + "\n"


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(aut: Automaton) -> str:
    """Graphviz rendering.

    States are nodes labelled ``name/output``.  Unary symbol transitions
    are plain edges; every other layer gets a small surrogate node with
    numbered edges from its arguments (a hyperedge).
    """
    out = ["digraph automaton {", "  rankdir=LR;"]
    for q in aut.states:
        out.append(f"  {_quote('s:' + q)} [shape=circle, label={_quote(q + '/' + aut.output[q])}];")
    for x in aut.signature.leaves:
        out.append(f"  {_quote('l:' + x)} [shape=plaintext, label={_quote(x)}];")
        out.append(f"  {_quote('l:' + x)} -> {_quote('s:' + aut.leaf_init[x])};")
    for n, layer in enumerate(enumerate_layer(aut.functor, aut.states, aut.cap)):
        target = aut.delta(layer)
        if isinstance(layer, SymLayer) and len(layer.args) == 1:
            out.append(
                f"  {_quote('s:' + layer.args[0])} -> {_quote('s:' + target)} "
                f"[label={_quote(layer.symbol)}];"
            )
            continue
        hub = _quote(f"t{n}")
        label = layer.symbol if isinstance(layer, SymLayer) else str(layer)
        out.append(f"  {hub} [shape=box, style=rounded, fontsize=10, label={_quote(label)}];")
        args = layer.args if isinstance(layer, SymLayer) else layer.items
        for i, q in enumerate(args):
            attr = f" [label={_quote(str(i + 1))}]" if isinstance(layer, SymLayer) else ""
            out.append(f"  {_quote('s:' + q)} -> {hub}{attr};")
        out.append(f"  {hub} -> {_quote('s:' + target)};")
    out.append("}")
    return "\n".join(out) + "\n"

