"""Interned grammar symbols.

A symbol is either a terminal (a bare token such as a part-of-speech tag)
or a nonterminal.  Nonterminals carry three optional decorations produced
by the tree transforms:

  * ``primed``     -- right-chain symbol introduced by binarization,
                      rendered with a trailing apostrophe: ``X'``;
  * ``subscript``  -- up to five upcoming sibling labels carried by a
                      primed chain symbol: ``X'_B,C,D``;
  * ``post_unary`` -- marks the child of a unary production so that no
                      two nonterminal unary branches can chain, rendered
                      ``X^u``.

The characters ``' ^ _ , + ( )`` and whitespace are reserved and may not
appear in base labels read from data (``+`` joins collapsed unary-chain
labels and is introduced only by the transforms).
"""

TERMINAL = "t"
NONTERMINAL = "n"

MAX_SUBSCRIPT = 5
CHAIN_JOIN = "+"

_intern = {}


class Symbol:
    __slots__ = ("kind", "base", "primed", "post_unary", "subscript", "name")

    def __init__(self, kind, base, primed, post_unary, subscript, name):
        self.kind = kind
        self.base = base
        self.primed = primed
        self.post_unary = post_unary
        self.subscript = subscript
        self.name = name

    @property
    def is_terminal(self):
        return self.kind == TERMINAL

    def __repr__(self):
        return "<%s %s>" % ("T" if self.is_terminal else "NT", self.name)

    def __str__(self):
        return self.name

    # Interning makes identity comparison valid; these exist so symbols
    # also behave sanely if pickled or otherwise duplicated.
    def __eq__(self, other):
        return self is other or (
            isinstance(other, Symbol)
            and self.kind == other.kind
            and self.name == other.name
        )

    def __hash__(self):
        return hash((self.kind, self.name))


def _render(base, primed, post_unary, subscript):
    name = base
    if primed:
        name += "'"
    if post_unary:
        name += "^u"
    if subscript:
        name += "_" + ",".join(subscript)
    return name


def _get(kind, base, primed, post_unary, subscript):
    key = (kind, base, primed, post_unary, subscript)
    sym = _intern.get(key)
    if sym is None:
        sym = Symbol(kind, base, primed, post_unary, subscript,
                     _render(base, primed, post_unary, subscript))
        _intern[key] = sym
    return sym


def terminal(token):
    """Terminal symbol for a token.  Terminals carry no decorations."""
    return _get(TERMINAL, token, False, False, ())


def nonterminal(base, primed=False, post_unary=False, subscript=()):
    subscript = tuple(subscript)
    if len(subscript) > MAX_SUBSCRIPT:
        raise ValueError("subscript longer than %d: %r"
                         % (MAX_SUBSCRIPT, subscript))
    return _get(NONTERMINAL, base, primed, post_unary, subscript)


def parse_nonterminal(text):
    """Parse a rendered nonterminal name back into a Symbol."""
    base = text
    subscript = ()
    if "_" in base:
        base, _, subs = base.partition("_")
        subscript = tuple(subs.split(",")) if subs else ()
    post_unary = base.endswith("^u")
    if post_unary:
        base = base[:-2]
    primed = base.endswith("'")
    if primed:
        base = base[:-1]
    if not base:
        raise ValueError("empty symbol name in %r" % text)
    return nonterminal(base, primed, post_unary, subscript)
