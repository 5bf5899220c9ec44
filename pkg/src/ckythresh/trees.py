"""Phrase-structure trees and Penn-style bracketed treebank I/O.

Leaves of a tree are terminal symbols (for treebank work these are the
part-of-speech tags); the token each tag covered in the source text is
kept only as an inert payload.  Internal nodes carry nonterminal symbols.
"""

from . import symbols
from .errors import TreebankFormatError


class Tree:
    __slots__ = ("label", "children", "payload")

    def __init__(self, label, children=(), payload=None):
        self.label = label
        self.children = list(children)
        self.payload = payload
        if self.children and label.is_terminal:
            raise ValueError("terminal %s cannot have children" % label.name)

    @property
    def is_leaf(self):
        return not self.children

    def leaves(self):
        """Terminal symbols at the frontier, left to right."""
        if self.is_leaf:
            return [self.label]
        out = []
        stack = [self]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node.label)
            else:
                stack.extend(reversed(node.children))
        return out

    def subtrees(self):
        """All internal nodes, preorder."""
        if self.is_leaf:
            return
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed([c for c in node.children if not c.is_leaf]))

    def bracketed(self):
        """Single-line bracket string.  Leaves with a payload render as
        ``(tag payload)``; bare leaves render as just ``tag``."""
        if self.is_leaf:
            if self.payload is not None:
                return "(%s %s)" % (self.label.name, self.payload)
            return self.label.name
        return "(%s %s)" % (self.label.name,
                            " ".join(c.bracketed() for c in self.children))

    def __eq__(self, other):
        if not isinstance(other, Tree):
            return NotImplemented
        if self.label != other.label or self.payload != other.payload:
            return False
        if len(self.children) != len(other.children):
            return False
        return all(a == b for a, b in zip(self.children, other.children))

    def __hash__(self):
        return hash((self.label, self.payload,
                     tuple(hash(c) for c in self.children)))

    def __repr__(self):
        return "Tree(%s)" % self.bracketed()


def leaf(tag, payload=None):
    return Tree(symbols.terminal(tag), (), payload)


def node(label, children):
    if isinstance(label, str):
        label = symbols.parse_nonterminal(label)
    return Tree(label, children)


def _tokenize(stream):
    """Yield (token, line_number) with parens split out."""
    for lineno, line in enumerate(stream, start=1):
        if line.lstrip().startswith("#"):
            continue
        for piece in line.replace("(", " ( ").replace(")", " ) ").split():
            yield piece, lineno


def read_treebank(stream):
    """Read every top-level bracketed tree from a text stream.

    Accepts the usual Penn conventions: one or more trees, possibly spread
    over multiple lines, each optionally inside an unlabeled arity-1
    wrapper ``( (S ...) )`` which is silently removed.  Leaves are
    ``(TAG token)``; a bare token inside a constituent is also accepted as
    a payload-free leaf (the form this package itself writes).
    """
    if isinstance(stream, str):
        stream = stream.splitlines(keepends=True)
    tokens = list(_tokenize(stream))
    trees = []
    pos = 0
    while pos < len(tokens):
        tree, pos = _parse_node(tokens, pos, top=True)
        trees.append(tree)
    return trees


def _fail(tokens, pos, message):
    lineno = tokens[pos][1] if pos < len(tokens) else tokens[-1][1]
    raise TreebankFormatError("%s at line %d" % (message, lineno))


def _parse_node(tokens, pos, top=False):
    if tokens[pos][0] != "(":
        _fail(tokens, pos, "expected '('")
    start = pos
    pos += 1
    if pos >= len(tokens):
        _fail(tokens, start, "unbalanced")
    label, _ = tokens[pos]
    if label == ")":
        _fail(tokens, pos, "empty constituent")
    unlabeled = label == "("
    if not unlabeled:
        pos += 1

    items = []  # ("tree", Tree) or ("token", str), in order
    while True:
        if pos >= len(tokens):
            _fail(tokens, start, "unbalanced")
        tok, _ = tokens[pos]
        if tok == ")":
            pos += 1
            break
        if tok == "(":
            child, pos = _parse_node(tokens, pos)
            items.append(("tree", child))
        else:
            if unlabeled:
                _fail(tokens, pos, "unexpected token %r" % tok)
            items.append(("token", tok))
            pos += 1

    if unlabeled:
        if len(items) != 1:
            _fail(tokens, start,
                  "unlabeled constituent with %d children" % len(items))
        return items[0][1], pos
    if not items:
        _fail(tokens, start, "empty constituent")
    if len(items) == 1 and items[0][0] == "token":
        # Penn leaf: (TAG token).  The tag is the terminal, the token an
        # inert payload.
        return Tree(symbols.terminal(label), (), items[0][1]), pos
    children = [it if kind == "tree" else Tree(symbols.terminal(it), ())
                for kind, it in items]
    return Tree(symbols.parse_nonterminal(label), children), pos


def write_treebank(trees, stream):
    for tree in trees:
        stream.write(tree.bracketed())
        stream.write("\n")
