"""Tree transforms: binarization and the terminal-prime relabeling.

``binarize`` turns arbitrary treebank trees into the restricted binary
form the parser works with:

  1. maximal runs of two or more consecutive unary nodes collapse into a
     single node whose label joins the run's labels with ``+``;
  2. the (nonterminal) child of every remaining unary node is relabeled
     with the ``^u`` marker, so that in the induced grammar the child of
     a unary rule can never head another nonterminal unary rule;
  3. nodes with three or more children are rewritten right-branching,
     introducing primed chain symbols that carry the next (up to five)
     sibling labels as a subscript.

All transforms build fresh trees; inputs are never mutated.
``debinarize`` inverts the three steps exactly.
"""

from . import symbols
from .trees import Tree


def binarize(tree, max_subscript=symbols.MAX_SUBSCRIPT):
    """Collapse unary runs, mark unary children, binarize long nodes."""
    return _binarize_arity(_mark_unary_children(_collapse_chains(tree), False),
                           max_subscript)


def _copy_leaf(leaf):
    return Tree(leaf.label, (), leaf.payload)


def _is_unary_internal(node):
    return not node.is_leaf and len(node.children) == 1


def _collapse_chains(node):
    if node.is_leaf:
        return _copy_leaf(node)
    if _is_unary_internal(node):
        run = [node]
        cur = node.children[0]
        while _is_unary_internal(cur):
            run.append(cur)
            cur = cur.children[0]
        if len(run) >= 2:
            base = symbols.CHAIN_JOIN.join(r.label.base for r in run)
            return Tree(symbols.nonterminal(base), [_collapse_chains(cur)])
    return Tree(node.label, [_collapse_chains(c) for c in node.children])


def _mark_unary_children(node, as_unary_child):
    if node.is_leaf:
        return _copy_leaf(node)
    label = node.label
    if as_unary_child and not label.post_unary:
        label = symbols.nonterminal(label.base, label.primed, True,
                                    label.subscript)
    mark_child = len(node.children) == 1 and not node.children[0].is_leaf
    return Tree(label, [_mark_unary_children(c, mark_child)
                        for c in node.children])


def _binarize_arity(node, max_subscript):
    if node.is_leaf:
        return _copy_leaf(node)
    kids = [_binarize_arity(c, max_subscript) for c in node.children]
    if len(kids) <= 2:
        return Tree(node.label, kids)
    return Tree(node.label,
                [kids[0], _chain(node.label.base, kids, 1, max_subscript)])


def _chain(base, kids, i, max_subscript):
    remaining = len(kids) - i
    sub = tuple(k.label.name for k in kids[i:i + max_subscript])
    label = symbols.nonterminal(base, primed=True, subscript=sub)
    if remaining == 2:
        return Tree(label, [kids[i], kids[i + 1]])
    return Tree(label, [kids[i], _chain(base, kids, i + 1, max_subscript)])


def debinarize(node):
    """Invert ``binarize``: splice primed chains back into their parent,
    strip ``^u`` markers, and re-expand ``+``-joined unary runs."""
    if node.is_leaf:
        return _copy_leaf(node)
    kids = []
    for child in node.children:
        flat = debinarize(child)
        if not flat.is_leaf and flat.label.primed:
            kids.extend(flat.children)
        else:
            kids.append(flat)
    label = node.label
    if label.primed:
        # Parent splices us away; keep the label so it can tell.
        return Tree(label, kids)
    base = label.base
    if symbols.CHAIN_JOIN in base:
        bases = base.split(symbols.CHAIN_JOIN)
        tree = Tree(symbols.nonterminal(bases[-1]), kids)
        for b in reversed(bases[:-1]):
            tree = Tree(symbols.nonterminal(b), [tree])
        return tree
    if label.post_unary:
        label = symbols.nonterminal(base, label.primed, False, label.subscript)
    return Tree(label, kids)


def to_terminal_prime(tree):
    """Relabel a binarized tree so every internal node names the first
    terminal of its span (uppercased), keeping the primed and post-unary
    markers of the original label.  The result induces the cheap
    first-pass grammar."""
    for sub in tree.subtrees():
        if len(sub.children) > 2:
            raise ValueError("tree is not binarized: %s has %d children"
                             % (sub.label.name, len(sub.children)))
    return _relabel_tp(tree)[0]


def _relabel_tp(node):
    if node.is_leaf:
        return _copy_leaf(node), node.label
    new_kids = []
    first = None
    for child in node.children:
        new_child, child_first = _relabel_tp(child)
        new_kids.append(new_child)
        if first is None:
            first = child_first
    old = node.label
    label = symbols.nonterminal(first.base.upper(), old.primed, old.post_unary)
    return Tree(label, new_kids), first
