"""Bottom-up CKY chart parsing with inside scores, production instances,
Viterbi extraction, and the outside pass.

Every (start, length) span has two cells: a binary-layer cell holding
nodes built by binary rules (at length 1: the terminal itself plus the
preterminals built by terminal-child rules) and a unary-layer cell built
by applying nonterminal-child unary rules once to the binary layer.  This
doubling bounds unary derivation to one branch in a row and removes any
need for unary closure.

Each node keeps the full list of production instances that built it.  A
node's inside score and Viterbi backpointer are computed when its cell
completes, reducing the instances in a canonical order (split point, then
left child name, then right child name) so that any construction strategy
that produces the same instances produces bit-identical scores, and so
Viterbi ties break deterministically toward the smaller split point and
lexicographically smaller rule.
"""

import time

from .errors import ParseFailureError, UnknownTerminalError
from .logmath import LOG_ZERO, logadd, logsum
from .symbols import terminal

BINARY_LAYER = "b"
UNARY_LAYER = "u"


class ParseStats:
    """Work counters for one parse (or several retry attempts merged)."""

    __slots__ = ("productions_examined", "retries", "elapsed")

    def __init__(self, productions_examined=0, retries=0, elapsed=0.0):
        self.productions_examined = productions_examined
        self.retries = retries
        self.elapsed = elapsed

    def add(self, other):
        self.productions_examined += other.productions_examined
        self.retries += other.retries
        self.elapsed += other.elapsed
        return self

    def __repr__(self):
        return ("ParseStats(productions=%d, retries=%d, elapsed=%.4fs)"
                % (self.productions_examined, self.retries, self.elapsed))


class ProductionInstance:
    """One rule application: parent node, child node(s), split point.

    ``right`` is None for unary and lexical applications.  ``outside`` is
    the parent's outside score, filled in by ``inside_outside``; the
    instance's own inside-outside mass is ``outside + inside_contrib``.
    """

    __slots__ = ("parent", "left", "right", "logp", "split",
                 "inside_contrib", "outside")

    def __init__(self, parent, left, right, logp, split):
        self.parent = parent
        self.left = left
        self.right = right
        self.logp = logp
        self.split = split
        contrib = logp + left.inside
        if right is not None:
            contrib += right.inside
        self.inside_contrib = contrib
        self.outside = LOG_ZERO

    def sort_key(self):
        return (self.split if self.split is not None else -1,
                self.left.symbol.name,
                self.right.symbol.name if self.right is not None else "")

    def survivor_key(self):
        """Identity used by multiple-pass gating: symbols, span, split."""
        p = self.parent
        return (p.symbol, self.left.symbol,
                self.right.symbol if self.right is not None else None,
                p.start, self.split, p.length)


class Node:
    """A (symbol, span) entry in one chart layer.

    ``inside``, ``viterbi``, and ``prior`` are base-2 logs.  ``active``
    is cleared by the thresholding hooks; inactive nodes feed no further
    productions but keep the scores they accumulated.
    """

    __slots__ = ("symbol", "start", "length", "layer", "prior", "inside",
                 "viterbi", "best", "active", "instances", "outside")

    def __init__(self, symbol, start, length, layer, prior):
        self.symbol = symbol
        self.start = start
        self.length = length
        self.layer = layer
        self.prior = prior
        self.inside = LOG_ZERO
        self.viterbi = LOG_ZERO
        self.best = None
        self.active = True
        self.instances = []
        self.outside = LOG_ZERO

    @property
    def key(self):
        return (self.symbol, self.start, self.length)

    def finalize(self):
        self.instances.sort(key=ProductionInstance.sort_key)
        self.inside = logsum(inst.inside_contrib for inst in self.instances)
        best = LOG_ZERO
        best_inst = None
        for inst in self.instances:
            v = inst.logp + inst.left.viterbi
            if inst.right is not None:
                v += inst.right.viterbi
            if v > best:
                best = v
                best_inst = inst
        self.viterbi = best
        self.best = best_inst

    def __repr__(self):
        return "<Node %s (%d,%d)%s inside=%.4f%s>" % (
            self.symbol.name, self.start, self.length, self.layer,
            self.inside, "" if self.active else " pruned")


def _axiom(symbol, start):
    node = Node(symbol, start, 1, BINARY_LAYER, 0.0)
    node.inside = 0.0
    node.viterbi = 0.0
    return node


class Chart:
    def __init__(self, n, sentence, root_symbol):
        self.n = n
        self.sentence = sentence  # list of terminal Symbols, positions 1..n
        self.root_symbol = root_symbol
        self.binary_cells = {}
        self.unary_cells = {}
        self.stats = ParseStats()

    def cell(self, start, length, layer):
        cells = self.binary_cells if layer == BINARY_LAYER else self.unary_cells
        return cells.get((start, length), {})

    def span_nodes(self, start, length, active_only=True, skip_terminals=False):
        """Nodes over a span, binary layer first, cell insertion order."""
        out = []
        for cells in (self.binary_cells, self.unary_cells):
            for node in cells.get((start, length), {}).values():
                if active_only and not node.active:
                    continue
                if skip_terminals and node.symbol.is_terminal:
                    continue
                out.append(node)
        return out

    def iter_nodes(self, max_length=None, active_only=False,
                   skip_terminals=True):
        """All nodes, shortest spans first, deterministic order."""
        top = self.n if max_length is None else max_length
        for length in range(1, top + 1):
            for start in range(1, self.n - length + 2):
                for node in self.span_nodes(start, length, active_only,
                                            skip_terminals):
                    yield node

    def root_nodes(self):
        out = []
        for cells in (self.binary_cells, self.unary_cells):
            node = cells.get((1, self.n), {}).get(self.root_symbol)
            if node is not None:
                out.append(node)
        return out

    def has_parse(self):
        return bool(self.root_nodes())


def parse_inside(grammar, sentence, hooks=None, gates=None):
    """Fill a chart bottom-up.

    ``hooks``: object with ``after_cell(chart, start, length)`` and
    ``after_length(chart, length)``, or None; this is where beam and
    global thresholding plug in.  ``gates``: object with ``lexical``,
    ``unary`` and ``binary`` predicates consulted before a production is
    applied (multiple-pass parsing), or None.

    A missing root is not an error; the returned chart simply has no
    parse.  Unknown terminals raise.
    """
    syms = [terminal(tok) if isinstance(tok, str) else tok
            for tok in sentence]
    if not syms:
        raise UnknownTerminalError("empty sentence")
    for sym in syms:
        if sym not in grammar.terminals:
            raise UnknownTerminalError("unknown terminal %r" % sym.name)
    n = len(syms)
    chart = Chart(n, syms, grammar.start_symbol_for(syms))
    stats = chart.stats
    started = time.perf_counter()

    lexical_for = grammar.lexical_by_terminal.get
    unary_for = grammar.unary_by_child.get
    by_left = grammar.binary_by_left.get
    priors = grammar.priors

    def apply_unaries(bcell, start, length):
        ucell = {}
        for bnode in list(bcell.values()):
            sym = bnode.symbol
            if sym.is_terminal:
                continue
            entries = unary_for(sym)
            if not entries:
                continue
            for parent, logp in entries:
                if gates is not None and not gates.unary(parent, bnode):
                    continue
                stats.productions_examined += 1
                node = ucell.get(parent)
                if node is None:
                    node = Node(parent, start, length, UNARY_LAYER,
                                priors[parent])
                    ucell[parent] = node
                node.instances.append(
                    ProductionInstance(node, bnode, None, logp, None))
        for node in ucell.values():
            node.finalize()
        return ucell

    # length 1: terminal axiom, preterminals, then the unary layer
    for start in range(1, n + 1):
        t = syms[start - 1]
        bcell = {t: _axiom(t, start)}
        axiom = bcell[t]
        for parent, logp in lexical_for(t, ()):
            if gates is not None and not gates.lexical(parent, start):
                continue
            stats.productions_examined += 1
            node = bcell.get(parent)
            if node is None:
                node = Node(parent, start, 1, BINARY_LAYER, priors[parent])
                bcell[parent] = node
            node.instances.append(
                ProductionInstance(node, axiom, None, logp, None))
        for node in bcell.values():
            if not node.symbol.is_terminal:
                node.finalize()
        chart.binary_cells[(start, 1)] = bcell
        chart.unary_cells[(start, 1)] = apply_unaries(bcell, start, 1)
        if hooks is not None:
            hooks.after_cell(chart, start, 1)
    if hooks is not None:
        hooks.after_length(chart, 1)

    for length in range(2, n + 1):
        for start in range(1, n - length + 2):
            end = start + length - 1
            bcell = {}
            for split in range(start, end):
                left_nodes = chart.span_nodes(start, split - start + 1)
                if not left_nodes:
                    continue
                right_map = {}
                for rnode in chart.span_nodes(split + 1, end - split):
                    right_map.setdefault(rnode.symbol, []).append(rnode)
                if not right_map:
                    continue
                for lnode in left_nodes:
                    by_right = by_left(lnode.symbol)
                    if not by_right:
                        continue
                    # join through the smaller side
                    if len(by_right) <= len(right_map):
                        pairs = ((rsym, right_map.get(rsym), entries)
                                 for rsym, entries in by_right.items())
                    else:
                        pairs = ((rsym, rnodes, by_right.get(rsym))
                                 for rsym, rnodes in right_map.items())
                    for rsym, rnodes, entries in pairs:
                        if not rnodes or not entries:
                            continue
                        for rnode in rnodes:
                            for parent, logp in entries:
                                if gates is not None and not gates.binary(
                                        parent, lnode, rnode,
                                        start, split, length):
                                    continue
                                stats.productions_examined += 1
                                node = bcell.get(parent)
                                if node is None:
                                    node = Node(parent, start, length,
                                                BINARY_LAYER, priors[parent])
                                    bcell[parent] = node
                                node.instances.append(ProductionInstance(
                                    node, lnode, rnode, logp, split))
            for node in bcell.values():
                node.finalize()
            chart.binary_cells[(start, length)] = bcell
            chart.unary_cells[(start, length)] = \
                apply_unaries(bcell, start, length)
            if hooks is not None:
                hooks.after_cell(chart, start, length)
        if hooks is not None:
            hooks.after_length(chart, length)

    stats.elapsed = time.perf_counter() - started
    return chart


def total_inside(chart):
    """Inside score of the start symbol over the whole sentence (log2);
    -inf when the chart has no root."""
    total = LOG_ZERO
    for node in chart.root_nodes():
        total = logadd(total, node.inside)
    return total


def sentence_entropy(chart):
    """Negative log2 of the surviving inside mass, in bits; +inf on a
    failed parse."""
    ti = total_inside(chart)
    if ti == LOG_ZERO:
        return float("inf")
    return -ti


def viterbi_tree(chart):
    """Tree of the highest-scoring derivation, built from the recorded
    backpointers.  Ties were already broken canonically at finalize."""
    from .trees import Tree

    roots = chart.root_nodes()
    if not roots:
        raise ParseFailureError("no parse for this sentence")
    best = roots[0]
    for cand in roots[1:]:
        if cand.viterbi > best.viterbi:
            best = cand

    def build(node):
        inst = node.best
        if inst.right is None:
            child = inst.left
            if child.symbol.is_terminal:
                return Tree(node.symbol, [Tree(child.symbol)])
            return Tree(node.symbol, [build(child)])
        kids = []
        for child in (inst.left, inst.right):
            if child.symbol.is_terminal:
                kids.append(Tree(child.symbol))
            else:
                kids.append(build(child))
        return Tree(node.symbol, kids)

    return build(best)


def viterbi_logprob(chart):
    """Log2 probability of the Viterbi derivation; -inf without a parse."""
    roots = chart.root_nodes()
    if not roots:
        return LOG_ZERO
    return max(node.viterbi for node in roots)


def inside_outside(chart):
    """Annotate outside scores top-down over active production instances.

    The root gets outside 1.  Within a span, the unary layer distributes
    before the binary layer (a unary parent's child lives in the same
    span's binary cell).  Instances whose parent or children were pruned
    are skipped and keep outside -inf.
    """
    if not chart.has_parse():
        raise ParseFailureError("cannot run the outside pass on a failed "
                                "parse")
    n = chart.n
    for cells in (chart.binary_cells, chart.unary_cells):
        for cell in cells.values():
            for node in cell.values():
                node.outside = LOG_ZERO
                for inst in node.instances:
                    inst.outside = LOG_ZERO
    for root in chart.root_nodes():
        root.outside = 0.0

    for length in range(n, 0, -1):
        for start in range(1, n - length + 2):
            for cells in (chart.unary_cells, chart.binary_cells):
                cell = cells.get((start, length))
                if not cell:
                    continue
                for node in cell.values():
                    if node.symbol.is_terminal or not node.active:
                        continue
                    alpha = node.outside
                    if alpha == LOG_ZERO:
                        continue
                    for inst in node.instances:
                        left, right = inst.left, inst.right
                        if not left.active or \
                                (right is not None and not right.active):
                            continue
                        inst.outside = alpha
                        if right is None:
                            left.outside = logadd(
                                left.outside, alpha + inst.logp)
                        else:
                            left.outside = logadd(
                                left.outside,
                                alpha + inst.logp + right.inside)
                            right.outside = logadd(
                                right.outside,
                                alpha + inst.logp + left.inside)
    return chart
