"""Multiple-pass parsing: a cheap first pass computes inside-outside
scores; its nodes and production instances gate what the expensive pass
may build, through the descendants map.

Survivor identities are (symbols, span, split) tuples, never object
references, so a later pass can test its candidate productions in O(1):
a production P -> L R over (start, split, length) is admitted when the
ancestor production (anc P) -> (anc L) (anc R) over the same span and
split survived the previous pass, where ancestors are resolved per cell
through the descendants map (terminals are their own ancestors).
"""

from dataclasses import dataclass, field

from .chart import ParseStats, inside_outside, total_inside
from .errors import UnparsableSentenceError
from .logmath import LOG_ZERO, log2prob, logadd
from .symbols import terminal
from .thresholding import ZERO_THRESHOLDS, parse_with_retry


@dataclass
class PassSpec:
    """One pass of a pipeline.  ``descendants`` maps the previous pass's
    nonterminals to this pass's and is absent for the first pass.  The
    ``mp_node``/``mp_prod`` ratios of this pass's thresholds gate the
    *next* pass."""

    grammar: object
    thresholds: object = ZERO_THRESHOLDS
    descendants: object = None
    use_prior: bool = True
    max_retries: int = 12
    divisor: float = 5.0
    loosen_gates_on_retry: bool = False


@dataclass
class SurvivorTable:
    """Nodes and production instances of a pass that passed the gates,
    keyed by symbols and span.  Carries the source chart and thresholds
    so gates can be re-extracted looser if a later pass dead-ends."""

    surviving_nodes: set
    surviving_prods: set
    stats: ParseStats
    root_inside: float
    chart: object = None
    mp_node: float = 0.0
    mp_prod: float = 0.0


def extract_survivors(chart, mp_node, mp_prod, stats=None):
    """Gate nodes on inside*outside / root_inside >= mp_node and
    production instances on their combined inside-outside mass
    (outside(parent) * p(rule) * inside(children)) / root_inside >=
    mp_prod.  Both gates apply; surviving productions are additionally
    restricted to those whose parent node survived."""
    root = total_inside(chart)
    cut_node = log2prob(mp_node)
    cut_prod = log2prob(mp_prod)

    node_mass = {}
    for node in chart.iter_nodes(skip_terminals=True):
        prev = node_mass.get(node.key, LOG_ZERO)
        node_mass[node.key] = logadd(prev, node.outside + node.inside)
    nodes = {key for key, mass in node_mass.items()
             if mass - root >= cut_node}

    prods = set()
    for node in chart.iter_nodes(skip_terminals=True):
        if node.key not in nodes:
            continue
        for inst in node.instances:
            if inst.outside + inst.inside_contrib - root >= cut_prod:
                left, right = inst.left, inst.right
                if not left.symbol.is_terminal and left.key not in nodes:
                    continue
                if right is not None and not right.symbol.is_terminal \
                        and right.key not in nodes:
                    continue
                prods.add(inst.survivor_key())
    return SurvivorTable(nodes, prods, stats or chart.stats, root, chart,
                         mp_node, mp_prod)


def first_pass(spec, sentence):
    """Parse with the first-pass grammar (retry policy active), run the
    outside pass, and extract the survivor table."""
    chart, stats = parse_with_retry(
        spec.grammar, sentence, spec.thresholds,
        max_retries=spec.max_retries, divisor=spec.divisor,
        use_prior=spec.use_prior)
    if not chart.has_parse():
        raise UnparsableSentenceError("first pass found no parse")
    inside_outside(chart)
    return extract_survivors(chart, spec.thresholds.mp_node,
                             spec.thresholds.mp_prod, stats)


class DescendantGates:
    """Production gates for one sentence of one pass, closed over the
    previous pass's survivor table and the descendants map."""

    def __init__(self, dmap, sentence_syms, survivors):
        self.dmap = dmap
        self.sentence = sentence_syms  # positions 1..n
        self.nodes = survivors.surviving_nodes
        self.prods = survivors.surviving_prods
        self._anc = {}

    def ancestor(self, sym, start):
        key = (sym, start)
        anc = self._anc.get(key, self)
        if anc is self:
            anc = self.dmap.ancestor(sym, self.sentence[start - 1])
            self._anc[key] = anc
        return anc

    def lexical(self, parent, start):
        anc = self.ancestor(parent, start)
        if anc is None or (anc, start, 1) not in self.nodes:
            return False
        t = self.sentence[start - 1]
        return (anc, t, None, start, None, 1) in self.prods

    def unary(self, parent, child_node):
        start, length = child_node.start, child_node.length
        anc_p = self.ancestor(parent, start)
        if anc_p is None or (anc_p, start, length) not in self.nodes:
            return False
        anc_c = self.ancestor(child_node.symbol, start)
        if anc_c is None:
            return False
        return (anc_p, anc_c, None, start, None, length) in self.prods

    def binary(self, parent, lnode, rnode, start, split, length):
        anc_p = self.ancestor(parent, start)
        if anc_p is None or (anc_p, start, length) not in self.nodes:
            return False
        lsym = lnode.symbol
        anc_l = lsym if lsym.is_terminal else self.ancestor(lsym, start)
        if anc_l is None:
            return False
        rsym = rnode.symbol
        anc_r = rsym if rsym.is_terminal else self.ancestor(rsym, split + 1)
        if anc_r is None:
            return False
        return (anc_p, anc_l, anc_r, start, split, length) in self.prods


def second_pass(spec, sentence, survivors):
    """Parse with this pass's grammar, building only descendants of
    surviving previous-pass productions.  On failure this pass's beam and
    global thresholds loosen (factor ``divisor``); the previous pass is
    never rerun.  The multipass gates themselves loosen only when
    ``loosen_gates_on_retry`` is set, by re-extracting survivors from the
    saved previous-pass chart."""
    syms = [terminal(tok) if isinstance(tok, str) else tok
            for tok in sentence]
    merged = ParseStats()

    def attempt(table, thresholds, max_retries):
        gates = DescendantGates(spec.descendants, syms, table)
        return parse_with_retry(
            spec.grammar, sentence, thresholds,
            max_retries=max_retries, divisor=spec.divisor,
            use_prior=spec.use_prior, gates=gates)

    try:
        chart, stats = attempt(survivors, spec.thresholds, spec.max_retries)
        merged.add(stats)
        if chart.has_parse() or not spec.loosen_gates_on_retry:
            merged.retries = stats.retries
            return chart, merged
    except UnparsableSentenceError:
        if not spec.loosen_gates_on_retry:
            raise
    if survivors.chart is None:
        raise UnparsableSentenceError(
            "second pass failed and no first-pass chart is available "
            "to loosen the gates")

    retries = merged.retries
    for step in range(1, spec.max_retries + 1):
        if step == spec.max_retries:
            node_t = prod_t = 0.0
        else:
            node_t = survivors.mp_node / spec.divisor ** step
            prod_t = survivors.mp_prod / spec.divisor ** step
        looser = extract_survivors(survivors.chart, node_t, prod_t)
        try:
            chart, stats = attempt(looser, ZERO_THRESHOLDS, 0)
        except UnparsableSentenceError:
            chart, stats = None, None
            raise
        merged.add(stats)
        retries += 1 + stats.retries
        if chart.has_parse():
            merged.retries = retries
            return chart, merged
        if node_t == 0.0 and prod_t == 0.0:
            raise UnparsableSentenceError(
                "no parse even with fully open multipass gates")
    raise UnparsableSentenceError("multipass gate loosening exhausted")


def run_passes(specs, sentence):
    """Run an ordered pass pipeline; returns the last pass's chart and
    the work summed over every pass (and every retry within them)."""
    if not specs:
        raise ValueError("empty pass pipeline")
    agg = ParseStats()
    survivors = None
    for idx, spec in enumerate(specs):
        last = idx == len(specs) - 1
        if survivors is None:
            chart, stats = parse_with_retry(
                spec.grammar, sentence, spec.thresholds,
                max_retries=spec.max_retries, divisor=spec.divisor,
                use_prior=spec.use_prior)
        else:
            chart, stats = second_pass(spec, sentence, survivors)
        agg.add(stats)
        if last:
            return chart, agg
        if not chart.has_parse():
            raise UnparsableSentenceError(
                "pass %d found no parse" % (idx + 1))
        inside_outside(chart)
        survivors = extract_survivors(chart, spec.thresholds.mp_node,
                                      spec.thresholds.mp_prod)
    raise AssertionError("unreachable")
