"""PCFG induction, priors, the descendants map, and the grammar file format.

Grammars are immutable once built and safe to share across parses.  Rule
probabilities and priors are kept as base-2 log values; the per-parent
linear sums are validated to 1 +- 1e-9 at construction.

Grammar text format (one record per line, ``#`` comments):

    S startsymbol      start symbol, or ``@first-terminal`` for grammars
                       whose root names the first terminal of the sentence
    P nonterm logprob  prior
    U parent child logprob
    B parent left right logprob

A symbol in a rule is read as a nonterminal when a ``P`` line declares it,
and as a terminal otherwise (every nonterminal has a prior).  Descendants
maps are a separate file of ``D first-pass-sym second-pass-sym`` lines.
"""

from collections import Counter

from . import symbols
from .errors import GrammarFormatError
from .logmath import LOG_ZERO, log2prob
from .symbols import nonterminal, parse_nonterminal, terminal

FIRST_TERMINAL_START = "@first-terminal"

_SUM_TOL = 1e-9


class Grammar:
    """Immutable PCFG with binary, unary, and lexical rules plus priors.

    ``unary`` holds nonterminal-child rules and ``lexical`` terminal-child
    rules; both are unary productions in the file format.  Consumers index
    rules through the prebuilt lookup tables, never by scanning.
    """

    def __init__(self, binary, unary, lexical, priors, start,
                 start_first_terminal=False):
        # rule dicts map (parent, children...) -> log2 probability
        self.binary = dict(binary)
        self.unary = dict(unary)
        self.lexical = dict(lexical)
        self.priors = dict(priors)  # nonterminal -> log2 prior
        self.start = start
        self.start_first_terminal = start_first_terminal

        self.nonterminals = frozenset(self.priors)
        self.terminals = frozenset(
            [t for (_, t) in self.lexical]
            + [c for rule in self.binary for c in rule[1:] if c.is_terminal])
        self._validate()

        def entries(rules, key):
            table = {}
            for rule, logp in sorted(rules.items(),
                                     key=lambda kv: tuple(s.name for s in kv[0])):
                table.setdefault(key(rule), []).append((rule[0], logp))
            return table

        # binary lookups, both directions, for the adaptive inner loop
        self.binary_by_left = {}
        for rule, logp in sorted(self.binary.items(),
                                 key=lambda kv: tuple(s.name for s in kv[0])):
            parent, left, right = rule
            self.binary_by_left.setdefault(left, {}) \
                .setdefault(right, []).append((parent, logp))
        self.unary_by_child = entries(self.unary, lambda r: r[1])
        self.lexical_by_terminal = entries(self.lexical, lambda r: r[1])

    def _validate(self):
        sums = Counter()
        for rules in (self.binary, self.unary, self.lexical):
            for rule, logp in rules.items():
                if not (logp <= 0.0) or logp == LOG_ZERO:
                    raise GrammarFormatError(
                        "rule %s has probability outside (0, 1]"
                        % " ".join(s.name for s in rule))
                sums[rule[0]] += 2.0 ** logp
        for parent, total in sums.items():
            if abs(total - 1.0) > _SUM_TOL:
                raise GrammarFormatError(
                    "probabilities for %s sum to %.12f" % (parent.name, total))
            if parent not in self.priors:
                raise GrammarFormatError("no prior for %s" % parent.name)
        for rule in list(self.unary) + list(self.binary):
            for child in rule[1:]:
                if not child.is_terminal and child not in self.priors:
                    raise GrammarFormatError("no prior for %s" % child.name)
        total = sum(2.0 ** lp for lp in self.priors.values())
        if self.priors and abs(total - 1.0) > _SUM_TOL:
            raise GrammarFormatError("priors sum to %.12f" % total)
        unary_parents = {p for (p, _) in self.unary}
        for parent, child in self.unary:
            if child in unary_parents:
                raise GrammarFormatError(
                    "unary chain: %s -> %s and %s is a unary parent"
                    % (parent.name, child.name, child.name))
        if not self.start_first_terminal and self.start is None:
            raise GrammarFormatError("no start symbol")

    def prior(self, sym):
        return self.priors[sym]

    def start_symbol_for(self, sentence):
        """Root symbol for a sentence; first-terminal grammars name their
        root after the uppercased first terminal."""
        if self.start_first_terminal:
            return nonterminal(sentence[0].base.upper())
        return self.start


def compute_priors(trees):
    """Relative frequency of each nonterminal label over all constituent
    nodes of the (transformed) training trees.  Linear probabilities."""
    counts = Counter()
    total = 0
    for tree in trees:
        for node in tree.subtrees():
            counts[node.label] += 1
            total += 1
    if total == 0:
        raise GrammarFormatError("empty corpus")
    return {sym: c / total for sym, c in counts.items()}


def induce_grammar(trees, first_terminal_root=False):
    """Read a PCFG off transformed (binarized) trees by relative frequency.

    With ``first_terminal_root`` (terminal-prime grammars) the root label
    is not fixed: each sentence's root names its own first terminal.
    Otherwise all training trees must share one root label.
    """
    if not trees:
        raise GrammarFormatError("empty corpus")
    binary = Counter()
    unary = Counter()
    lexical = Counter()
    parents = Counter()
    roots = set()
    for tree in trees:
        roots.add(tree.label)
        for node in tree.subtrees():
            kids = node.children
            parents[node.label] += 1
            if len(kids) == 1:
                child = kids[0]
                if child.is_leaf:
                    lexical[(node.label, child.label)] += 1
                else:
                    unary[(node.label, child.label)] += 1
            elif len(kids) == 2:
                binary[(node.label, kids[0].label, kids[1].label)] += 1
            else:
                raise GrammarFormatError(
                    "tree not binarized: %s has %d children"
                    % (node.label.name, len(kids)))
    start = None
    if not first_terminal_root:
        if len(roots) != 1:
            raise GrammarFormatError(
                "training trees have %d distinct root labels: %s"
                % (len(roots), ", ".join(sorted(r.name for r in roots))))
        start = next(iter(roots))

    def probs(counts):
        return {rule: log2prob(c / parents[rule[0]])
                for rule, c in counts.items()}

    priors = {sym: log2prob(p) for sym, p in compute_priors(trees).items()}
    return Grammar(probs(binary), probs(unary), probs(lexical), priors, start,
                   start_first_terminal=first_terminal_root)


class DescendantsMap:
    """Maps first-pass nonterminals to the second-pass nonterminals they
    license.  Within a cell the reverse direction is a function: a
    second-pass symbol's ancestor is the first-pass symbol whose base is
    the uppercased terminal at the cell's start and whose primed and
    post-unary markers match."""

    def __init__(self, forward):
        self.forward = {f: frozenset(s) for f, s in forward.items()}
        self._first = frozenset(self.forward)
        self._pairs = frozenset(
            (f, s) for f, ss in self.forward.items() for s in ss)

    def descendants(self, first_sym):
        return self.forward.get(first_sym, frozenset())

    def ancestor(self, second_sym, start_terminal):
        """First-pass ancestor of ``second_sym`` in a cell whose span
        starts at ``start_terminal``; None when the first-pass grammar has
        no such symbol.  Terminals are their own ancestors."""
        if second_sym.is_terminal:
            return second_sym
        cand = nonterminal(start_terminal.base.upper(), second_sym.primed,
                           second_sym.post_unary)
        if cand in self._first and (cand, second_sym) in self._pairs:
            return cand
        return None


def build_descendants(first, second):
    """Descendants map from a terminal-prime first-pass grammar to a
    second-pass grammar over the same terminal alphabet."""
    if first.terminals != second.terminals:
        missing = first.terminals ^ second.terminals
        raise GrammarFormatError(
            "terminal alphabets differ (e.g. %s)"
            % sorted(s.name for s in missing)[0])
    if not all(f.base == f.base.upper() for f in first.nonterminals):
        raise GrammarFormatError(
            "first grammar is not a terminal-style grammar")
    forward = {}
    for f in first.nonterminals:
        forward[f] = {s for s in second.nonterminals
                      if s.primed == f.primed and s.post_unary == f.post_unary}
    return DescendantsMap(forward)


# ----------------------------------------------------------------------
# file formats

def write_grammar(grammar, stream):
    w = stream.write
    w("# ckythresh grammar; log probabilities are base 2\n")
    if grammar.start_first_terminal:
        w("S %s\n" % FIRST_TERMINAL_START)
    else:
        w("S %s\n" % grammar.start.name)
    for sym in sorted(grammar.priors, key=lambda s: s.name):
        w("P %s %r\n" % (sym.name, grammar.priors[sym]))
    for (parent, child), logp in sorted(
            grammar.unary.items(), key=lambda kv: (kv[0][0].name, kv[0][1].name)):
        w("U %s %s %r\n" % (parent.name, child.name, logp))
    for (parent, child), logp in sorted(
            grammar.lexical.items(), key=lambda kv: (kv[0][0].name, kv[0][1].name)):
        w("U %s %s %r\n" % (parent.name, child.name, logp))
    for (parent, left, right), logp in sorted(
            grammar.binary.items(),
            key=lambda kv: (kv[0][0].name, kv[0][1].name, kv[0][2].name)):
        w("B %s %s %s %r\n" % (parent.name, left.name, right.name, logp))


def read_grammar(stream):
    if isinstance(stream, str):
        stream = stream.splitlines()
    lines = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line.split()))

    nt_names = {fields[1] for _, fields in lines if fields[0] == "P"}

    def sym(name):
        if name in nt_names:
            return parse_nonterminal(name)
        return terminal(name)

    binary, unary, lexical, priors = {}, {}, {}, {}
    start = None
    start_first = False
    for lineno, fields in lines:
        try:
            tag = fields[0]
            if tag == "S":
                if fields[1] == FIRST_TERMINAL_START:
                    start_first = True
                else:
                    start = parse_nonterminal(fields[1])
            elif tag == "P":
                priors[parse_nonterminal(fields[1])] = float(fields[2])
            elif tag == "U":
                parent, child = parse_nonterminal(fields[1]), sym(fields[2])
                table = unary if not child.is_terminal else lexical
                table[(parent, child)] = float(fields[3])
            elif tag == "B":
                binary[(parse_nonterminal(fields[1]), sym(fields[2]),
                        sym(fields[3]))] = float(fields[4])
            else:
                raise GrammarFormatError(
                    "unknown record %r at line %d" % (tag, lineno))
        except (IndexError, ValueError) as exc:
            raise GrammarFormatError(
                "bad grammar line %d: %s" % (lineno, exc)) from exc
    return Grammar(binary, unary, lexical, priors, start,
                   start_first_terminal=start_first)


def write_descendants(dmap, stream):
    stream.write("# ckythresh descendants map\n")
    for f in sorted(dmap.forward, key=lambda s: s.name):
        for s in sorted(dmap.forward[f], key=lambda s: s.name):
            stream.write("D %s %s\n" % (f.name, s.name))


def read_descendants(stream):
    if isinstance(stream, str):
        stream = stream.splitlines()
    forward = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] != "D" or len(fields) != 3:
            raise GrammarFormatError("bad descendants line %d" % lineno)
        forward.setdefault(parse_nonterminal(fields[1]), set()) \
            .add(parse_nonterminal(fields[2]))
    return DescendantsMap(forward)
