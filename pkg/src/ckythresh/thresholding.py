"""Pruning: prior-weighted beam thresholding, global sequence
thresholding, and the parse-failure retry policy.

All thresholds are ratios in [0, 1]: 0 disables a technique, 1 prunes
maximally.  Pruning tests are strict (``score < threshold * best``), so
the best-scoring node always survives, even at a threshold of 1.
"""

import math
from dataclasses import dataclass, replace

from .chart import ParseStats, parse_inside
from .errors import UnparsableSentenceError
from .logmath import LOG_ZERO

_RATIO_FIELDS = ("beam", "global_", "mp_node", "mp_prod")
_KV_NAMES = {"beam": "beam", "global_": "global",
             "mp_node": "mpnode", "mp_prod": "mpprod"}


@dataclass(frozen=True)
class ThresholdSet:
    """Pruning ratios for one pass: within-cell beam, global sequence,
    and the two multiple-pass gates (node and production instance)."""

    beam: float = 0.0
    global_: float = 0.0
    mp_node: float = 0.0
    mp_prod: float = 0.0

    def __post_init__(self):
        for name in _RATIO_FIELDS:
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError("threshold %s=%r outside [0, 1]" % (name, v))

    def scaled(self, divisor):
        """All ratios divided by ``divisor``; disabled (zero) stay zero."""
        return ThresholdSet(*(getattr(self, n) / divisor
                              for n in _RATIO_FIELDS))

    def all_zero(self):
        return all(getattr(self, n) == 0.0 for n in _RATIO_FIELDS)

    def with_value(self, name, value):
        return replace(self, **{name: value})

    def to_kv(self):
        return " ".join("%s=%r" % (_KV_NAMES[n], getattr(self, n))
                        for n in _RATIO_FIELDS)

    @classmethod
    def from_kv(cls, text):
        values = {}
        names = {v: k for k, v in _KV_NAMES.items()}
        for part in text.split():
            key, _, val = part.partition("=")
            if key not in names:
                raise ValueError("unknown threshold %r" % key)
            values[names[key]] = float(val)
        return cls(**values)


ZERO_THRESHOLDS = ThresholdSet()


def beam_prune(nodes, t_beam):
    """Within-cell beam with the prior: deactivate every node whose
    prior * inside falls strictly below t_beam times the cell's best."""
    _beam(nodes, t_beam, use_prior=True)


def beam_prune_noprior(nodes, t_beam):
    """The traditional beam: inside score only, all priors treated equal."""
    _beam(nodes, t_beam, use_prior=False)


def _beam(nodes, t_beam, use_prior):
    if t_beam <= 0.0 or not nodes:
        return
    if use_prior:
        scores = [node.prior + node.inside for node in nodes]
    else:
        scores = [node.inside for node in nodes]
    cut = max(scores) + math.log2(t_beam)
    for node, score in zip(nodes, scores):
        if score < cut:
            node.active = False


@dataclass
class SequenceScores:
    """Forward/backward best-cover scores (log2).  ``f[i]`` is the best
    score of non-overlapping nodes exactly covering terminals 1..i-1,
    ``b[i]`` of terminals i..n; ``best`` = f[n+1] = score of the best
    cover of the whole sentence."""

    f: list
    b: list
    best: float
    completed_length: int


def _global_buckets(chart, completed_length):
    """Active nonterminal nodes of built lengths, grouped by start."""
    buckets = [[] for _ in range(chart.n + 2)]
    for node in chart.iter_nodes(max_length=completed_length,
                                 active_only=True, skip_terminals=True):
        buckets[node.start].append(node)
    return buckets


def global_scores(chart, completed_length):
    """The two Viterbi-style sweeps over node sequences.  Node scores are
    prior * inside, sequence elements treated as independent."""
    n = chart.n
    buckets = _global_buckets(chart, completed_length)
    f = [LOG_ZERO] * (n + 2)
    f[1] = 0.0
    for start in range(1, n + 1):
        left = f[start]
        if left == LOG_ZERO:
            continue
        for node in buckets[start]:
            score = left + node.inside + node.prior
            if score > f[start + node.length]:
                f[start + node.length] = score
    b = [LOG_ZERO] * (n + 2)
    b[n + 1] = 0.0
    for start in range(n, 0, -1):
        for node in buckets[start]:
            right = b[start + node.length]
            if right == LOG_ZERO:
                continue
            score = right + node.inside + node.prior
            if score > b[start]:
                b[start] = score
    return SequenceScores(f, b, f[n + 1], completed_length)


def global_prune(chart, scores, t_global):
    """Deactivate nodes whose best covering sequence falls strictly below
    t_global times the overall best cover.  With no full cover yet
    (best = 0) nothing is comparable and nothing is pruned."""
    if t_global <= 0.0 or scores.best == LOG_ZERO:
        return
    cut = scores.best + math.log2(t_global)
    f, b = scores.f, scores.b
    for node in chart.iter_nodes(max_length=scores.completed_length,
                                 active_only=True, skip_terminals=True):
        total = f[node.start] + node.inside + node.prior \
            + b[node.start + node.length]
        if total < cut:
            node.active = False


class ThresholdHooks:
    """Plugs beam pruning in after every cell and global thresholding in
    after every completed length."""

    def __init__(self, thresholds, use_prior=True):
        self.thresholds = thresholds
        self.use_prior = use_prior

    def after_cell(self, chart, start, length):
        t = self.thresholds.beam
        if t <= 0.0:
            return
        nodes = chart.span_nodes(start, length, active_only=True,
                                 skip_terminals=True)
        _beam(nodes, t, self.use_prior)

    def after_length(self, chart, length):
        t = self.thresholds.global_
        if t <= 0.0:
            return
        global_prune(chart, global_scores(chart, length), t)


def parse_with_retry(grammar, sentence, thresholds=None, max_retries=12,
                     divisor=5.0, use_prior=True, gates=None):
    """Parse, and on failure rerun with every threshold ratio divided by
    ``divisor``, up to ``max_retries`` times; the last permitted retry
    runs with thresholds fully disabled.  Productions and elapsed time
    accumulate over all attempts.

    Raises UnparsableSentenceError when even the unpruned attempt fails.
    With ``max_retries=0`` a failed chart is returned as a value.
    """
    if thresholds is None:
        thresholds = ZERO_THRESHOLDS
    merged = ParseStats()
    chart = None
    for attempt in range(max_retries + 1):
        if attempt == 0:
            current = thresholds
        elif attempt == max_retries:
            current = ZERO_THRESHOLDS
        else:
            current = thresholds.scaled(divisor ** attempt)
        hooks = ThresholdHooks(current, use_prior)
        chart = parse_inside(grammar, sentence, hooks=hooks, gates=gates)
        merged.add(chart.stats)
        merged.retries = attempt
        if chart.has_parse():
            return chart, merged
        if current.all_zero():
            raise UnparsableSentenceError(
                "no parse exists for %r under this grammar"
                % " ".join(s.name for s in chart.sentence))
    return chart, merged
