"""Character-based string similarity metrics and pre-comparison text normalization.

All metrics operate on Unicode code points and return scores in [0, 1].
``compare`` is the single entry point the rest of the package uses: it
normalizes both inputs under a rule set and dispatches to the selected
metric.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from enum import Enum

#: Similarity scores are plain floats constrained to the unit interval.
SimilarityScore = float


class MetricKind(str, Enum):
    """Available metrics. The values are the names used verbatim in CLI
    flags and in the dictionary metadata sidecar."""

    LEVENSHTEIN_NORMALIZED = "levenshtein-normalized"
    JARO = "jaro"
    JARO_WINKLER = "jaro-winkler"


@dataclass(frozen=True)
class MetricParams:
    """Winkler prefix-boost parameters.

    ``prefix_scale`` is the per-character boost weight (commonly called p)
    and ``max_prefix`` the cap on the common-prefix length it applies to.
    ``prefix_scale * max_prefix`` must not exceed 1 so the boosted score
    stays within [0, 1].
    """

    prefix_scale: float = 0.1
    max_prefix: int = 4

    def __post_init__(self) -> None:
        if not 0.0 <= self.prefix_scale <= 0.25:
            raise ValueError(f"prefix_scale must be in [0, 0.25], got {self.prefix_scale}")
        if self.max_prefix < 0:
            raise ValueError(f"max_prefix must be >= 0, got {self.max_prefix}")
        if self.prefix_scale * self.max_prefix > 1.0:
            raise ValueError(
                f"prefix_scale * max_prefix must be <= 1, got {self.prefix_scale * self.max_prefix}"
            )


@dataclass(frozen=True)
class NormalizationRules:
    """Which normalization steps run before any comparison.

    Steps apply in a fixed order (casefold, strip diacritics, canonical
    composition, whitespace collapse) chosen so a single pass is a fixed
    point: normalizing twice equals normalizing once.
    """

    casefold: bool = True
    strip_diacritics: bool = True
    compose: bool = True
    collapse_whitespace: bool = True


DEFAULT_PARAMS = MetricParams()
DEFAULT_RULES = NormalizationRules()
NO_NORMALIZATION = NormalizationRules(
    casefold=False, strip_diacritics=False, compose=False, collapse_whitespace=False
)


@dataclass(frozen=True)
class JaroTrace:
    """Internal quantities of a Jaro comparison, exposed for diagnostics.

    ``transpositions`` uses half-count granularity: it is half the number
    of matched characters that are out of order, so values like 1.5 occur.
    ``common_prefix`` is the shared prefix length capped at the default
    Winkler limit.
    """

    matches: int
    transpositions: float
    window: int
    common_prefix: int


def normalize_text(s: str, rules: NormalizationRules = DEFAULT_RULES) -> str:
    """Apply the enabled normalization rules to ``s``.

    Deterministic, and idempotent: the output is a fixed point of the
    rules. Empty input maps to empty output.

    >>> normalize_text("Bernardo SAYÃO, AV.")
    'bernardo sayao, av.'
    >>> normalize_text("  A   B ")
    'a b'
    """
    if rules.casefold:
        s = s.casefold()
    if rules.strip_diacritics:
        s = "".join(
            c for c in unicodedata.normalize("NFD", s) if unicodedata.category(c) != "Mn"
        )
    if rules.compose:
        s = unicodedata.normalize("NFC", s)
    if rules.collapse_whitespace:
        s = " ".join(s.split())
    return s


def levenshtein_distance(a: str, b: str) -> int:
    """Minimum number of single-code-point insertions, deletions and
    substitutions transforming ``a`` into ``b``.

    >>> levenshtein_distance("kitten", "sitting")
    3
    """
    if a == b:
        return 0
    # Keep the shorter string as the DP row.
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)

    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            substitution = previous[j - 1] + (ca != cb)
            deletion = previous[j] + 1
            insertion = current[j - 1] + 1
            current.append(min(substitution, deletion, insertion))
        previous = current
    return previous[-1]


def levenshtein_similarity(a: str, b: str) -> SimilarityScore:
    """Length-normalized Levenshtein similarity.

    Returns ``(max_len - distance) / max_len``; two empty strings compare
    as 1.0.

    >>> levenshtein_similarity("ab", "cd")
    0.0
    """
    if not a and not b:
        return 1.0
    max_len = max(len(a), len(b))
    return (max_len - levenshtein_distance(a, b)) / max_len


def _common_prefix_length(a: str, b: str, cap: int) -> int:
    n = min(len(a), len(b), cap)
    for i in range(n):
        if a[i] != b[i]:
            return i
    return n


def jaro_similarity(a: str, b: str) -> tuple[SimilarityScore, JaroTrace]:
    """Jaro similarity plus the trace of its internal quantities.

    Matching is greedy left to right inside a window of
    ``max(floor(max(|a|,|b|)/2) - 1, 0)``; each position is used at most
    once. The transposition count is half the number of matched
    characters out of order. Two empty strings compare as 1.0.

    >>> score, trace = jaro_similarity("MARTHA", "MARHTA")
    >>> round(score, 4), trace.matches, trace.transpositions
    (0.9444, 6, 1.0)
    """
    len_a, len_b = len(a), len(b)
    window = max(max(len_a, len_b) // 2 - 1, 0)
    prefix = _common_prefix_length(a, b, DEFAULT_PARAMS.max_prefix)

    if not a and not b:
        return 1.0, JaroTrace(0, 0.0, 0, 0)
    if not a or not b:
        return 0.0, JaroTrace(0, 0.0, window, 0)

    a_matched = [False] * len_a
    b_matched = [False] * len_b
    matches = 0
    for i in range(len_a):
        start = max(0, i - window)
        end = min(i + window + 1, len_b)
        for j in range(start, end):
            if b_matched[j] or a[i] != b[j]:
                continue
            a_matched[i] = True
            b_matched[j] = True
            matches += 1
            break

    if matches == 0:
        return 0.0, JaroTrace(0, 0.0, window, prefix)

    out_of_order = 0
    k = 0
    for i in range(len_a):
        if not a_matched[i]:
            continue
        while not b_matched[k]:
            k += 1
        if a[i] != b[k]:
            out_of_order += 1
        k += 1
    transpositions = out_of_order / 2

    score = (
        matches / len_a + matches / len_b + (matches - transpositions) / matches
    ) / 3
    return score, JaroTrace(matches, transpositions, window, prefix)


def jaro_winkler_similarity(
    a: str, b: str, params: MetricParams = DEFAULT_PARAMS
) -> SimilarityScore:
    """Jaro similarity boosted by a shared prefix:
    ``J + prefix_len * prefix_scale * (1 - J)``.

    Never smaller than plain Jaro, and never exceeds 1.

    >>> round(jaro_winkler_similarity("MARTHA", "MARHTA"), 4)
    0.9611
    """
    jaro, _ = jaro_similarity(a, b)
    prefix = _common_prefix_length(a, b, params.max_prefix)
    return jaro + prefix * params.prefix_scale * (1.0 - jaro)


def compare(
    metric: MetricKind,
    a: str,
    b: str,
    params: MetricParams = DEFAULT_PARAMS,
    rules: NormalizationRules = DEFAULT_RULES,
) -> SimilarityScore:
    """Normalize both strings under ``rules`` and score them with ``metric``.

    This is the comparison entry point used by clustering and review.
    """
    na = normalize_text(a, rules)
    nb = normalize_text(b, rules)
    if metric is MetricKind.LEVENSHTEIN_NORMALIZED:
        return levenshtein_similarity(na, nb)
    if metric is MetricKind.JARO:
        return jaro_similarity(na, nb)[0]
    if metric is MetricKind.JARO_WINKLER:
        return jaro_winkler_similarity(na, nb, params)
    raise ValueError(f"unknown metric: {metric!r}")
