"""The variant dictionary: clustering, human edits, validation, persistence.

A dictionary maps each canonical key to the variant surface forms it
replaces. It is built by greedy leader clustering over a value histogram:
values are visited in canonical order (count descending, value ascending),
so the most frequent surface form of each group becomes its key. A score
at or above the auto threshold joins a cluster immediately; a score inside
the review band proposes the merge to a human instead; anything lower
founds a new cluster.

Dictionary values are immutable; every edit returns a new value. The
on-disk format is a single JSON object ``{"key": ["variant", ...]}``; all
build configuration and review state lives in a ``.meta.json`` sidecar
next to it.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

from simcleaner.errors import SimCleanerError
from simcleaner.profiling import ValueHistogram
from simcleaner.similarity import (
    DEFAULT_PARAMS,
    DEFAULT_RULES,
    MetricKind,
    MetricParams,
    NormalizationRules,
    compare,
    jaro_similarity,
    jaro_winkler_similarity,
    levenshtein_similarity,
    normalize_text,
)

STATUS_AUTO = "auto"
STATUS_CONFIRMED = "confirmed"

RESOLUTION_PENDING = "pending"
RESOLUTION_ACCEPTED = "accepted"
RESOLUTION_REJECTED = "rejected"

#: Keys whose normalized length is within this fraction of the candidate's
#: are scored when blocking is on.
LENGTH_BAND = 0.4


class DictionaryError(SimCleanerError):
    pass


class ReviewConflictError(DictionaryError):
    """The session moved on: the edit no longer applies to current state."""


class DictionaryFormatError(DictionaryError):
    """The on-disk file cannot be parsed or fails validation."""


class InvalidDictionaryError(DictionaryError):
    """A dictionary breaks its invariants; carries the violation list."""

    def __init__(self, message: str, violations: list["Violation"]):
        super().__init__(message + ": " + "; ".join(str(v) for v in violations))
        self.violations = violations


@dataclass(frozen=True)
class BuildConfig:
    """Everything that determines a dictionary build.

    The key policy is fixed: the highest-frequency surface form wins, ties
    broken by ascending raw string (that is simply canonical histogram
    order). ``blocking`` buckets candidates by first code point and length
    band before scoring; turn it off for exhaustive, audit-grade builds.
    """

    metric: MetricKind = MetricKind.JARO_WINKLER
    params: MetricParams = DEFAULT_PARAMS
    rules: NormalizationRules = DEFAULT_RULES
    tau_auto: float = 0.92
    tau_review: float = 0.80
    blocking: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.tau_auto <= 1.0:
            raise ValueError(f"tau_auto must be in (0, 1], got {self.tau_auto}")
        if not 0.0 <= self.tau_review < self.tau_auto:
            raise ValueError(
                f"tau_review must be in [0, tau_auto), got {self.tau_review}"
            )

    def score(self, a: str, b: str) -> float:
        return compare(self.metric, a, b, self.params, self.rules)


@dataclass(frozen=True)
class VariantEntry:
    value: str
    score: float


@dataclass(frozen=True)
class Cluster:
    """One canonical key with the variants it absorbs.

    The key never appears among its own variants; each variant's score is
    its comparison against the key under the build config.
    """

    key: str
    variants: tuple[VariantEntry, ...] = ()
    status: str = STATUS_AUTO

    def variant_values(self) -> list[str]:
        return [v.value for v in self.variants]


@dataclass(frozen=True)
class Dictionary:
    clusters: tuple[Cluster, ...]
    config: BuildConfig

    def keys(self) -> list[str]:
        return [c.key for c in self.clusters]

    def find(self, key: str) -> Cluster | None:
        for cluster in self.clusters:
            if cluster.key == key:
                return cluster
        return None

    def variant_map(self) -> dict[str, str]:
        """Mapping of every variant to its key (what apply uses)."""
        mapping: dict[str, str] = {}
        for cluster in self.clusters:
            for entry in cluster.variants:
                mapping[entry.value] = cluster.key
        return mapping


@dataclass
class ReviewItem:
    """A proposed merge waiting for a human decision.

    Created while building whenever a candidate's best score lands inside
    the review band. Resolved items are immutable: resolving twice is an
    error.
    """

    item_id: int
    candidate: str
    proposed_key: str
    score: float
    resolution: str = RESOLUTION_PENDING


@dataclass(frozen=True)
class Violation:
    """A broken dictionary invariant, as data."""

    rule: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.message}"


def build_dictionary(
    histogram: ValueHistogram,
    config: BuildConfig = BuildConfig(),
    rejected_pairs: Iterable[tuple[str, str]] = (),
) -> tuple[Dictionary, list[ReviewItem]]:
    """Cluster histogram values into a dictionary plus a review queue.

    Deterministic for a fixed (histogram, config): iteration follows the
    histogram's canonical order and score ties keep the earliest key.
    Pairs in ``rejected_pairs`` (candidate, key) were vetoed by a human in
    an earlier session and are never scored again.
    """
    if not histogram.entries:
        raise DictionaryError("cannot build a dictionary from an empty histogram")

    rejected = set(rejected_pairs)
    rules = config.rules
    normalized: dict[str, str] = {}
    clusters: list[tuple[str, list[VariantEntry]]] = []
    # first cluster index per normalized form, for the exact-match fast path
    by_norm: dict[str, int] = {}
    # blocking buckets: first code point -> [(norm_length, norm, cluster_index)]
    buckets: dict[str, list[tuple[int, str, int]]] = {}
    review: list[ReviewItem] = []

    def found_cluster(value: str, norm: str) -> None:
        index = len(clusters)
        clusters.append((value, []))
        by_norm.setdefault(norm, index)
        buckets.setdefault(norm[:1], []).append((len(norm), norm, index))

    def candidate_indices(norm: str) -> Iterable[int]:
        if not config.blocking:
            return range(len(clusters))
        low = len(norm) * (1.0 - LENGTH_BAND)
        high = len(norm) * (1.0 + LENGTH_BAND)
        return (
            index
            for length, _, index in buckets.get(norm[:1], ())
            if low <= length <= high
        )

    for value, _count in histogram.entries:
        norm = normalize_text(value, rules)
        normalized[value] = norm

        exact = by_norm.get(norm)
        if exact is not None and (value, clusters[exact][0]) not in rejected:
            clusters[exact][1].append(VariantEntry(value, 1.0))
            continue

        best_score = -1.0
        best_index = -1
        for index in candidate_indices(norm):
            key = clusters[index][0]
            if (value, key) in rejected:
                continue
            score = _metric_score(config, norm, normalized[key])
            if score > best_score:
                best_score = score
                best_index = index

        if best_index >= 0 and best_score >= config.tau_auto:
            clusters[best_index][1].append(VariantEntry(value, best_score))
        elif best_index >= 0 and best_score >= config.tau_review:
            review.append(
                ReviewItem(len(review), value, clusters[best_index][0], best_score)
            )
            found_cluster(value, norm)
        else:
            found_cluster(value, norm)

    built = tuple(
        Cluster(key=key, variants=tuple(variants)) for key, variants in clusters
    )
    return Dictionary(clusters=built, config=config), review


def _metric_score(config: BuildConfig, norm_a: str, norm_b: str) -> float:
    # operates on already-normalized strings; equals config.score on the
    # raw strings because normalization is idempotent
    if config.metric is MetricKind.LEVENSHTEIN_NORMALIZED:
        return levenshtein_similarity(norm_a, norm_b)
    if config.metric is MetricKind.JARO:
        return jaro_similarity(norm_a, norm_b)[0]
    return jaro_winkler_similarity(norm_a, norm_b, config.params)


def _require_pending(item: ReviewItem) -> None:
    if item.resolution != RESOLUTION_PENDING:
        raise DictionaryError(
            f"review item {item.item_id} already resolved as {item.resolution}"
        )


def accept_review(dictionary: Dictionary, item: ReviewItem) -> Dictionary:
    """Apply a pending merge proposal: the candidate's singleton cluster
    dissolves into the proposed key's cluster."""
    _require_pending(item)
    candidate_cluster = dictionary.find(item.candidate)
    if candidate_cluster is None or candidate_cluster.variants:
        raise ReviewConflictError(
            f"candidate {item.candidate!r} is no longer a singleton cluster"
        )
    target = dictionary.find(item.proposed_key)
    if target is None:
        raise ReviewConflictError(
            f"proposed key {item.proposed_key!r} no longer exists"
        )

    score = dictionary.config.score(item.proposed_key, item.candidate)
    new_clusters = []
    for cluster in dictionary.clusters:
        if cluster.key == item.candidate:
            continue
        if cluster.key == item.proposed_key:
            cluster = replace(
                cluster,
                variants=cluster.variants + (VariantEntry(item.candidate, score),),
                status=STATUS_CONFIRMED,
            )
        new_clusters.append(cluster)
    item.resolution = RESOLUTION_ACCEPTED
    return replace(dictionary, clusters=tuple(new_clusters))


def reject_review(dictionary: Dictionary, item: ReviewItem) -> Dictionary:
    """Veto a pending proposal.

    The candidate stays a cluster of its own and the dictionary is
    returned unchanged; the veto is recorded on the item (and persisted
    as a rejected pair so future rebuilds do not re-propose it).
    """
    _require_pending(item)
    item.resolution = RESOLUTION_REJECTED
    return dictionary


def reassign_variant(
    dictionary: Dictionary, variant: str, from_key: str, to_key: str
) -> Dictionary:
    """Move a variant between clusters, rescoring it against its new key."""
    source = dictionary.find(from_key)
    if source is None:
        raise DictionaryError(f"unknown cluster key {from_key!r}")
    if variant not in source.variant_values():
        raise DictionaryError(f"{variant!r} is not a variant of {from_key!r}")
    if to_key == variant:
        raise DictionaryError("a cluster key cannot be one of its own variants")
    if from_key == to_key:
        return dictionary
    target = dictionary.find(to_key)
    if target is None:
        raise DictionaryError(f"unknown cluster key {to_key!r}")

    score = dictionary.config.score(to_key, variant)
    new_clusters = []
    for cluster in dictionary.clusters:
        if cluster.key == from_key:
            cluster = replace(
                cluster,
                variants=tuple(v for v in cluster.variants if v.value != variant),
                status=STATUS_CONFIRMED,
            )
        elif cluster.key == to_key:
            cluster = replace(
                cluster,
                variants=cluster.variants + (VariantEntry(variant, score),),
                status=STATUS_CONFIRMED,
            )
        new_clusters.append(cluster)
    return replace(dictionary, clusters=tuple(new_clusters))


def rename_key(dictionary: Dictionary, old_key: str, new_key: str) -> Dictionary:
    """Change a cluster's canonical key.

    If the new key is one of the cluster's own variants the two swap
    roles; otherwise the new key must be a fresh string and the old key
    joins the variants. All variants are rescored against the new key.
    """
    cluster = dictionary.find(old_key)
    if cluster is None:
        raise DictionaryError(f"unknown cluster key {old_key!r}")
    if new_key == old_key:
        return dictionary

    promoted = new_key in cluster.variant_values()
    if not promoted:
        for other in dictionary.clusters:
            if other.key == new_key or new_key in other.variant_values():
                raise DictionaryError(
                    f"{new_key!r} already appears in the dictionary"
                )

    config = dictionary.config
    old_variants = [v.value for v in cluster.variants if v.value != new_key]
    new_variants = tuple(
        VariantEntry(value, config.score(new_key, value))
        for value in old_variants + [old_key]
    )
    renamed = Cluster(key=new_key, variants=new_variants, status=STATUS_CONFIRMED)
    return replace(
        dictionary,
        clusters=tuple(
            renamed if c.key == old_key else c for c in dictionary.clusters
        ),
    )


def validate_dictionary(dictionary: Dictionary) -> list[Violation]:
    """Check the structural invariants; violations come back as data.

    Clean dictionaries return an empty list. Each offending string is
    reported once.
    """
    violations: list[Violation] = []
    seen: dict[str, int] = {}
    for cluster in dictionary.clusters:
        seen[cluster.key] = seen.get(cluster.key, 0) + 1
        for entry in cluster.variants:
            seen[entry.value] = seen.get(entry.value, 0) + 1

    self_variant_keys = {
        c.key for c in dictionary.clusters if c.key in c.variant_values()
    }
    for value, count in seen.items():
        if count < 2:
            continue
        if value in self_variant_keys:
            violations.append(
                Violation(
                    rule="self-variant",
                    subject=value,
                    message=f"key {value!r} is listed among its own variants",
                )
            )
        else:
            violations.append(
                Violation(
                    rule="disjointness",
                    subject=value,
                    message=f"{value!r} appears {count} times across keys and variants",
                )
            )
    return violations


# ---------------------------------------------------------------------------
# persistence


def sidecar_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


@dataclass
class DictionaryFile:
    """A dictionary as loaded from disk, with its sidecar state."""

    dictionary: Dictionary
    review_items: list[ReviewItem] = field(default_factory=list)
    rejected_pairs: set[tuple[str, str]] = field(default_factory=set)
    session: dict = field(default_factory=dict)


def _config_to_json(config: BuildConfig) -> dict:
    return {
        "metric": config.metric.value,
        "params": {
            "prefix_scale": config.params.prefix_scale,
            "max_prefix": config.params.max_prefix,
        },
        "rules": {
            "casefold": config.rules.casefold,
            "strip_diacritics": config.rules.strip_diacritics,
            "compose": config.rules.compose,
            "collapse_whitespace": config.rules.collapse_whitespace,
        },
        "thresholds": {"auto": config.tau_auto, "review": config.tau_review},
        "blocking": config.blocking,
    }


def _config_from_json(payload: Mapping) -> BuildConfig:
    try:
        params = payload.get("params", {})
        rules = payload.get("rules", {})
        thresholds = payload.get("thresholds", {})
        return BuildConfig(
            metric=MetricKind(payload["metric"]),
            params=MetricParams(
                prefix_scale=params.get("prefix_scale", DEFAULT_PARAMS.prefix_scale),
                max_prefix=params.get("max_prefix", DEFAULT_PARAMS.max_prefix),
            ),
            rules=NormalizationRules(
                casefold=rules.get("casefold", True),
                strip_diacritics=rules.get("strip_diacritics", True),
                compose=rules.get("compose", True),
                collapse_whitespace=rules.get("collapse_whitespace", True),
            ),
            tau_auto=thresholds.get("auto", 0.92),
            tau_review=thresholds.get("review", 0.80),
            blocking=payload.get("blocking", True),
        )
    except (KeyError, ValueError) as exc:
        raise DictionaryFormatError(f"invalid sidecar configuration: {exc}") from exc


def dictionary_file_bytes(dictionary: Dictionary) -> bytes:
    """The canonical on-disk form: keys sorted ascending, two-space
    indent, UTF-8, trailing newline."""
    payload = {c.key: c.variant_values() for c in dictionary.clusters}
    text = json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True)
    return (text + "\n").encode("utf-8")


def _atomic_write(path: Path, data: bytes) -> None:
    # same-directory temp plus rename, so a crash never leaves a torn file
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def save_dictionary(
    dictionary: Dictionary,
    path: str | Path,
    review_items: Iterable[ReviewItem] = (),
    rejected_pairs: Iterable[tuple[str, str]] = (),
    session: Mapping | None = None,
) -> Path:
    """Write the dictionary and its metadata sidecar.

    Refuses to save a dictionary that fails validation.
    """
    from simcleaner import __version__

    violations = validate_dictionary(dictionary)
    if violations:
        raise InvalidDictionaryError("refusing to save an invalid dictionary", violations)
    path = Path(path)
    _atomic_write(path, dictionary_file_bytes(dictionary))

    meta = {
        "tool": "simcleaner",
        "tool_version": __version__,
        **_config_to_json(dictionary.config),
        "cluster_status": {
            c.key: c.status for c in dictionary.clusters if c.status != STATUS_AUTO
        },
        "review_items": [
            {
                "id": item.item_id,
                "candidate": item.candidate,
                "proposed_key": item.proposed_key,
                "score": item.score,
                "resolution": item.resolution,
            }
            for item in review_items
        ],
        "rejected_pairs": sorted([c, k] for c, k in set(rejected_pairs)),
        "session": dict(session or {}),
    }
    meta_text = json.dumps(meta, ensure_ascii=False, indent=2, sort_keys=True)
    _atomic_write(sidecar_path(path), (meta_text + "\n").encode("utf-8"))
    return path


def load_dictionary_file(path: str | Path) -> DictionaryFile:
    """Load a dictionary plus sidecar, recomputing scores from the config.

    Raises DictionaryFormatError with a byte offset on malformed JSON and
    with the violation list when the loaded content breaks invariants.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        byte_offset = len(text[: exc.pos].encode("utf-8"))
        raise DictionaryFormatError(
            f"{path}: JSON parse error at byte offset {byte_offset}: {exc.msg}"
        ) from None
    if not isinstance(payload, dict) or not all(
        isinstance(k, str)
        and isinstance(v, list)
        and all(isinstance(x, str) for x in v)
        for k, v in payload.items()
    ):
        raise DictionaryFormatError(
            f"{path}: expected a JSON object mapping keys to arrays of strings"
        )

    meta_file = sidecar_path(path)
    if meta_file.is_file():
        meta = json.loads(meta_file.read_text(encoding="utf-8"))
    else:
        meta = {}
    config = _config_from_json(meta) if meta.get("metric") else BuildConfig()
    statuses = meta.get("cluster_status", {})

    clusters = tuple(
        Cluster(
            key=key,
            variants=tuple(
                VariantEntry(value, config.score(key, value)) for value in variants
            ),
            status=statuses.get(key, STATUS_AUTO),
        )
        for key, variants in payload.items()
    )
    dictionary = Dictionary(clusters=clusters, config=config)
    violations = validate_dictionary(dictionary)
    if violations:
        raise InvalidDictionaryError(f"{path}: dictionary violates invariants", violations)

    review_items = [
        ReviewItem(
            item_id=entry["id"],
            candidate=entry["candidate"],
            proposed_key=entry["proposed_key"],
            score=entry["score"],
            resolution=entry.get("resolution", RESOLUTION_PENDING),
        )
        for entry in meta.get("review_items", [])
    ]
    rejected = {(c, k) for c, k in meta.get("rejected_pairs", [])}
    return DictionaryFile(
        dictionary=dictionary,
        review_items=review_items,
        rejected_pairs=rejected,
        session=meta.get("session", {}),
    )


def load_dictionary(path: str | Path) -> Dictionary:
    """Load just the dictionary (scores recomputed from the sidecar config)."""
    return load_dictionary_file(path).dictionary
