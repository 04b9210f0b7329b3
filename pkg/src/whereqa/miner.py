"""Association-rule mining over Q-/A-prefixed symbol transactions.

A transaction is the set of symbols from one encoded question/answer pair,
each prefixed with "Q-" or "A-" by origin (duplicates collapse; transactions
are sets, not multisets). Mining is level-wise Apriori with downward-closure
pruning; rules may carry Q- and A- items on either side, and report filters
select the questions-to-answers view downstream.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass

from .core import GenericSequence


class MiningError(Exception):
    pass


@dataclass(frozen=True)
class Transaction:
    items: frozenset[str]

    def __post_init__(self) -> None:
        if not self.items:
            raise MiningError("empty transaction")
        for item in self.items:
            if not (item.startswith("Q-") or item.startswith("A-")):
                raise MiningError(f"item {item!r} lacks a Q-/A- prefix")


@dataclass(frozen=True)
class AssociationRule:
    antecedent: frozenset[str]
    consequent: frozenset[str]
    support: float
    confidence: float
    lift: float
    frequency: int

    def render(self) -> str:
        return "{%s} => {%s}" % (
            ",".join(sorted(self.antecedent)),
            ",".join(sorted(self.consequent)),
        )


def build_transactions(
    encoded_pairs: list[tuple[GenericSequence, GenericSequence]],
) -> list[Transaction]:
    """One transaction per encoded pair; order within sequences is discarded."""
    out = []
    for q_seq, a_seq in encoded_pairs:
        items = {f"Q-{sym}" for sym in q_seq.items} | {f"A-{sym}" for sym in a_seq.items}
        out.append(Transaction(items=frozenset(items)))
    return out


def mine_rules(
    transactions: list[Transaction],
    min_support: float = 0.04,
    min_confidence: float = 0.5,
    max_items: int = 4,
) -> list[AssociationRule]:
    """All rules from frequent itemsets of size <= max_items meeting both
    thresholds, with exact support/confidence/lift/frequency."""
    if not transactions:
        raise MiningError("cannot mine an empty transaction list")
    if not 0.0 < min_support <= 1.0:
        raise MiningError(f"min_support {min_support} outside (0,1]")
    if not 0.0 < min_confidence <= 1.0:
        raise MiningError(f"min_confidence {min_confidence} outside (0,1]")
    if max_items < 2:
        raise MiningError(f"max_items must be >= 2, got {max_items}")

    n = len(transactions)
    item_sets = [t.items for t in transactions]
    counts = _frequent_itemsets(item_sets, min_support, max_items)

    rules: list[AssociationRule] = []
    for itemset, freq in counts.items():
        if len(itemset) < 2:
            continue
        support = freq / n
        members = sorted(itemset)
        for r in range(1, len(members)):
            for ante in itertools.combinations(members, r):
                antecedent = frozenset(ante)
                consequent = itemset - antecedent
                # subsets of a frequent itemset are frequent, so counted
                confidence = freq / counts[antecedent]
                if confidence < min_confidence:
                    continue
                lift = confidence / (counts[consequent] / n)
                rules.append(
                    AssociationRule(
                        antecedent=antecedent,
                        consequent=consequent,
                        support=support,
                        confidence=confidence,
                        lift=lift,
                        frequency=freq,
                    )
                )
    rules.sort(key=lambda rule: rule.render())
    return rules


def _frequent_itemsets(
    item_sets: list[frozenset[str]], min_support: float, max_items: int
) -> dict[frozenset[str], int]:
    """Level-wise candidate generation with downward-closure pruning."""
    n = len(item_sets)
    min_count = min_support * n

    counts: dict[frozenset[str], int] = {}
    level: dict[frozenset[str], int] = {}
    for items in item_sets:
        for item in items:
            key = frozenset([item])
            level[key] = level.get(key, 0) + 1
    level = {k: c for k, c in level.items() if c >= min_count}
    counts.update(level)

    size = 1
    while level and size < max_items:
        size += 1
        candidates = _candidates(set(level), size)
        tallies = {c: 0 for c in candidates}
        if tallies:
            for items in item_sets:
                for cand in tallies:
                    if cand <= items:
                        tallies[cand] += 1
        level = {c: cnt for c, cnt in tallies.items() if cnt >= min_count}
        counts.update(level)
    return counts


def _candidates(frequent: set[frozenset[str]], size: int) -> set[frozenset[str]]:
    """Join (k-1)-itemsets sharing a (k-2)-prefix, then prune candidates
    with any infrequent (k-1)-subset."""
    sorted_sets = sorted(tuple(sorted(f)) for f in frequent)
    joined = set()
    for a, b in itertools.combinations(sorted_sets, 2):
        if a[:-1] == b[:-1]:
            joined.add(frozenset(a) | frozenset(b))
    pruned = set()
    for cand in joined:
        if len(cand) != size:
            continue
        if all(cand - {item} in frequent for item in cand):
            pruned.add(cand)
    return pruned


_RANK_KEYS = {
    "frequency": lambda r: r.frequency,
    "support": lambda r: r.support,
    "confidence": lambda r: r.confidence,
    "lift": lambda r: r.lift,
}


def rank_rules(rules: list[AssociationRule], key: str = "frequency", n: int | None = None):
    """Stable descending sort by `key`; ties by the rendered rule text."""
    if key not in _RANK_KEYS:
        raise MiningError(f"unknown ranking key {key!r}; use one of {sorted(_RANK_KEYS)}")
    metric = _RANK_KEYS[key]
    ranked = sorted(rules, key=lambda r: (-metric(r), r.render()))
    return ranked if n is None else ranked[:n]


RULE_CSV_COLUMNS = ["rank", "antecedent", "consequent", "support", "confidence", "lift", "frequency"]


def write_rule_csv(rules: list[AssociationRule], path, comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(RULE_CSV_COLUMNS)
        for rank, rule in enumerate(rules, start=1):
            writer.writerow(
                [
                    rank,
                    "{%s}" % ",".join(sorted(rule.antecedent)),
                    "{%s}" % ",".join(sorted(rule.consequent)),
                    f"{rule.support:.6f}",
                    f"{rule.confidence:.6f}",
                    f"{rule.lift:.6f}",
                    rule.frequency,
                ]
            )
