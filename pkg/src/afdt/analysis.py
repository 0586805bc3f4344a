"""Qualitative analysis: minimal cut sets and defense impact.

A cut set is a set of risk leaves (BAS/BCF) that, activated together under a
fixed defense configuration, activates the top-level event; it is minimal
when no proper subset does.  Stratified models have structure functions that
are monotone in the risk leaves, so the minimal cut sets form an antichain
and can be composed bottom-up over the DAG:

    leaf      {{leaf}}
    OR        minimized union of the input families
    AND       minimized pairwise-union product
    VOT(k/n)  "at least k" dynamic program over the inputs
    INH       event family if the defense subtree is off; the product with
              the disabler family if it is on; empty if it is on and there
              is nothing to disable

Defense subtrees contain only BDS leaves, so under a fixed configuration
they collapse to booleans before the composition runs.  The composition is
exact on shared-subtree DAGs, not only on trees.

``brute_force_mcs`` recomputes the family from the full truth table and is
kept deliberately independent of the composition so the two can check each
other.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    BudgetExceededError,
    InvalidModelError,
    TooLargeError,
    TooManyDefensesError,
    UnknownDefenseError,
)
from .model import GateKind, LeafKind, Model, evaluate, leaves, topological_order

#: Family-size cap; the CLI exposes it via AFDT_MAX_CUTS.
DEFAULT_MAX_CUTS = 100_000
#: mcs_table enumerates every defense subset only up to this many BDS leaves.
DEFAULT_MAX_TABLE_DEFENSES = 12
#: defense_impact scans all defense subsets up to this count.
DEFAULT_MAX_SUBSETS = 4096
#: brute_force_mcs enumerates 2^n assignments up to this many risk leaves.
DEFAULT_MAX_BRUTE_LEAVES = 20


@dataclass(frozen=True)
class CutSet:
    """A canonical cut set: member ids sorted lexicographically."""

    members: tuple[str, ...]

    @classmethod
    def of(cls, ids: Iterable[str]) -> "CutSet":
        return cls(tuple(sorted(ids)))

    def as_set(self) -> frozenset[str]:
        return frozenset(self.members)

    @property
    def order_key(self) -> tuple[int, tuple[str, ...]]:
        return (len(self.members), self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[str]:
        return iter(self.members)

    def __contains__(self, item: object) -> bool:
        return item in self.members


@dataclass(frozen=True)
class McsFamily:
    """All minimal cut sets under one defense configuration.

    ``defense`` is the sorted tuple of deployed BDS ids; ``cuts`` is the
    antichain in canonical order (size, then members lexicographically).
    """

    defense: tuple[str, ...]
    cuts: tuple[CutSet, ...]

    @classmethod
    def of(cls, defense: Iterable[str], cuts: Iterable[frozenset[str]]) -> "McsFamily":
        canonical = sorted((CutSet.of(c) for c in cuts), key=lambda c: c.order_key)
        return cls(tuple(sorted(defense)), tuple(canonical))

    def cut_sets(self) -> list[frozenset[str]]:
        return [c.as_set() for c in self.cuts]

    def as_dict(self) -> dict[str, object]:
        return {
            "defense": list(self.defense),
            "cuts": [list(c.members) for c in self.cuts],
        }


@dataclass(frozen=True)
class Hardening:
    """One minimal defense set that grows a cut instead of removing it."""

    defense: tuple[str, ...]
    cuts: tuple[CutSet, ...]  # the enlarged supersets it induces

    def as_dict(self) -> dict[str, object]:
        return {
            "defense": list(self.defense),
            "cuts": [list(c.members) for c in self.cuts],
        }


@dataclass(frozen=True)
class ImpactEntry:
    """How the defenses act on one no-defense minimal cut set.

    ``neutralizing``: minimal defense sets whose deployment deactivates the
    TLE when exactly this cut is active.  ``eradicating``: minimal defense
    sets under which no cut containing this one remains in the family (the
    cut is gone for good, not merely grown).  ``hardened_by``: minimal
    defense sets that replace the cut with proper supersets.  Eradicating
    sets are always neutralizing; the reverse may fail when a defense can be
    disabled.
    """

    mcs: CutSet
    neutralizing: tuple[tuple[str, ...], ...]
    eradicating: tuple[tuple[str, ...], ...]
    hardened_by: tuple[Hardening, ...]

    def as_dict(self) -> dict[str, object]:
        return {
            "mcs": list(self.mcs.members),
            "neutralizing": [list(s) for s in self.neutralizing],
            "eradicating": [list(s) for s in self.eradicating],
            "hardened_by": [h.as_dict() for h in self.hardened_by],
        }


# ---------------------------------------------------------------------------
# Family algebra

def _minimize(cuts: Iterable[frozenset[str]]) -> list[frozenset[str]]:
    """Inclusion-minimal elements; scanning by size keeps the check one-sided."""
    kept: list[frozenset[str]] = []
    for cut in sorted(set(cuts), key=len):
        if not any(small <= cut for small in kept):
            kept.append(cut)
    return kept


def _product(
    a: Sequence[frozenset[str]], b: Sequence[frozenset[str]], max_cuts: int
) -> list[frozenset[str]]:
    raw = len(a) * len(b)
    if raw > max(64 * max_cuts, 100_000):
        raise BudgetExceededError(
            f"cut-set product would form {raw} unions, over the analysis budget"
        )
    return _minimize(x | y for x in a for y in b)


def _vot_family(
    child_families: Sequence[list[frozenset[str]]], k: int, max_cuts: int
) -> list[frozenset[str]]:
    """Family for "at least k of n" via the standard reach-count DP."""
    reached: list[list[frozenset[str]]] = [[frozenset()]] + [[] for _ in range(k)]
    for family in child_families:
        for j in range(k, 0, -1):
            if not reached[j - 1]:
                continue
            step = _product(reached[j - 1], family, max_cuts)
            reached[j] = _minimize(reached[j] + step)
    return reached[k]


def _defense_set(model: Model, defense: Iterable[str]) -> frozenset[str]:
    wanted = frozenset(defense)
    bds = leaves(model).bds
    unknown = wanted - bds
    if unknown:
        raise UnknownDefenseError(
            "not defense leaf id(s): " + ", ".join(sorted(unknown))
        )
    return wanted


def _families(model: Model, defense: frozenset[str], max_cuts: int) -> list[frozenset[str]]:
    """Bottom-up composition; every node carries either a family (risk side)
    or a plain boolean (defense side)."""
    values: dict[str, bool | list[frozenset[str]]] = {}
    for nid in topological_order(model):
        node = model.nodes[nid]
        if node.is_leaf:
            if node.kind is LeafKind.BDS:
                values[nid] = nid in defense
            else:
                values[nid] = [frozenset({nid})]
            continue
        if node.kind in (GateKind.AND, GateKind.OR):
            inputs = [values[c] for c in node.children]
            if not inputs:
                raise InvalidModelError(f"{node.kind.value} gate {nid!r} has no inputs")
            if all(isinstance(v, bool) for v in inputs):
                flags = [bool(v) for v in inputs]
                values[nid] = all(flags) if node.kind is GateKind.AND else any(flags)
                continue
            if any(isinstance(v, bool) for v in inputs):
                raise InvalidModelError(f"gate {nid!r} mixes defense and risk inputs")
            fams = [v for v in inputs if not isinstance(v, bool)]
            if node.kind is GateKind.OR:
                family = _minimize(c for fam in fams for c in fam)
            else:
                family = fams[0]
                for fam in fams[1:]:
                    family = _product(family, fam, max_cuts)
        elif node.kind is GateKind.VOT:
            inputs = [values[c] for c in node.children]
            if node.k is None or node.k < 1 or len(inputs) < node.k:
                raise InvalidModelError(f"vot gate {nid!r} has a bad threshold")
            if any(isinstance(v, bool) for v in inputs):
                raise InvalidModelError(f"vot gate {nid!r} has defense-side inputs")
            family = _vot_family([v for v in inputs if not isinstance(v, bool)], node.k, max_cuts)
        elif node.kind is GateKind.INH:
            if node.event is None or node.defense is None:
                raise InvalidModelError(f"inh gate {nid!r} is missing a slot")
            event = values[node.event]
            guard = values[node.defense]
            if isinstance(event, bool) or not isinstance(guard, bool):
                raise InvalidModelError(f"inh gate {nid!r} has mixed-up slot contexts")
            if not guard:
                family = event
            elif node.disabler is None:
                family = []
            else:
                disabler = values[node.disabler]
                if isinstance(disabler, bool):
                    raise InvalidModelError(f"inh gate {nid!r} has a defense-side disabler")
                family = _product(event, disabler, max_cuts)
        else:
            raise InvalidModelError(f"node {nid!r} has unsupported kind {node.kind!r}")
        if len(family) > max_cuts:
            raise BudgetExceededError(
                f"cut family at node {nid!r} holds {len(family)} sets, over the cap of {max_cuts}"
            )
        values[nid] = family

    top = values.get(model.tle)
    if top is None or isinstance(top, bool):
        raise InvalidModelError("top-level event does not carry a risk-side cut family")
    return top


# ---------------------------------------------------------------------------
# Public operations

def minimal_cut_sets(
    model: Model,
    defense: Iterable[str] = (),
    *,
    max_cuts: int = DEFAULT_MAX_CUTS,
) -> McsFamily:
    """All minimal cut sets of the TLE with ``defense`` deployed.

    Exact for validated (hence monotone) models, including shared subtrees.
    Raises UnknownDefenseError for non-BDS defense ids and
    BudgetExceededError when any intermediate family outgrows ``max_cuts``.
    """
    deployed = _defense_set(model, defense)
    family = _families(model, deployed, max_cuts)
    return McsFamily.of(deployed, family)


def _subset_order_key(subset: Iterable[str]) -> tuple[int, tuple[str, ...]]:
    members = tuple(sorted(subset))
    return (len(members), members)


def mcs_table(
    model: Model,
    defense_subsets: Sequence[Iterable[str]] | None = None,
    *,
    max_cuts: int = DEFAULT_MAX_CUTS,
    max_defenses: int = DEFAULT_MAX_TABLE_DEFENSES,
) -> list[McsFamily]:
    """One McsFamily per defense subset, in size-then-lexicographic order.

    Without an explicit subset list, all 2^|BDS| subsets are enumerated,
    refusing (TooManyDefensesError) beyond ``max_defenses`` BDS leaves.
    """
    if defense_subsets is None:
        bds = sorted(leaves(model).bds)
        if len(bds) > max_defenses:
            raise TooManyDefensesError(
                f"{len(bds)} defense leaves would make {2 ** len(bds)} subsets; "
                f"pass an explicit subset list (cap is {max_defenses} leaves)"
            )
        subsets: list[frozenset[str]] = [
            frozenset(combo) for n in range(len(bds) + 1) for combo in combinations(bds, n)
        ]
    else:
        subsets = list({_defense_set(model, subset) for subset in defense_subsets})
    subsets.sort(key=_subset_order_key)
    return [minimal_cut_sets(model, subset, max_cuts=max_cuts) for subset in subsets]


def defense_impact(
    model: Model,
    *,
    max_cuts: int = DEFAULT_MAX_CUTS,
    max_subsets: int = DEFAULT_MAX_SUBSETS,
) -> list[ImpactEntry]:
    """Per no-defense cut: which defense sets neutralize, eradicate, or harden it.

    Scans every defense subset, so the count 2^|BDS| must stay within
    ``max_subsets``.
    """
    bds = sorted(leaves(model).bds)
    if 2 ** len(bds) > max_subsets:
        raise TooManyDefensesError(
            f"2^{len(bds)} defense subsets exceed the cap of {max_subsets}"
        )
    subsets = [
        frozenset(combo) for n in range(len(bds) + 1) for combo in combinations(bds, n)
    ]
    subsets.sort(key=_subset_order_key)
    families: dict[frozenset[str], list[frozenset[str]]] = {
        subset: minimal_cut_sets(model, subset, max_cuts=max_cuts).cut_sets()
        for subset in subsets
    }

    entries: list[ImpactEntry] = []
    for cut in families[frozenset()]:
        neutralizing = _minimize(
            s for s in subsets if not evaluate(model, cut | s)
        )
        eradicating = _minimize(
            s for s in subsets if not any(c >= cut for c in families[s])
        )
        hardening_subsets = _minimize(
            s for s in subsets if any(c > cut for c in families[s])
        )
        hardened = tuple(
            Hardening(
                defense=tuple(sorted(s)),
                cuts=tuple(
                    sorted(
                        (CutSet.of(c) for c in families[s] if c > cut),
                        key=lambda c: c.order_key,
                    )
                ),
            )
            for s in sorted(hardening_subsets, key=_subset_order_key)
        )
        entries.append(
            ImpactEntry(
                mcs=CutSet.of(cut),
                neutralizing=_canonical_subsets(neutralizing),
                eradicating=_canonical_subsets(eradicating),
                hardened_by=hardened,
            )
        )
    entries.sort(key=lambda e: e.mcs.order_key)
    return entries


def _canonical_subsets(subsets: Iterable[frozenset[str]]) -> tuple[tuple[str, ...], ...]:
    return tuple(sorted((tuple(sorted(s)) for s in subsets), key=lambda s: (len(s), s)))


# ---------------------------------------------------------------------------
# Brute-force oracle

def brute_force_mcs(
    model: Model,
    defense: Iterable[str] = (),
    *,
    max_leaves: int = DEFAULT_MAX_BRUTE_LEAVES,
) -> McsFamily:
    """Cut sets recomputed from the full 2^n truth table (testing oracle).

    A risk subset is kept when it activates the TLE and no single-element
    removal does; for the monotone structure functions of validated models
    this local check coincides with true minimality.
    """
    deployed = _defense_set(model, defense)
    risk = sorted(leaves(model).risk)
    n = len(risk)
    if n > max_leaves:
        raise TooLargeError(
            f"{n} risk leaves exceed the brute-force cap of {max_leaves}"
        )
    idx = np.arange(1 << n, dtype=np.uint32)
    columns = {leaf: ((idx >> i) & 1).astype(bool) for i, leaf in enumerate(risk)}
    truth = _evaluate_table(model, columns, deployed)

    minimal = truth.copy()
    for bit in range(n):
        has_bit = ((idx >> bit) & 1).astype(bool)
        minimal &= ~(has_bit & truth[idx ^ np.uint32(1 << bit)])
    cuts = [
        frozenset(risk[i] for i in range(n) if (int(x) >> i) & 1)
        for x in np.nonzero(minimal)[0]
    ]
    return McsFamily.of(deployed, cuts)


def _evaluate_table(
    model: Model,
    leaf_columns: Mapping[str, np.ndarray],
    defense: frozenset[str],
) -> np.ndarray:
    """Vectorized structure-function evaluation over assignment columns.

    ``leaf_columns`` maps every risk leaf to a bool column; BDS leaves take
    the constant from ``defense``.  Returns the TLE column.
    """
    values: dict[str, np.ndarray] = {}
    for nid in topological_order(model):
        node = model.nodes[nid]
        if node.is_leaf:
            if node.kind is LeafKind.BDS:
                values[nid] = np.bool_(nid in defense)
            else:
                values[nid] = leaf_columns[nid]
        elif node.kind in (GateKind.AND, GateKind.OR):
            if not node.children:
                raise InvalidModelError(f"{node.kind.value} gate {nid!r} has no inputs")
            out = values[node.children[0]]
            for child in node.children[1:]:
                out = (out & values[child]) if node.kind is GateKind.AND else (out | values[child])
            values[nid] = out
        elif node.kind is GateKind.VOT:
            if node.k is None or node.k < 1 or len(node.children) < node.k:
                raise InvalidModelError(f"vot gate {nid!r} has a bad threshold")
            counts = sum(np.asarray(values[c], dtype=np.uint16) for c in node.children)
            values[nid] = counts >= node.k
        elif node.kind is GateKind.INH:
            event = values[node.event]
            guard = values[node.defense]
            disabled = values[node.disabler] if node.disabler is not None else np.bool_(False)
            values[nid] = event & ~(guard & ~disabled)
        else:
            raise InvalidModelError(f"node {nid!r} has unsupported kind {node.kind!r}")
    return np.broadcast_to(values[model.tle], _column_shape(leaf_columns)).copy()


def _column_shape(leaf_columns: Mapping[str, np.ndarray]) -> tuple[int, ...]:
    for column in leaf_columns.values():
        return column.shape
    return (1,)
