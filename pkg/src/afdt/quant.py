"""Top-level-event probability under independent leaf probabilities.

Risk leaves (BAS/BCF) fire independently with their assigned probabilities;
defenses are decisions, not random events, so a computation takes a defense
configuration exactly like the qualitative analysis does.

Two exact routes are provided and must agree: vectorized exhaustive
enumeration of all 2^n risk assignments (the default, capped at 24 leaves)
and recursive conditioning with three-valued short-circuit evaluation.
Beyond desk scale, ``tle_probability_mc`` gives a seeded, fully reproducible
Monte-Carlo estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .analysis import _evaluate_table, _defense_set
from .errors import BadProbError, MissingProbError, TooLargeError, UnknownLeafError
from .model import GateKind, LeafKind, Model, evaluate, leaves, topological_order

#: Exhaustive enumeration cap: 2^24 assignments is the largest desk-scale run.
DEFAULT_MAX_EXACT_LEAVES = 24
#: Assignments (or samples) evaluated per vectorized batch.
_BATCH = 65536


class Method(Enum):
    EXACT = "exact"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class ProbResult:
    """A TLE probability; sampling fields are set for Monte-Carlo only."""

    value: float
    method: Method
    samples: int | None = None
    std_error: float | None = None
    seed: int | None = None

    def as_dict(self) -> dict[str, object]:
        out: dict[str, object] = {"value": self.value, "method": self.method.value}
        if self.method is Method.MONTE_CARLO:
            out.update(samples=self.samples, std_error=self.std_error, seed=self.seed)
        return out


def _checked_probs(model: Model, probs: Mapping[str, float]) -> dict[str, float]:
    """Validate coverage and ranges; returns a plain id -> probability map."""
    risk = leaves(model).risk
    unknown = set(probs) - risk
    if unknown:
        raise UnknownLeafError(
            "probabilities name non-risk or unknown id(s): " + ", ".join(sorted(unknown))
        )
    missing = risk - set(probs)
    if missing:
        raise MissingProbError(
            "no probability for risk leaf(s): " + ", ".join(sorted(missing))
        )
    out: dict[str, float] = {}
    for leaf in sorted(risk):
        value = probs[leaf]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise BadProbError(f"probability for {leaf!r} must be a number")
        if not 0.0 <= float(value) <= 1.0:
            raise BadProbError(f"probability for {leaf!r} is outside [0, 1]: {value!r}")
        out[leaf] = float(value)
    return out


def tle_probability_exact(
    model: Model,
    probs: Mapping[str, float],
    defense: Iterable[str] = (),
    *,
    max_leaves: int = DEFAULT_MAX_EXACT_LEAVES,
    method: str = "enumerate",
) -> ProbResult:
    """Exact P[TLE active] with ``defense`` deployed.

    ``method`` picks the route: "enumerate" (vectorized truth-table sweep)
    or "condition" (recursive conditioning).  Both are exact; having two
    lets tests cross-check them.
    """
    deployed = _defense_set(model, defense)
    p = _checked_probs(model, probs)
    risk = sorted(p)
    if len(risk) > max_leaves:
        raise TooLargeError(
            f"{len(risk)} risk leaves exceed the exact-computation cap of {max_leaves}"
        )
    if not risk:
        return ProbResult(float(evaluate(model, deployed)), Method.EXACT)
    if method == "enumerate":
        value = _exact_by_enumeration(model, risk, p, deployed)
    elif method == "condition":
        value = _exact_by_conditioning(model, p, deployed)
    else:
        raise ValueError(f"unknown exact method {method!r}")
    return ProbResult(min(max(value, 0.0), 1.0), Method.EXACT)


def _exact_by_enumeration(
    model: Model, risk: list[str], probs: Mapping[str, float], defense: frozenset[str]
) -> float:
    n = len(risk)
    p = np.array([probs[leaf] for leaf in risk])
    total = 0.0
    for start in range(0, 1 << n, _BATCH):
        idx = np.arange(start, min(start + _BATCH, 1 << n), dtype=np.uint64)
        columns = {leaf: ((idx >> np.uint64(i)) & 1).astype(bool) for i, leaf in enumerate(risk)}
        truth = _evaluate_table(model, columns, defense)
        weights = np.ones(len(idx))
        for i, leaf in enumerate(risk):
            weights *= np.where(columns[leaf], p[i], 1.0 - p[i])
        total += float(weights[truth].sum())
    return total


def _exact_by_conditioning(
    model: Model, probs: Mapping[str, float], defense: frozenset[str]
) -> float:
    """Condition leaves one at a time, pruning once the TLE is determined.

    Leaves are taken in depth-first order from the TLE so sibling branches
    resolve before new ones open; with short-circuiting this keeps the
    recursion near-linear on shallow-branching models.
    """
    order = topological_order(model)
    leaf_order = _dfs_risk_order(model)
    assignment: dict[str, bool] = {}

    def rec(position: int) -> float:
        value = _eval_three_valued(model, order, assignment, defense)
        if value is not None:
            return 1.0 if value else 0.0
        leaf = leaf_order[position]
        p = probs[leaf]
        assignment[leaf] = True
        high = rec(position + 1)
        assignment[leaf] = False
        low = rec(position + 1)
        del assignment[leaf]
        return p * high + (1.0 - p) * low

    return rec(0)


def _dfs_risk_order(model: Model) -> list[str]:
    order: list[str] = []
    seen: set[str] = set()
    stack = [model.tle]
    while stack:
        nid = stack.pop()
        if nid in seen or nid not in model.nodes:
            continue
        seen.add(nid)
        node = model.nodes[nid]
        if node.kind in (LeafKind.BAS, LeafKind.BCF):
            order.append(nid)
            continue
        stack.extend(reversed(node.successors()))
    return order


def _eval_three_valued(
    model: Model,
    order: Sequence[str],
    assignment: Mapping[str, bool],
    defense: frozenset[str],
) -> bool | None:
    """Structure function over {True, False, unknown}; None means undetermined."""
    values: dict[str, bool | None] = {}
    for nid in order:
        node = model.nodes[nid]
        if node.is_leaf:
            if node.kind is LeafKind.BDS:
                values[nid] = nid in defense
            else:
                values[nid] = assignment.get(nid)
        elif node.kind in (GateKind.AND, GateKind.OR):
            short = node.kind is GateKind.OR  # value that decides the gate alone
            inputs = [values[c] for c in node.children]
            if short in inputs:
                values[nid] = short
            elif None in inputs:
                values[nid] = None
            else:
                values[nid] = not short
        elif node.kind is GateKind.VOT:
            inputs = [values[c] for c in node.children]
            fired = sum(1 for v in inputs if v is True)
            open_ = sum(1 for v in inputs if v is None)
            values[nid] = True if fired >= node.k else (False if fired + open_ < node.k else None)
        else:  # INH
            guard = values[node.defense]
            event = values[node.event]
            if not guard:
                values[nid] = event
            else:
                disabled = values[node.disabler] if node.disabler is not None else False
                if event is False or disabled is False:
                    values[nid] = False
                elif event is True and disabled is True:
                    values[nid] = True
                else:
                    values[nid] = None
    return values[model.tle]


def tle_probability_mc(
    model: Model,
    probs: Mapping[str, float],
    defense: Iterable[str] = (),
    *,
    samples: int,
    seed: int,
) -> ProbResult:
    """Monte-Carlo estimate; a pure function of (model, probs, defense, samples, seed).

    Sampling is batched at a fixed size so the same seed yields the same
    estimate regardless of available memory.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    deployed = _defense_set(model, defense)
    p = _checked_probs(model, probs)
    risk = sorted(p)
    if not risk:
        value = float(evaluate(model, deployed))
        return ProbResult(value, Method.MONTE_CARLO, samples=samples, std_error=0.0, seed=seed)
    p_row = np.array([p[leaf] for leaf in risk])
    rng = np.random.default_rng(seed)
    hits = 0
    remaining = samples
    while remaining:
        batch = min(_BATCH, remaining)
        uniforms = rng.random((batch, len(risk)))
        columns = {leaf: uniforms[:, i] < p_row[i] for i, leaf in enumerate(risk)}
        hits += int(_evaluate_table(model, columns, deployed).sum())
        remaining -= batch
    value = hits / samples
    std_error = math.sqrt(value * (1.0 - value) / samples)
    return ProbResult(value, Method.MONTE_CARLO, samples=samples, std_error=std_error, seed=seed)


def defense_probability_sweep(
    model: Model,
    probs: Mapping[str, float],
    defense_subsets: Sequence[Iterable[str]],
    *,
    max_leaves: int = DEFAULT_MAX_EXACT_LEAVES,
) -> list[tuple[tuple[str, ...], ProbResult]]:
    """Exact probability per defense subset, in the order given.

    On disabler-free models the values are anti-monotone: deploying more
    defenses never increases the TLE probability.
    """
    out: list[tuple[tuple[str, ...], ProbResult]] = []
    for subset in defense_subsets:
        deployed = _defense_set(model, subset)
        result = tle_probability_exact(model, probs, deployed, max_leaves=max_leaves)
        out.append((tuple(sorted(deployed)), result))
    return out
