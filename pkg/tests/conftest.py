"""Shared fixtures: corpus models, repo paths, and a random model generator."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from afdt import corpus
from afdt.model import Model, Node, and_, bas, bcf, bds, inh, or_, vot

REPO_ROOT = Path(__file__).resolve().parent.parent
CORPUS_DIR = REPO_ROOT / "corpus"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def fig3() -> Model:
    return corpus.load("fig3_aft")


@pytest.fixture(scope="session")
def fig4() -> Model:
    return corpus.load("fig4_afdt")


@pytest.fixture(scope="session")
def gsaas() -> Model:
    return corpus.load("gsaas")


def make_random_model(
    rng: random.Random,
    *,
    max_risk: int = 10,
    max_defenses: int = 3,
    disabler_prob: float = 0.4,
) -> Model:
    """A random valid stratified model.

    Gates draw children from already-built nodes, so the result is acyclic by
    construction; the TLE collects every node that stayed parentless, so the
    whole graph is reachable.  BDS leaves are emitted only when some INH
    defense slot uses them, keeping the stratification rule intact.  Pass
    ``disabler_prob=0`` for disabler-free models.
    """
    n_bas = rng.randint(1, max_risk - 1)
    n_bcf = rng.randint(0, max_risk - n_bas)
    risk_ids = [f"a{i}" for i in range(n_bas)] + [f"c{i}" for i in range(n_bcf)]
    bds_ids = [f"d{i}" for i in range(rng.randint(0, max_defenses))]

    nodes: list[Node] = [bas(i) for i in risk_ids if i.startswith("a")]
    nodes += [bcf(i) for i in risk_ids if i.startswith("c")]
    pool = list(risk_ids)
    roots = set(risk_ids)
    bds_used: set[str] = set()
    counter = 0

    def fresh(prefix: str) -> str:
        nonlocal counter
        counter += 1
        return f"{prefix}{counter}"

    def slot_gate(prefix: str, members: list[str]) -> str:
        gid = fresh(prefix)
        build = and_ if rng.random() < 0.5 else or_
        nodes.append(build(gid, members))
        return gid

    for _ in range(rng.randint(1, 6)):
        kind = rng.choice(["and", "or", "vot"] + (["inh", "inh"] if bds_ids else []))
        if kind == "inh":
            event = rng.choice(pool)
            chosen = rng.sample(bds_ids, rng.randint(1, len(bds_ids)))
            bds_used.update(chosen)
            if len(chosen) == 1 and rng.random() < 0.7:
                defense_ref = chosen[0]
            else:
                defense_ref = slot_gate("dg", chosen)
            disabler_ref = None
            if rng.random() < disabler_prob:
                picks = rng.sample(risk_ids, rng.randint(1, min(2, len(risk_ids))))
                disabler_ref = picks[0] if len(picks) == 1 else slot_gate("xg", picks)
                roots.difference_update(picks)
            gid = fresh("g")
            nodes.append(inh(gid, event, defense_ref, disabler_ref))
            roots.discard(event)
        elif kind == "vot":
            size = rng.randint(1, min(4, len(pool)))
            children = rng.sample(pool, size)
            gid = fresh("g")
            nodes.append(vot(gid, rng.randint(1, size), children))
            roots.difference_update(children)
        else:
            size = rng.randint(1, min(3, len(pool)))
            children = rng.sample(pool, size)
            gid = fresh("g")
            build = and_ if kind == "and" else or_
            nodes.append(build(gid, children))
            roots.difference_update(children)
        roots.add(gid)
        pool.append(gid)

    nodes.append(or_("TLE", sorted(roots)))
    nodes += [bds(i) for i in sorted(bds_used)]
    return Model.from_nodes(nodes, "TLE")
