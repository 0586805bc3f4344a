"""Bundled example models.

Three ready-made trees ship with the package:

* ``fig3_aft``: a toy attack-fault tree without defenses; it has exactly
  four minimal cut sets.
* ``fig4_afdt``: the same tree with two defenses, one of which can be
  disabled by an extra component failure.
* ``gsaas``: a ground-segment-as-a-service risk model with 22 minimal cut
  sets and 8 defenses.

``load`` returns parsed models; ``source`` returns the raw DSL text.
"""

from __future__ import annotations

from importlib import resources

from ..dsl import parse
from ..model import Model

_FILES = {
    "fig3_aft": "fig3_aft.afdt",
    "fig4_afdt": "fig4_afdt.afdt",
    "gsaas": "gsaas.afdt",
}


def names() -> list[str]:
    return sorted(_FILES)


def source(name: str) -> str:
    """Raw DSL text of a bundled model."""
    try:
        filename = _FILES[name]
    except KeyError:
        raise KeyError(f"no bundled model named {name!r}; choices: {', '.join(names())}") from None
    return resources.files(__package__).joinpath(filename).read_text(encoding="utf-8")


def load(name: str) -> Model:
    """Parse a bundled model by name."""
    model = parse(source(name))
    model.name = name
    return model
