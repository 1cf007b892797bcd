"""Bundled example networks (see ``fixtures/*.md`` for their constraint lists)."""

import json
from importlib import resources

from .network import Network, network_from_dict

NAMES = ("fig3", "fig4", "fig5", "fig4_weighted", "fig5_weighted")


def fixture_path(name: str):
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(NAMES)}")
    return resources.files(__package__) / "fixtures" / f"{name}.json"


def load_fixture(name: str) -> Network:
    return network_from_dict(json.loads(fixture_path(name).read_text(encoding="utf-8")))
