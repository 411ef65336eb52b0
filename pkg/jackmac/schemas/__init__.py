"""JSON schemas for every ``--json`` payload the CLI prints."""

import json

from functools import lru_cache
from importlib import resources

from ..exceptions import ConfigError


SCHEMAS = (
    "jack_result",
    "sim_report",
    "comparison",
    "csm_structure",
    "design_inventory",
    "suite_result",
    "quantize_stats",
)


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    if name not in SCHEMAS:
        raise ConfigError(f"no bundled schema {name!r}")

    return json.loads(resources.files(__name__).joinpath(f"{name}.json").read_text("utf-8"))
