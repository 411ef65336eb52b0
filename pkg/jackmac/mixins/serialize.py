import json
import dataclasses

from enum import Enum
from typing import Any, Callable, Dict, Tuple

from ..exceptions import ConfigError


def _plain(value: Any) -> Any:
    if isinstance(value, JsonMixin):
        return value.to_dict()

    if isinstance(value, Enum):
        return value.value

    if isinstance(value, (tuple, list)):
        return [_plain(v) for v in value]

    if isinstance(value, (set, frozenset)):
        return sorted(_plain(v) for v in value)

    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}

    return value


class JsonMixin:
    """Dataclass <-> JSON object with exactly the dataclass fields.

    `__json_decoders__` maps a field name to the callable that rebuilds it;
    fields named in `__json_derived__` are written out but recomputed on load,
    and a mismatch is reported rather than silently dropped.
    """

    __json_decoders__: Dict[str, Callable[[Any], Any]] = {}
    __json_derived__: Tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            f.name: _plain(getattr(self, f.name))
            for f in dataclasses.fields(self)
            if not f.name.startswith("_")
        }

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("sort_keys", True)

        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict):
        if not isinstance(data, dict):
            raise ConfigError(f"{cls.__name__} expects a JSON object")

        names = {f.name for f in dataclasses.fields(cls) if not f.name.startswith("_")}
        required = {
            f.name
            for f in dataclasses.fields(cls)
            if f.init
            and f.default is dataclasses.MISSING
            and f.default_factory is dataclasses.MISSING
        }

        unknown = set(data) - names
        missing = required - set(data)
        if unknown or missing:
            raise ConfigError(
                f"{cls.__name__} fields mismatch: "
                f"unknown={sorted(unknown)} missing={sorted(missing)}"
            )

        kwargs = {}
        for name, value in data.items():
            if name in cls.__json_derived__:
                continue

            decoder = cls.__json_decoders__.get(name)
            try:
                kwargs[name] = decoder(value) if decoder else value
            except (TypeError, ValueError) as e:
                raise ConfigError(f"{cls.__name__}.{name}: {e}") from e

        instance = cls(**kwargs)

        for name in cls.__json_derived__:
            if name in data and data[name] != _plain(getattr(instance, name)):
                raise ConfigError(
                    f"{cls.__name__}.{name} is derived; "
                    f"expected {_plain(getattr(instance, name))!r}, got {data[name]!r}"
                )

        return instance

    @classmethod
    def from_json(cls, text: str):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{cls.__name__}: invalid JSON ({e})") from e

        return cls.from_dict(data)
