import os

from .exceptions import ConfigError


DEFAULT_TRIALS = 1000


def env_flag(name: str, default: bool = False) -> bool:
    value = os.getenv(name)
    if value is None:
        return default

    return value.strip().lower() == "true"


def env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or not value.strip():
        return default

    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {value!r}") from None


def debug_enabled() -> bool:
    return env_flag("JACKMAC_DEBUG")


def default_seed() -> int:
    return env_int("JACKMAC_SEED", 0)


def default_trials() -> int:
    return env_int("JACKMAC_TRIALS", DEFAULT_TRIALS)
