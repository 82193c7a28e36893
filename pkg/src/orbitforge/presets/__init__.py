"""Bundled scenario configurations."""

from importlib import resources

PRESETS = ("basic", "earth_orbit", "attitude_control")


def preset_path(name: str):
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return resources.files(__name__) / f"{name}.yaml"
