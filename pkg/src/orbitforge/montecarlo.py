"""Seeded Monte Carlo ensembles over scenario configuration parameters.

Each run ``k`` draws from its own generator seeded with
``splitmix64(master_seed + (k + 1) * 0x9E3779B97F4A7C15)``, so sampled values
and outputs do not depend on worker count or completion order.

Archive layout::

    <dir>/manifest.json
    <dir>/run_<k>/outputs.csv
    <dir>/run_<k>/telemetry.jsonl
"""

from __future__ import annotations

import json
import logging
import shutil
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .scenario.config import ScenarioConfig, get_parameter, with_parameter
from .scenario.export import export_csv, export_telemetry_jsonl, read_csv
from .scenario.scenarios import KINDS, build_scenario, run_scenario

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MANIFEST = "manifest.json"
MANIFEST_VERSION = 1


class ArchiveError(RuntimeError):
    pass


class ArchiveIntegrityError(ArchiveError):
    pass


def splitmix64(x: int) -> int:
    z = x & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def run_seed(master_seed: int, run_index: int) -> int:
    return splitmix64((master_seed + (run_index + 1) * GOLDEN_GAMMA) & MASK64)


def run_rng(master_seed: int, run_index: int) -> np.random.Generator:
    return np.random.default_rng(run_seed(master_seed, run_index))


@dataclass
class UniformDispersion:
    target: str
    lo: float
    hi: float
    kind = "uniform"

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"uniform dispersion on {self.target}: need lo < hi ({self.lo}, {self.hi})")

    def sample(self, rng: np.random.Generator, base=None) -> float:
        return float(rng.uniform(self.lo, self.hi))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "target": self.target, "bounds": [self.lo, self.hi]}


@dataclass
class NormalVectorCartDispersion:
    """Gaussian 3-vector about ``mean`` (the base value when omitted).

    ``std`` is an isotropic scalar or a per-component 3-vector.
    """

    target: str
    std: Union[float, Sequence[float]]
    mean: Optional[Sequence[float]] = None
    kind = "normal_vector_cart"

    def __post_init__(self):
        std = np.broadcast_to(np.asarray(self.std, dtype=float), (3,))
        if np.any(std <= 0):
            raise ValueError(f"normal dispersion on {self.target}: std must be > 0")
        if self.mean is not None and len(self.mean) != 3:
            raise ValueError(f"normal dispersion on {self.target}: mean must have 3 components")

    def sample(self, rng: np.random.Generator, base=None) -> list[float]:
        mean = np.asarray(self.mean if self.mean is not None else base, dtype=float)
        if mean.shape != (3,):
            raise ValueError(f"normal dispersion on {self.target}: no 3-vector mean available")
        std = np.broadcast_to(np.asarray(self.std, dtype=float), (3,))
        return (mean + std * rng.standard_normal(3)).tolist()

    def to_dict(self) -> dict:
        std = self.std if np.isscalar(self.std) else [float(s) for s in self.std]
        mean = None if self.mean is None else [float(m) for m in self.mean]
        return {"kind": self.kind, "target": self.target, "std": std, "mean": mean}


Dispersion = Union[UniformDispersion, NormalVectorCartDispersion]


def sample_dispersion(spec: Dispersion, rng: np.random.Generator, base=None):
    return spec.sample(rng, base)


def parse_dispersion(text: str) -> Dispersion:
    """Parse ``kind:target:params``.

    ``uniform:spacecraft.mass:700:800`` or
    ``normal_vector_cart:spacecraft.r_CN_N_init:STD[:MX,MY,MZ]`` (``normal``
    is accepted as a short kind; STD may be ``sx,sy,sz``).
    """
    parts = text.split(":")
    if len(parts) < 3:
        raise ValueError(f"bad dispersion {text!r}; expected kind:target:params")
    kind, target, params = parts[0], parts[1], parts[2:]

    def nums(s):
        return [float(x) for x in s.split(",")]

    try:
        if kind == "uniform":
            if len(params) != 2:
                raise ValueError("uniform takes LO:HI")
            return UniformDispersion(target, float(params[0]), float(params[1]))
        if kind in ("normal", "normal_vector_cart"):
            if len(params) not in (1, 2):
                raise ValueError("normal_vector_cart takes STD[:MX,MY,MZ]")
            std = nums(params[0])
            mean = nums(params[1]) if len(params) == 2 else None
            return NormalVectorCartDispersion(target, std[0] if len(std) == 1 else std, mean)
    except ValueError as exc:
        raise ValueError(f"bad dispersion {text!r}: {exc}") from None
    raise ValueError(f"bad dispersion {text!r}: unknown kind {kind!r} (uniform, normal_vector_cart)")


@dataclass
class McPlan:
    config: ScenarioConfig
    kind: str = "earthOrbit"
    execution_count: int = 1
    archive_dir: Path = Path("monte_carlo_results")
    master_seed: int = 0
    dispersions: list[Dispersion] = field(default_factory=list)
    workers: int = 1
    mode: Optional[str] = None

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if self.execution_count < 1:
            raise ValueError("execution count must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        targets = [d.target for d in self.dispersions]
        if len(set(targets)) != len(targets):
            raise ValueError("dispersion targets must be unique")
        for d in self.dispersions:
            get_parameter(self.config, d.target)


@dataclass
class McArchive:
    path: Path
    manifest: dict

    @property
    def runs(self) -> list[dict]:
        return self.manifest["runs"]

    def run_dir(self, k: int) -> Path:
        return self.path / f"run_{k}"

    def outputs(self, k: int) -> tuple[list[str], np.ndarray]:
        return read_csv(self.run_dir(k) / "outputs.csv")


def _execute_run(config: ScenarioConfig, kind: str, mode, seed: int, index: int,
                 dispersions: Sequence[Dispersion]) -> dict:
    """Run one ensemble member; returns manifest entry plus output text."""
    rng = run_rng(seed, index)
    values = {}
    entry = {"index": index, "seed": run_seed(seed, index), "status": "success",
             "values": values, "error": None}
    try:
        cfg = config
        for d in dispersions:
            value = d.sample(rng, get_parameter(config, d.target))
            values[d.target] = value
            cfg = with_parameter(cfg, d.target, value)
        inst = build_scenario(cfg, kind)
        bundle = run_scenario(inst, mode=mode)
        with tempfile.TemporaryDirectory() as tmp:
            csv_text = export_csv(bundle, Path(tmp) / "o.csv").read_text()
            jsonl_text = export_telemetry_jsonl(bundle, Path(tmp) / "t.jsonl").read_text()
        return {"entry": entry, "csv": csv_text, "jsonl": jsonl_text}
    except Exception as exc:
        entry["status"] = "failed"
        entry["error"] = f"{type(exc).__name__}: {exc}"
        return {"entry": entry, "csv": None, "jsonl": None}


def _prepare_archive(path: Path, force: bool) -> None:
    if path.exists() and any(path.iterdir()):
        if not force:
            raise ArchiveError(f"archive directory {path} already exists; use force to overwrite")
        shutil.rmtree(path)
    path.mkdir(parents=True, exist_ok=True)


def execute_simulations(plan: McPlan, force: bool = False, progress=None) -> McArchive:
    plan.validate()
    path = Path(plan.archive_dir)
    _prepare_archive(path, force)
    args = [(plan.config, plan.kind, plan.mode, plan.master_seed, k, plan.dispersions)
            for k in range(plan.execution_count)]

    entries = {}

    def store(result):
        # single writer: only this process touches the archive
        entry = result["entry"]
        k = entry["index"]
        if entry["status"] == "success":
            run_dir = path / f"run_{k}"
            run_dir.mkdir()
            (run_dir / "outputs.csv").write_text(result["csv"])
            (run_dir / "telemetry.jsonl").write_text(result["jsonl"])
        else:
            logger.warning("run %d failed: %s", k, entry["error"])
        entries[k] = entry
        if progress is not None:
            progress(entry)

    if plan.workers == 1:
        for a in args:
            store(_execute_run(*a))
    else:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            futures = [pool.submit(_execute_run, *a) for a in args]
            for fut in futures:
                store(fut.result())

    manifest = {
        "version": MANIFEST_VERSION,
        "scenario_kind": plan.kind,
        "mode": plan.mode,
        "seed": plan.master_seed,
        "count": plan.execution_count,
        "seed_mix": "splitmix64(seed + (k + 1) * 0x9E3779B97F4A7C15)",
        "dispersions": [d.to_dict() for d in plan.dispersions],
        "base_config": plan.config.to_dict(),
        "runs": [entries[k] for k in range(plan.execution_count)],
    }
    (path / MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n")
    return McArchive(path, manifest)


def load_archive(path) -> McArchive:
    path = Path(path)
    mpath = path / MANIFEST
    if not mpath.is_file():
        raise ArchiveError(f"no manifest in {path}")
    try:
        manifest = json.loads(mpath.read_text())
        count = int(manifest["count"])
        runs = manifest["runs"]
    except (ValueError, KeyError, TypeError) as exc:
        raise ArchiveError(f"corrupt manifest {mpath}: {exc}") from None
    if len(runs) != count:
        raise ArchiveIntegrityError(f"manifest lists {len(runs)} runs but count is {count}")
    for entry in runs:
        if entry.get("status") != "success":
            continue
        run_dir = path / f"run_{entry['index']}"
        for name in ("outputs.csv", "telemetry.jsonl"):
            if not (run_dir / name).is_file():
                raise ArchiveIntegrityError(
                    f"run_{entry['index']}: missing {name} for a successful run")
    return McArchive(path, manifest)
