"""JSON run reports written by the command-line tools."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "1.0.0"


def sha256_file(path):
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def load_schema():
    text = resources.files("proxot").joinpath("schemas/run_report.schema.json").read_text()
    return json.loads(text)


def _floats(x):
    return [float(v) for v in np.asarray(x, dtype=np.float64).reshape(-1)]


@dataclass
class RunReport:
    command: list
    input_digests: dict
    epsilon: float
    divergence: float
    primal_value: float
    dual_value: float
    gap: float
    iterations: int
    converged: bool
    weights_w: list
    potentials: dict
    timing_ms: float
    solver_config: dict
    extra: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    @classmethod
    def from_solution(cls, sol, command, digests, timing_ms, solver_config, extra=None):
        return cls(
            command=list(command),
            input_digests=dict(digests),
            epsilon=float(sol.epsilon),
            divergence=float(sol.divergence),
            primal_value=float(sol.primal_value),
            dual_value=float(sol.dual_value),
            gap=float(sol.gap),
            iterations=int(sol.iterations),
            converged=bool(sol.converged),
            weights_w=_floats(sol.weights_w),
            potentials={"phi": _floats(sol.potentials.phi), "psi": _floats(sol.potentials.psi)},
            timing_ms=float(timing_ms),
            solver_config=config_dict(solver_config),
            extra=dict(extra or {}),
        )

    def to_dict(self):
        return dataclasses.asdict(self)

    def to_json(self):
        # repr-based float output keeps every bit of each double
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))

    def write(self, path):
        Path(path).write_text(self.to_json())


def config_dict(cfg):
    if cfg is None:
        return {}
    if dataclasses.is_dataclass(cfg):
        return {f.name: getattr(cfg, f.name) for f in dataclasses.fields(cfg)}
    return dict(cfg)
