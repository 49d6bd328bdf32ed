"""Solver configuration, overridable from a flat key=value file."""

from __future__ import annotations

from dataclasses import dataclass, fields

__all__ = ["SolverConfig", "parse_config_file"]


@dataclass
class SolverConfig:
    ode_rtol: float = 1e-10
    tail_eps: float = 1e-12
    volterra_rel_tol: float = 1e-14
    volterra_points_per_rate: float = 10.0
    profile_grid_step: float = 0.01
    z_max: float = 64.0
    spread_tol: float = 1e-7
    inverse_tol: float = 1e-8
    inverse_solver_tol: float = 1e-9
    inverse_tail_eps: float = 1e-10
    inverse_grid_step: float = 0.02
    inverse_max_iter: int = 200

    def apply_overrides(self, pairs: dict):
        valid = {f.name: f.type for f in fields(self)}
        for key, raw in pairs.items():
            if key not in valid:
                raise KeyError(f"unknown config key '{key}'")
            current = getattr(self, key)
            setattr(self, key, type(current)(raw))
        return self


def parse_config_file(path: str) -> dict:
    """Flat key=value lines; '#' comments and blank lines ignored."""
    pairs = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            pairs[key.strip()] = value.strip()
    return pairs
