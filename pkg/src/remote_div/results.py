"""Result records shared by the solvers and the CLI."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class DiversitySolution:
    """A k-subset together with its evaluated objective value."""

    indices: list[int]
    value: float
    objective: str
    algorithm: str
    seed: int | None = None
    elapsed_seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "indices": list(self.indices),
            "value": self.value,
            "objective": self.objective,
            "algorithm": self.algorithm,
            "seed": self.seed,
            "elapsed_seconds": self.elapsed_seconds,
        }
