"""Hyperparameter spaces for the four learners."""

from __future__ import annotations

from dataclasses import dataclass


class HyperParamError(ValueError):
    pass


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: str            # "float" | "int" | "choice"
    lo: float = 0.0
    hi: float = 0.0
    choices: tuple = ()

    def validate(self, value):
        if self.kind == "choice":
            if value not in self.choices:
                raise HyperParamError(f"{self.name}: {value!r} not in {self.choices}")
            return value
        if self.kind == "int":
            if not float(value).is_integer():
                raise HyperParamError(f"{self.name}: expected integer, got {value!r}")
            value = int(value)
        else:
            value = float(value)
        if not (self.lo <= value <= self.hi):
            raise HyperParamError(
                f"{self.name}: {value!r} outside [{self.lo}, {self.hi}]"
            )
        return value

    def sample(self, rng):
        if self.kind == "choice":
            return rng.choice(self.choices)
        if self.kind == "int":
            return rng.randint(int(self.lo), int(self.hi))
        return rng.uniform(self.lo, self.hi)

    def mutate(self, value, rng):
        if self.kind in ("choice", "int"):
            return self.sample(rng)
        # gaussian step, sigma = 10% of range, clipped
        sigma = 0.1 * (self.hi - self.lo)
        return min(self.hi, max(self.lo, value + rng.gauss(0.0, sigma)))


SPACES: dict[str, tuple[ParamSpec, ...]] = {
    "logreg": (
        ParamSpec("lr", "float", 1e-4, 1.0),
        ParamSpec("l2", "float", 0.0, 1.0),
        ParamSpec("epochs", "int", 10, 500),
    ),
    "linsvm": (
        ParamSpec("C", "float", 1e-3, 100.0),
        ParamSpec("epochs", "int", 10, 500),
    ),
    "dtree": (
        ParamSpec("max_depth", "int", 1, 30),
        ParamSpec("min_samples_split", "int", 2, 50),
    ),
    "rforest": (
        ParamSpec("n_trees", "int", 5, 100),
        ParamSpec("max_depth", "int", 1, 20),
        ParamSpec("feature_frac", "float", 0.2, 1.0),
    ),
}

ALGORITHMS = tuple(SPACES)


@dataclass(frozen=True)
class HyperParams:
    algorithm: str
    params: dict

    def __post_init__(self):
        if self.algorithm not in SPACES:
            raise HyperParamError(f"unknown algorithm {self.algorithm!r}")
        space = {s.name: s for s in SPACES[self.algorithm]}
        missing = set(space) - set(self.params)
        if missing:
            raise HyperParamError(f"missing params: {sorted(missing)}")
        extra = set(self.params) - set(space)
        if extra:
            raise HyperParamError(f"unknown params: {sorted(extra)}")
        for name, value in self.params.items():
            self.params[name] = space[name].validate(value)

    def to_dict(self) -> dict:
        return {"algorithm": self.algorithm, "params": dict(self.params)}

    @staticmethod
    def from_dict(d: dict) -> "HyperParams":
        return HyperParams(d["algorithm"], dict(d["params"]))


def sample_hyperparams(algorithm: str, rng) -> HyperParams:
    return HyperParams(algorithm, {s.name: s.sample(rng) for s in SPACES[algorithm]})
