"""Multi-objective evolutionary hyperparameter search.

Maximizes accuracy and minimizes |EOD| or |AOD| on the held-out split,
keeping an archive of non-dominated candidates whose accuracy stays within
a band of the best accuracy seen so far.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import learners, metrics
from .learners.spaces import SPACES, HyperParams, sample_hyperparams
from .tabular import SplitPair

OBJECTIVES = ("EOD", "AOD")


class SearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    algorithm: str
    objective: str = "EOD"
    accuracy_band: float = 0.05
    population_size: int = 20
    evaluation_budget: int = 200
    seed: int = 0
    mutation_rate: float | None = None  # default 1/number-of-params

    def __post_init__(self):
        if self.algorithm not in SPACES:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        if not (0.0 <= self.accuracy_band <= 1.0):
            raise ValueError("accuracy_band must be in [0, 1]")
        if self.evaluation_budget < 1:
            raise ValueError("evaluation_budget must be >= 1")
        if self.population_size < 1:
            raise ValueError("population_size must be >= 1")

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "objective": self.objective,
            "accuracy_band": self.accuracy_band,
            "population_size": self.population_size,
            "evaluation_budget": self.evaluation_budget,
            "seed": self.seed,
            "mutation_rate": self.mutation_rate,
        }

    @staticmethod
    def from_dict(d: dict) -> "SearchConfig":
        return SearchConfig(**{k: v for k, v in d.items() if v is not None
                               or k == "mutation_rate"})


@dataclass(frozen=True)
class Candidate:
    id: str
    hp: HyperParams
    accuracy: float
    objective: float  # |EOD| or |AOD|
    order: int        # evaluation sequence number

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "hyperparams": self.hp.to_dict(),
            "accuracy": self.accuracy,
            "objective": self.objective,
            "order": self.order,
        }

    @staticmethod
    def from_dict(d: dict) -> "Candidate":
        return Candidate(d["id"], HyperParams.from_dict(d["hyperparams"]),
                         d["accuracy"], d["objective"], d["order"])


def dominates(a: Candidate, b: Candidate) -> bool:
    """Higher accuracy, lower objective, at least one strict."""
    return (a.accuracy >= b.accuracy and a.objective <= b.objective
            and (a.accuracy > b.accuracy or a.objective < b.objective))


@dataclass
class ParetoArchive:
    accuracy_band: float
    members: list = field(default_factory=list)
    best_accuracy: float = float("-inf")

    def _floor(self) -> float:
        return (1.0 - self.accuracy_band) * self.best_accuracy

    def offer(self, c: Candidate) -> bool:
        if c.accuracy > self.best_accuracy:
            self.best_accuracy = c.accuracy
            self.members = [m for m in self.members if m.accuracy >= self._floor()]
        if c.accuracy < self._floor():
            return False
        for m in self.members:
            if dominates(m, c):
                return False
            if m.accuracy == c.accuracy and m.objective == c.objective:
                return False  # exact tie: keep the earlier candidate
        self.members = [m for m in self.members if not dominates(c, m)]
        self.members.append(c)
        return True

    def to_dict(self) -> dict:
        return {
            "accuracy_band": self.accuracy_band,
            "best_accuracy": self.best_accuracy,
            "members": [m.to_dict() for m in sorted(self.members, key=lambda m: m.order)],
        }


def pareto_front(candidates) -> list:
    """Brute-force non-dominated subset (the oracle for archive testing)."""
    return [c for c in candidates
            if not any(dominates(o, c) for o in candidates)]


def _pareto_ranks(population: list[Candidate]) -> dict[str, int]:
    ranks = {}
    remaining = list(population)
    rank = 0
    while remaining:
        front = pareto_front(remaining)
        front_ids = {c.id for c in front}
        # exact duplicates land in the same front
        for c in front:
            ranks[c.id] = rank
        remaining = [c for c in remaining if c.id not in front_ids]
        rank += 1
    return ranks


@dataclass
class SearchResult:
    config: SearchConfig
    archive: ParetoArchive
    evaluated: list          # all Candidates in evaluation order
    models: dict             # candidate id -> TrainedModel


def make_split_evaluator(split: SplitPair, cfg: SearchConfig):
    """Default evaluator: train on the 80%, score on the held-out 20%."""
    def evaluator(hp: HyperParams, seed: int):
        model = learners.train(split.train, hp, seed)
        report = metrics.evaluate(model, split.test)
        obj = abs(report.eod if cfg.objective == "EOD" else report.aod)
        return report.accuracy, obj, model
    return evaluator


def search(split: SplitPair | None, cfg: SearchConfig, evaluator=None,
           progress=None) -> SearchResult:
    """Run the evolutionary search; deterministic under (split, cfg)."""
    if evaluator is None:
        if split is None:
            raise ValueError("either a split or an evaluator is required")
        evaluator = make_split_evaluator(split, cfg)
    rng = random.Random(cfg.seed)
    space = SPACES[cfg.algorithm]
    mut_rate = cfg.mutation_rate if cfg.mutation_rate is not None else 1.0 / len(space)
    archive = ParetoArchive(cfg.accuracy_band)
    evaluated: list[Candidate] = []
    models: dict = {}
    failures = 0

    def evaluate(hp: HyperParams):
        nonlocal failures
        order = len(evaluated) + failures
        if order >= cfg.evaluation_budget:
            return None
        cid = f"{cfg.algorithm}-{order:04d}"
        try:
            acc, obj, model = evaluator(hp, cfg.seed)
        except learners.TrainingError:
            failures += 1
            return None
        c = Candidate(cid, hp, float(acc), float(obj), order)
        evaluated.append(c)
        models[cid] = model
        archive.offer(c)
        if progress is not None:
            progress(order + 1, cfg.evaluation_budget)
        return c

    def budget_left():
        return len(evaluated) + failures < cfg.evaluation_budget

    population = []
    for _ in range(min(cfg.population_size, cfg.evaluation_budget)):
        c = evaluate(sample_hyperparams(cfg.algorithm, rng))
        if c is not None:
            population.append(c)

    while budget_left():
        if not population:
            break
        ranks = _pareto_ranks(population)

        def tournament():
            a, b = rng.choice(population), rng.choice(population)
            return a if ranks[a.id] <= ranks[b.id] else b

        children = []
        for _ in range(cfg.population_size):
            if not budget_left():
                break
            p1, p2 = tournament(), tournament()
            params = {}
            for spec in space:
                src = p1 if rng.random() < 0.5 else p2
                v = src.hp.params[spec.name]
                if rng.random() < mut_rate:
                    v = spec.mutate(v, rng)
                params[spec.name] = v
            c = evaluate(HyperParams(cfg.algorithm, params))
            if c is not None:
                children.append(c)
        if children:
            population = children

    if not evaluated:
        raise SearchError("all candidates failed to train")
    return SearchResult(cfg, archive, evaluated, models)


def archive_to_scatter(archive: ParetoArchive, all_evaluated) -> list[dict]:
    """One point per evaluated candidate, flagged if it is in the archive."""
    pareto_ids = {m.id for m in archive.members}
    return [
        {
            "model_id": c.id,
            "accuracy": c.accuracy,
            "objective": c.objective,
            "is_pareto": c.id in pareto_ids,
        }
        for c in all_evaluated
    ]
