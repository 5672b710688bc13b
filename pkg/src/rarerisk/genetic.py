"""Genetic search over binary predictor profiles.

A chromosome is a length-p {0,1} vector. Selection is linear-rank
(scale-invariant, which suits probability-valued fitness crowding toward
1), reproduction is single-point crossover plus independent per-gene
mutation, and the fittest fraction of each generation is carried over
unchanged, which makes the best-fitness trace non-decreasing.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import GeneticError

__all__ = [
    "GaConfig",
    "Population",
    "GaTrace",
    "evolve",
    "rank_select",
    "single_point_crossover",
    "mutate",
    "save_population_csv",
    "load_population_csv",
]

SELECTION_OPERATOR = "linear_rank"
REPLACEMENT_SCHEME = "generational_with_elitism"

FitnessFn = Callable[[np.ndarray], float]
BatchFitnessFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GaConfig:
    pop_size: int = 500
    generations: int = 100
    p_mutation: float = 0.10
    p_crossover: float = 0.80
    elitism_fraction: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.pop_size < 2:
            raise GeneticError("pop_size must be at least 2")
        if self.generations < 1:
            raise GeneticError("generations must be at least 1")
        for name in ("p_mutation", "p_crossover", "elitism_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise GeneticError(f"{name} must lie in [0, 1], got {v}")
        if 0 < self.elitism_fraction and self.n_elite < 1:
            raise GeneticError(
                "elitism_fraction too small: fewer than one elite per generation"
            )
        if self.seed < 0:
            raise GeneticError("seed must be a non-negative integer")

    @property
    def n_elite(self) -> int:
        return int(round(self.elitism_fraction * self.pop_size))


@dataclass(frozen=True)
class Population:
    """Fixed-size set of chromosomes with their cached fitness values."""

    members: np.ndarray  # (pop_size, p) uint8
    fitness: np.ndarray  # (pop_size,) float64

    def __post_init__(self):
        members = np.asarray(self.members, np.uint8)
        fitness = np.asarray(self.fitness, np.float64)
        if members.ndim != 2:
            raise GeneticError("members must be a 2-d matrix")
        if members.size and members.max() > 1:
            raise GeneticError("chromosome genes must be 0 or 1")
        if fitness.shape != (members.shape[0],):
            raise GeneticError("fitness must parallel members")
        members = np.ascontiguousarray(members)
        members.flags.writeable = False
        fitness = np.ascontiguousarray(fitness)
        fitness.flags.writeable = False
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "fitness", fitness)

    @property
    def size(self) -> int:
        return self.members.shape[0]

    @property
    def p(self) -> int:
        return self.members.shape[1]

    def best(self) -> tuple[np.ndarray, float]:
        k = int(np.argmax(self.fitness))
        return self.members[k], float(self.fitness[k])


@dataclass(frozen=True)
class GaTrace:
    """Per-generation statistics plus the final population.

    Row 0 describes the initial random population; one row follows for
    each evolution step, so there are generations + 1 records in total.
    """

    best: np.ndarray
    mean: np.ndarray
    median: np.ndarray
    final: Population
    config: GaConfig
    selection_operator: str = SELECTION_OPERATOR
    replacement_scheme: str = REPLACEMENT_SCHEME

    @property
    def n_generations(self) -> int:
        return len(self.best) - 1


def _rank_probabilities(fitness: np.ndarray) -> np.ndarray:
    """Linear-rank selection weights: worst gets 1, best gets n."""
    n = len(fitness)
    order = np.argsort(fitness, kind="stable")
    weights = np.empty(n)
    weights[order] = np.arange(1, n + 1, dtype=np.float64)
    return weights / weights.sum()


def rank_select(pop: Population, rng: np.random.Generator) -> np.ndarray:
    """Draw one member with probability proportional to its linear rank."""
    if pop.size == 0:
        raise GeneticError("cannot select from an empty population")
    probs = _rank_probabilities(pop.fitness)
    k = int(rng.choice(pop.size, p=probs))
    return pop.members[k].copy()


def single_point_crossover(
    a: np.ndarray,
    b: np.ndarray,
    cut: int | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Swap all genes to the right of the cut position.

    Children keep their parent's genes at positions <= cut (1-based) and
    exchange the rest. cut may range from 0 (full swap) to p (no change);
    when omitted it is drawn uniformly from {1, ..., p-1} using rng.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise GeneticError("parents must be 1-d vectors of equal length")
    p = len(a)
    if cut is None:
        if rng is None:
            raise GeneticError("either cut or rng must be given")
        if p < 2:
            cut = p
        else:
            cut = int(rng.integers(1, p))
    if not 0 <= cut <= p:
        raise GeneticError(f"cut must lie in [0, {p}], got {cut}")
    child1 = np.concatenate([a[:cut], b[cut:]])
    child2 = np.concatenate([b[:cut], a[cut:]])
    return child1, child2


def mutate(
    c: np.ndarray, p_mutation: float, rng: np.random.Generator
) -> np.ndarray:
    """Flip each gene independently with probability p_mutation."""
    c = np.asarray(c)
    flips = rng.random(c.shape) < p_mutation
    return np.where(flips, 1 - c, c).astype(c.dtype)


def _evaluate(
    fitness: FitnessFn | None,
    batch_fitness: BatchFitnessFn | None,
    members: np.ndarray,
    out: np.ndarray,
    rows: np.ndarray,
) -> None:
    if batch_fitness is not None:
        values = np.asarray(batch_fitness(members[rows]), np.float64)
        bad = ~np.isfinite(values)
        if bad.any():
            k = rows[int(np.argmax(bad))]
            raise GeneticError(
                f"fitness returned non-finite value for chromosome "
                f"{members[k].tolist()}"
            )
        out[rows] = values
        return
    for i in rows:
        v = float(fitness(members[i]))
        if not np.isfinite(v):
            raise GeneticError(
                f"fitness returned non-finite value {v!r} for chromosome "
                f"{members[i].tolist()}"
            )
        out[i] = v


def evolve(
    fitness: FitnessFn | None,
    p: int,
    config: GaConfig,
    *,
    batch_fitness: BatchFitnessFn | None = None,
) -> GaTrace:
    """Run the genetic search and return the full trace.

    The initial population is uniform random. Each step: elites are copied
    unchanged, the rest of the next generation is bred by rank selection,
    single-point crossover (probability p_crossover, else the parents pass
    through) and per-gene mutation. Deterministic given config.seed.

    batch_fitness, when given, evaluates a whole (m, p) matrix at once and
    takes precedence over the per-chromosome callable.
    """
    if p < 1:
        raise GeneticError("chromosome length p must be at least 1")
    if fitness is None and batch_fitness is None:
        raise GeneticError("a fitness function is required")
    rng = np.random.default_rng(config.seed)
    n, n_elite = config.pop_size, config.n_elite

    members = rng.integers(0, 2, size=(n, p), dtype=np.uint8)
    fit = np.empty(n)
    _evaluate(fitness, batch_fitness, members, fit, np.arange(n))

    best = [float(fit.max())]
    mean = [float(fit.mean())]
    median = [float(np.median(fit))]

    for _ in range(config.generations):
        probs = _rank_probabilities(fit)
        n_children = n - n_elite
        # Parents for the whole brood are drawn up front from one stream.
        parent_idx = rng.choice(n, size=(n_children + 1) // 2 * 2, p=probs)
        do_cross = rng.random(len(parent_idx) // 2) < config.p_crossover
        cuts = (
            rng.integers(1, p, size=len(do_cross))
            if p > 1
            else np.full(len(do_cross), p)
        )

        children = np.empty((len(parent_idx), p), dtype=np.uint8)
        for k in range(len(do_cross)):
            pa = members[parent_idx[2 * k]]
            pb = members[parent_idx[2 * k + 1]]
            if do_cross[k] and p > 1:
                c1, c2 = single_point_crossover(pa, pb, cut=int(cuts[k]))
            else:
                c1, c2 = pa.copy(), pb.copy()
            children[2 * k] = c1
            children[2 * k + 1] = c2
        children = children[:n_children]
        flips = rng.random(children.shape) < config.p_mutation
        children = np.where(flips, 1 - children, children).astype(np.uint8)

        if n_elite > 0:
            # Highest-fitness members survive unchanged, fitness cached.
            elite_idx = np.argsort(fit, kind="stable")[::-1][:n_elite]
            new_members = np.vstack([members[elite_idx], children])
            new_fit = np.empty(n)
            new_fit[:n_elite] = fit[elite_idx]
            members = new_members
            fit = new_fit
            _evaluate(fitness, batch_fitness, members, fit, np.arange(n_elite, n))
        else:
            members = children
            fit = np.empty(n)
            _evaluate(fitness, batch_fitness, members, fit, np.arange(n))

        best.append(float(fit.max()))
        mean.append(float(fit.mean()))
        median.append(float(np.median(fit)))

    return GaTrace(
        best=np.array(best),
        mean=np.array(mean),
        median=np.array(median),
        final=Population(members, fit),
        config=config,
    )


def save_population_csv(
    pop: Population, path: str | Path, names: Sequence[str] | None = None
) -> None:
    """Write members plus a fitness column; reload is bit-identical."""
    if names is None:
        width = max(2, len(str(pop.p)))
        names = [f"x{i + 1:0{width}d}" for i in range(pop.p)]
    if len(names) != pop.p:
        raise GeneticError(f"need {pop.p} predictor names, got {len(names)}")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(names) + ["fitness"])
        for genes, fv in zip(pop.members, pop.fitness):
            writer.writerow([str(int(g)) for g in genes] + [repr(float(fv))])


def load_population_csv(path: str | Path) -> tuple[Population, list[str]]:
    """Inverse of save_population_csv; returns (population, names)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[-1] != "fitness":
            raise GeneticError("population CSV must end with a fitness column")
        names = header[:-1]
        genes_rows, fitness = [], []
        for row in reader:
            if not row:
                continue
            genes_rows.append([int(v) for v in row[:-1]])
            fitness.append(float(row[-1]))
    if not genes_rows:
        raise GeneticError("population CSV has no members")
    pop = Population(
        np.array(genes_rows, np.uint8), np.array(fitness, np.float64)
    )
    return pop, names
