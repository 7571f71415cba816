"""Backward-in-time diffusion-and-branching trees and their multiplicative functionals.

A particle started at ``(t, x)`` diffuses for an exponential clock time. If
the clock outlasts the remaining time the particle reaches time zero and
becomes an initial-condition leaf. Otherwise a branch rule is chosen with its
probability; the rule multiplies the tree weight, may sample the noise at the
branch point, and spawns ``offspring`` particles there. The sampling
probabilities equal the clock densities exactly, so surviving particles carry
no extra ``e^{-t}`` factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, partial
from typing import NamedTuple, Sequence

import numpy as np

from .diffusion_paths import DiffusionParams, SpaceTimePoint
from .initial import InitialCondition
from .noise_field import NoiseMode, NoiseRealization, event_noise
from .stats import Estimate, summarize
from .streams import Purpose, SampleStreams, map_chunks

DEFAULT_MAX_EVENTS = 10_000
DEFAULT_MAX_LABEL_ORDER = 8


@dataclass(frozen=True)
class BranchTypeRule:
    """One entry of a branching menu.

    A rule that samples noise either terminates the particle (``offspring=0``,
    a noise leaf) or lets it continue (``offspring=1``, the Cole-Hopf process
    where the noise factor sits on the continuing path).
    """

    name: str
    probability: float
    offspring: int
    weight: float
    samples_noise: bool = False
    label_increment: int = 0

    def __post_init__(self):
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"rule {self.name!r}: probability {self.probability} not in [0, 1]")
        if self.offspring < 0 or self.label_increment < 0:
            raise ValueError(f"rule {self.name!r}: negative offspring or label increment")
        if self.offspring == 0 and not self.samples_noise:
            raise ValueError(f"rule {self.name!r}: a rule with no offspring must sample noise")
        if self.samples_noise and self.offspring > 1:
            raise ValueError(f"rule {self.name!r}: noise-sampling rules have at most one offspring")

    @property
    def terminal(self) -> bool:
        return self.offspring == 0


@dataclass(frozen=True)
class BranchingSpec:
    clock_rate: float
    rules: tuple[BranchTypeRule, ...]
    diffusion: DiffusionParams
    max_events: int = DEFAULT_MAX_EVENTS
    max_label_order: int = DEFAULT_MAX_LABEL_ORDER

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        if self.rules:
            if not self.clock_rate > 0:
                raise ValueError(f"clock rate must be positive, got {self.clock_rate}")
            total = math.fsum(r.probability for r in self.rules)
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"rule probabilities sum to {total!r}, not 1")
        if self.max_events < 1 or self.max_label_order < 1:
            raise ValueError("truncation caps must be positive")

    @cached_property
    def cumulative(self) -> tuple[float, ...]:
        acc, out = 0.0, []
        for rule in self.rules:
            acc += rule.probability
            out.append(acc)
        return tuple(out)

    @property
    def samples_noise(self) -> bool:
        return any(r.samples_noise for r in self.rules)

    def pick(self, u: float) -> BranchTypeRule:
        for rule, edge in zip(self.rules, self.cumulative):
            if u < edge:
                return rule
        return self.rules[-1]


def pure_diffusion_spec(diffusion: DiffusionParams) -> BranchingSpec:
    """A spec whose clock never rings: the heat-equation baseline."""
    return BranchingSpec(0.0, (), diffusion)


class LeafKind(Enum):
    IC = "ic"
    NOISE = "noise"


class Event(NamedTuple):
    s: float
    x: float
    rule: str
    weight: float


class Leaf(NamedTuple):
    kind: LeafKind
    s: float
    x: float
    order: int
    value: float | None  # sampled noise; None for IC leaves


@dataclass
class SampleTree:
    root: SpaceTimePoint
    events: list[Event] = field(default_factory=list)
    leaves: list[Leaf] = field(default_factory=list)
    truncated: bool = False

    @property
    def noise_leaves(self) -> list[Leaf]:
        return [leaf for leaf in self.leaves if leaf.kind is LeafKind.NOISE]

    @property
    def ic_leaves(self) -> list[Leaf]:
        return [leaf for leaf in self.leaves if leaf.kind is LeafKind.IC]

    def trace_lines(self) -> list[str]:
        return [f"{e.s!r},{e.x!r},{e.rule},{e.weight!r}" for e in self.events]


class FunctionalValue(NamedTuple):
    value: float
    n_events: int
    n_noise: int


def grow_tree(
    spec: BranchingSpec,
    root: SpaceTimePoint,
    noise: NoiseRealization | None,
    mode: NoiseMode,
    rng,
) -> SampleTree:
    """Depth-first expansion of one tree.

    Random draws per particle, in order: clock, Gaussian step, rule uniform,
    then a noise draw when the rule samples noise in resampled mode.
    """
    if spec.samples_noise and root.t > 0:
        if noise is None:
            raise ValueError("spec samples noise but no noise realization was given")
        if root.t > noise.spec.t_max:
            raise ValueError(f"root time {root.t} beyond noise horizon {noise.spec.t_max}")
    t = root.t
    rate = spec.clock_rate
    scale = 1.0 / rate if spec.rules else 0.0
    var_rate = spec.diffusion.sigma_bar
    drift = spec.diffusion.b_bar
    max_events = spec.max_events
    max_order = spec.max_label_order

    tree = SampleTree(root)
    events, leaves = tree.events, tree.leaves
    stack = [(0.0, root.x, 0)]
    while stack:
        s0, x, order = stack.pop()
        remaining = t - s0
        e = rng.exponential(scale) if scale else math.inf
        if e >= remaining:
            if remaining > 0.0:
                x = x + drift * remaining + math.sqrt(var_rate * remaining) * rng.standard_normal()
            leaves.append(Leaf(LeafKind.IC, t, x, order, None))
            continue
        x = x + drift * e + math.sqrt(var_rate * e) * rng.standard_normal()
        s = s0 + e
        if len(events) >= max_events:
            tree.truncated = True
            break
        rule = spec.pick(rng.random())
        events.append(Event(s, x, rule.name, rule.weight))
        if rule.samples_noise:
            leaves.append(Leaf(LeafKind.NOISE, s, x, order, event_noise(noise, mode, t - s, x, rng)))
        if rule.offspring:
            child = order + rule.label_increment
            if child > max_order:
                tree.truncated = True
                break
            for _ in range(rule.offspring):
                stack.append((s, x, child))
    return tree


def evaluate(tree: SampleTree, ic: InitialCondition) -> FunctionalValue:
    """Product of event weights, labelled initial-condition values and noise samples.

    Noise values were fixed when the tree was grown. A truncated tree keeps the
    product of what it recorded; unresolved particles are dropped.
    """
    value = 1.0
    for event in tree.events:
        value *= event.weight
    n_noise = 0
    for leaf in tree.leaves:
        if leaf.kind is LeafKind.IC:
            value *= ic.derivative(leaf.x, leaf.order)
        else:
            value *= leaf.value
            n_noise += 1
    return FunctionalValue(float(value), len(tree.events), n_noise)


class SampleBatch(NamedTuple):
    values: np.ndarray
    n_events: np.ndarray
    n_noise: np.ndarray
    truncated: np.ndarray


def _tree_chunk(spec, root, ic, noise, mode, seed, start, stop):
    streams = SampleStreams(seed, Purpose.TREE)
    n = stop - start
    values = np.empty(n)
    n_events = np.empty(n, dtype=np.int64)
    n_noise = np.empty(n, dtype=np.int64)
    truncated = np.empty(n, dtype=bool)
    for j in range(n):
        tree = grow_tree(spec, root, noise, mode, streams[start + j])
        fv = evaluate(tree, ic)
        values[j], n_events[j], n_noise[j] = fv
        truncated[j] = tree.truncated
    return values, n_events, n_noise, truncated


def tree_rng(master_seed: int, sample_index: int):
    """The stream that drives sample ``sample_index`` (for replaying one tree)."""
    return SampleStreams(master_seed, Purpose.TREE)[sample_index]


def run_samples(
    spec: BranchingSpec,
    point: SpaceTimePoint,
    ic: InitialCondition,
    noise: NoiseRealization | None,
    mode: NoiseMode,
    n_samples: int,
    master_seed: int,
    workers: int | None = None,
) -> SampleBatch:
    """Per-sample functionals; sample ``i`` is driven by stream ``(master_seed, i)``."""
    fn = partial(_tree_chunk, spec, point, ic, noise, mode, master_seed)
    return SampleBatch(*map_chunks(fn, n_samples, workers))


def estimate(
    spec: BranchingSpec,
    point: SpaceTimePoint,
    ic: InitialCondition,
    noise: NoiseRealization | None,
    mode: NoiseMode,
    n_samples: int,
    master_seed: int,
    workers: int | None = None,
) -> Estimate:
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    batch = run_samples(spec, point, ic, noise, mode, n_samples, master_seed, workers)
    return summarize(batch.values, batch.truncated)


def iter_trees(
    spec: BranchingSpec,
    point: SpaceTimePoint,
    noise: NoiseRealization | None,
    mode: NoiseMode,
    n_trees: int,
    master_seed: int,
):
    """Yield the trees behind :func:`run_samples`, in sample order."""
    streams = SampleStreams(master_seed, Purpose.TREE)
    for i in range(n_trees):
        yield grow_tree(spec, point, noise, mode, streams[i])


def tree_from_records(root: SpaceTimePoint, events: Sequence[Event], leaves: Sequence[Leaf]) -> SampleTree:
    """Assemble a tree by hand, e.g. to check a documented sample-path contribution."""
    return SampleTree(root, list(events), list(leaves))
