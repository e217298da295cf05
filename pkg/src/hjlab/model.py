"""Priors, sizes, disorder and the enriched Hamiltonian.

The planted signal is a pair of random vectors X in R^m, Y in R^n with
|X| <= sqrt(m) and |Y| <= sqrt(n).  The observation channel couples them to
a Gaussian field W (m x n) at signal-to-noise 2t, and two decoupled Gaussian
side channels U, V at strengths h1, h2.  Everything downstream (free
energies, overlaps, identity checks) consumes the types defined here.

Sizes: m = m(n) with m(n)/n -> alpha.  N = sqrt(m*n) is the normalization of
the free energy, and beta_n = |m(n)/n - alpha| tracks how far a finite n sits
from the limiting aspect ratio.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Union

import numpy as np

__all__ = [
    "DiscretePrior",
    "SphericalPrior",
    "SidePrior",
    "PriorSpec",
    "ModelConfig",
    "Disorder",
    "GridSpec3",
    "default_size_map",
    "replica_seed",
    "sample_disorder",
    "hamiltonian",
    "load_model_json",
]

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class DiscretePrior:
    """Finitely supported prior with atoms in [-1, 1]; i.i.d. per coordinate."""

    values: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.weights) or not self.values:
            raise ValueError("values and weights must be equal-length and nonempty")
        if any(abs(v) > 1.0 for v in self.values):
            raise ValueError("atom values must lie in [-1, 1]")
        if any(w <= 0.0 for w in self.weights):
            raise ValueError("atom weights must be positive")
        if abs(sum(self.weights) - 1.0) > _WEIGHT_TOL:
            raise ValueError("atom weights must sum to 1 within 1e-12")

    @property
    def n_atoms(self) -> int:
        return len(self.values)

    def values_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def weights_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def mean(self) -> float:
        return float(np.dot(self.values_array(), self.weights_array()))


@dataclass(frozen=True)
class SphericalPrior:
    """Uniform measure on the centered sphere of radius sqrt(dim)."""


SidePrior = Union[DiscretePrior, SphericalPrior]


def rademacher() -> DiscretePrior:
    return DiscretePrior(values=(-1.0, 1.0), weights=(0.5, 0.5))


@dataclass(frozen=True)
class PriorSpec:
    """Per-side prior choice for the X channel and the Y channel."""

    x_side: SidePrior
    y_side: SidePrior

    @classmethod
    def iid(cls, prior: DiscretePrior, prior_y: DiscretePrior | None = None) -> "PriorSpec":
        return cls(x_side=prior, y_side=prior if prior_y is None else prior_y)

    @classmethod
    def rademacher(cls) -> "PriorSpec":
        return cls.iid(rademacher())

    @classmethod
    def spherical(cls) -> "PriorSpec":
        return cls(x_side=SphericalPrior(), y_side=SphericalPrior())

    @property
    def is_discrete(self) -> bool:
        return isinstance(self.x_side, DiscretePrior) and isinstance(self.y_side, DiscretePrior)

    @property
    def is_spherical(self) -> bool:
        return isinstance(self.x_side, SphericalPrior) and isinstance(self.y_side, SphericalPrior)


def default_size_map(alpha: float) -> Callable[[int], int]:
    """m(n) = max(1, round(alpha * n)); gives beta(n) <= (1 + alpha)/(2n)."""

    def size_map(n: int) -> int:
        return max(1, int(round(alpha * n)))

    return size_map


@dataclass(frozen=True)
class ModelConfig:
    """Problem sizes for one n; m, N and beta_n are derived, not stored."""

    n: int
    alpha: float = 1.0
    size_map: Callable[[int], int] | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.m < 1:
            raise ValueError("size map returned m < 1")

    @property
    def m(self) -> int:
        rule = self.size_map if self.size_map is not None else default_size_map(self.alpha)
        return int(rule(self.n))

    @property
    def N(self) -> float:
        return math.sqrt(self.m * self.n)

    @property
    def beta_n(self) -> float:
        return abs(self.m / self.n - self.alpha)


@dataclass(frozen=True)
class Disorder:
    """One draw of (X, Y, W, U, V); regenerable bit-exactly from the seed."""

    X: np.ndarray
    Y: np.ndarray
    W: np.ndarray
    U: np.ndarray
    V: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        m, n = self.W.shape
        if self.X.shape != (m,) or self.U.shape != (m,):
            raise ValueError("X and U must have length m = W.shape[0]")
        if self.Y.shape != (n,) or self.V.shape != (n,):
            raise ValueError("Y and V must have length n = W.shape[1]")

    @property
    def m(self) -> int:
        return self.W.shape[0]

    @property
    def n(self) -> int:
        return self.W.shape[1]


def replica_seed(seed: int, replica: int) -> int:
    """Per-replica stream key: seed XOR replica index (counter-based RNG)."""
    return (int(seed) ^ int(replica)) & 0xFFFFFFFFFFFFFFFF


def _sample_side(rng: np.random.Generator, prior: SidePrior, dim: int) -> np.ndarray:
    if dim < 1:
        raise ValueError("cannot sample a prior in dimension 0")
    if isinstance(prior, DiscretePrior):
        idx = rng.choice(prior.n_atoms, size=dim, p=prior.weights_array())
        return prior.values_array()[idx]
    g = rng.standard_normal(dim)
    norm = np.linalg.norm(g)
    while norm == 0.0:  # probability-zero guard
        g = rng.standard_normal(dim)
        norm = np.linalg.norm(g)
    return math.sqrt(dim) * g / norm


def sample_disorder(config: ModelConfig, prior: PriorSpec, seed: int) -> Disorder:
    """Draw (X, Y, W, U, V) from a counter-based stream keyed by ``seed``.

    X, Y come from the prior; W, U, V are i.i.d. standard Gaussian.  The draw
    is a pure function of (config, prior, seed).
    """
    rng = np.random.Generator(np.random.Philox(key=int(seed) & 0xFFFFFFFFFFFFFFFF))
    m, n = config.m, config.n
    X = _sample_side(rng, prior.x_side, m)
    Y = _sample_side(rng, prior.y_side, n)
    W = rng.standard_normal((m, n))
    U = rng.standard_normal(m)
    V = rng.standard_normal(n)
    return Disorder(X=X, Y=Y, W=W, U=U, V=V, seed=int(seed))


def hamiltonian(
    config: ModelConfig,
    disorder: Disorder,
    t: float,
    h: tuple[float, float],
    x: np.ndarray,
    y: np.ndarray,
) -> float:
    """Enriched Hamiltonian H_n(t, h, x, y).

    sqrt(2t/N) x.(Wy) + (2t/N)(x.X)(y.Y) - (t/N)|x|^2|y|^2
    + sqrt(2 h1) U.x + 2 h1 X.x - h1 |x|^2
    + sqrt(2 h2) V.y + 2 h2 Y.y - h2 |y|^2

    |x y^T|^2 is evaluated as |x|^2 |y|^2; the m x n outer product is never
    materialized.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    m, n = config.m, config.n
    if x.shape != (m,) or y.shape != (n,):
        raise ValueError(f"expected x of shape ({m},) and y of shape ({n},)")
    if disorder.m != m or disorder.n != n:
        raise ValueError("disorder dimensions do not match config")
    t = float(t)
    h1, h2 = float(h[0]), float(h[1])
    if t < 0 or h1 < 0 or h2 < 0:
        raise ValueError("t, h1, h2 must be nonnegative")
    N = config.N
    nx = float(x @ x)
    ny = float(y @ y)
    val = (
        math.sqrt(2.0 * t / N) * float(x @ (disorder.W @ y))
        + (2.0 * t / N) * float(x @ disorder.X) * float(y @ disorder.Y)
        - (t / N) * nx * ny
    )
    val += math.sqrt(2.0 * h1) * float(disorder.U @ x) + 2.0 * h1 * float(disorder.X @ x) - h1 * nx
    val += math.sqrt(2.0 * h2) * float(disorder.V @ y) + 2.0 * h2 * float(disorder.Y @ y) - h2 * ny
    return val


@dataclass(frozen=True)
class GridSpec3:
    """Uniform rectangular grid on [0, t_max] x [0, h_max]^2.

    Axes always include 0 and the max.  A degenerate axis (max 0) collapses
    to the single point 0.
    """

    t_max: float
    h_max: float
    n_t: int
    n_h: int

    def __post_init__(self) -> None:
        if self.t_max < 0 or self.h_max < 0:
            raise ValueError("grid maxima must be nonnegative")
        if self.n_t < 1 or self.n_h < 1:
            raise ValueError("point counts must be >= 1")
        if self.t_max > 0 and self.n_t < 2:
            raise ValueError("n_t must be >= 2 when t_max > 0")
        if self.h_max > 0 and self.n_h < 2:
            raise ValueError("n_h must be >= 2 when h_max > 0")

    @property
    def t_axis(self) -> np.ndarray:
        if self.t_max == 0:
            return np.zeros(1)
        return np.linspace(0.0, self.t_max, self.n_t)

    @property
    def h_axis(self) -> np.ndarray:
        if self.h_max == 0:
            return np.zeros(1)
        return np.linspace(0.0, self.h_max, self.n_h)

    @property
    def dt(self) -> float:
        ax = self.t_axis
        return float(ax[1] - ax[0]) if ax.size > 1 else 0.0

    @property
    def dh(self) -> float:
        ax = self.h_axis
        return float(ax[1] - ax[0]) if ax.size > 1 else 0.0

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.t_axis.size, self.h_axis.size, self.h_axis.size)

    @property
    def degenerate(self) -> bool:
        return self.t_max == 0 or self.h_max == 0


def _prior_from_json(obj: dict) -> SidePrior:
    kind = obj.get("kind")
    if kind == "spherical":
        return SphericalPrior()
    if kind == "iid_discrete":
        atoms = obj.get("atoms")
        if not atoms:
            raise ValueError("iid_discrete prior requires nonempty 'atoms'")
        values = tuple(float(a[0]) for a in atoms)
        weights = tuple(float(a[1]) for a in atoms)
        return DiscretePrior(values=values, weights=weights)
    raise ValueError(f"unknown prior kind {kind!r}")


def load_model_json(path: str | Path) -> tuple[ModelConfig, PriorSpec, int]:
    """Read model configuration from JSON.

    Schema::

        {
          "prior":   {"kind": "iid_discrete", "atoms": [[value, weight], ...]}
                   | {"kind": "spherical"},
          "prior_y": (optional, same schema; defaults to "prior"),
          "alpha":   positive float (default 1.0),
          "n":       positive int,
          "seed":    int (default 0)
        }
    """
    with open(path) as fh:
        obj = json.load(fh)
    if "prior" not in obj or "n" not in obj:
        raise ValueError("model config requires 'prior' and 'n'")
    x_side = _prior_from_json(obj["prior"])
    y_side = _prior_from_json(obj["prior_y"]) if "prior_y" in obj else x_side
    config = ModelConfig(n=int(obj["n"]), alpha=float(obj.get("alpha", 1.0)))
    return config, PriorSpec(x_side=x_side, y_side=y_side), int(obj.get("seed", 0))
