"""Built-in problems and the plug-in registry.

Two families ship with the package: the simply-supported stepped beam
(bi-objective volume vs deflection, stress/deflection/aspect-ratio
constraints, solved with one Euler-Bernoulli element per segment) and a
ZDT-style planted-rule benchmark whose Pareto set carries known
equality and power-law relationships for verifying the learning agents.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .rules import LearningConfig, VariableGroup, VariableSpec

__all__ = [
    "ProblemSpec",
    "SteppedBeam",
    "PlantedEquality",
    "register",
    "get_problem",
    "problem_names",
]


@dataclass
class ProblemSpec:
    """Static description of a problem exposed to configs and the service."""

    name: str
    n_var: int
    n_obj: int
    n_constraints: int
    specs: tuple[VariableSpec, ...]
    groups: tuple[VariableGroup, ...]


class SteppedBeam:
    """Simply-supported stepped beam with a midspan point load.

    Decision vector: (b_1..b_n, h_1..h_n) section dimensions in
    ``section_unit`` metres (centimetres by default).  Objectives:
    total volume and maximum nodal deflection, both minimized.
    Constraints: bending stress and deflection limits (scaled by their
    limits so violations are commensurate) plus an aspect-ratio band
    per segment, giving n_seg + 2 constraint entries.
    """

    def __init__(self, n_seg: int = 39, load: float = 2000.0,
                 sigma_max: float = 20e6, delta_max: float = 0.04,
                 section_range: tuple[float, float] = (0.1, 40.0),
                 aspect_range: tuple[float, float] = (0.5, 2.0),
                 elastic_modulus: float = 200e9, segment_length: float = 0.1,
                 section_unit: float = 0.01):
        self.n_seg = n_seg
        self.load = load
        self.sigma_max = sigma_max
        self.delta_max = delta_max
        self.aspect_range = aspect_range
        self.elastic_modulus = elastic_modulus
        self.segment_length = segment_length
        self.section_unit = section_unit
        self.n_var = 2 * n_seg
        self.n_obj = 2
        self.n_constraints = n_seg + 2
        lo, hi = section_range
        self.specs = tuple(
            [VariableSpec(i, lo, hi, f"b{i + 1}") for i in range(n_seg)]
            + [VariableSpec(n_seg + i, lo, hi, f"h{i + 1}") for i in range(n_seg)])
        self.groups = (VariableGroup("all", tuple(range(self.n_var))),)
        self.name = f"stepped_beam_{n_seg}"

        n = n_seg
        self.n_dof = 2 * (n + 1)
        L = segment_length
        self._template = np.array(
            [[12.0, 6.0 * L, -12.0, 6.0 * L],
             [6.0 * L, 4.0 * L * L, -6.0 * L, 2.0 * L * L],
             [-12.0, -6.0 * L, 12.0, -6.0 * L],
             [6.0 * L, 2.0 * L * L, -6.0 * L, 4.0 * L * L]])
        self._edofs = 2 * np.arange(n)[:, np.newaxis] + np.arange(4)[np.newaxis, :]
        free = np.ones(self.n_dof, dtype=bool)
        free[0] = False            # w at the left support
        free[2 * n] = False        # w at the right support
        self._free = free

        # consistent nodal loads for the midspan force (Hermite shapes);
        # for even n_seg this degenerates to a pure nodal load
        span = n * L
        a = span / 2.0
        e = min(int(a / L), n - 1)
        xi = (a - e * L) / L
        n1 = 1.0 - 3.0 * xi**2 + 2.0 * xi**3
        n2 = L * (xi - 2.0 * xi**2 + xi**3)
        n3 = 3.0 * xi**2 - 2.0 * xi**3
        n4 = L * (xi**3 - xi**2)
        self._load_element = e
        self._load_local = self.load * np.array([n1, n2, n3, n4])

    def default_learning_config(self) -> LearningConfig:
        return LearningConfig(rho=0.1, eps_eq=0.1, e_min=0.01, s_min=0.7)

    def hv_anchors(self) -> tuple[tuple[float, float], tuple[float, float]]:
        lo, hi = self.specs[0].lower, self.specs[0].upper
        v_max = self.n_seg * (hi * self.section_unit) ** 2 * self.segment_length
        return (0.0, 0.0), (v_max, self.delta_max)

    def sample_initial(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Initial sections drawn inside the aspect-ratio bands.

        A fully uniform start violates at least one of the n_seg aspect
        constraints almost surely, leaving nothing feasible to learn
        from for most of a desk-scale budget; stress and deflection
        feasibility is still left to the optimizer.
        """
        lo, hi = self.specs[0].lower, self.specs[0].upper
        a_lo, a_hi = self.aspect_range
        b = lo + rng.random((n, self.n_seg)) * (hi - lo)
        h_lo = np.clip(a_lo * b, lo, hi)
        h_hi = np.clip(a_hi * b, lo, hi)
        h = h_lo + rng.random((n, self.n_seg)) * (h_hi - h_lo)
        return np.concatenate([b, h], axis=1)

    def evaluate(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        F, G = self.evaluate_batch(np.asarray(x, dtype=float)[np.newaxis, :])
        return F[0], G[0]

    def nodal_deflections(self, x: np.ndarray) -> np.ndarray:
        """Transverse displacement at every node, for one design."""
        _, _, w = self._solve(np.asarray(x, dtype=float)[np.newaxis, :])
        return w[0]

    def _solve(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Direct-stiffness solve for a batch: (displacements, stresses, nodal w)."""
        B = X.shape[0]
        n = self.n_seg
        b = X[:, :n] * self.section_unit
        h = X[:, n:] * self.section_unit
        L = self.segment_length
        inertia = b * h**3 / 12.0
        coef = self.elastic_modulus * inertia / L**3          # (B, n)

        N = self.n_dof
        K = np.zeros((B, N, N))
        e_idx = np.arange(n)
        for r in range(4):
            for c in range(4):
                K[:, 2 * e_idx + r, 2 * e_idx + c] += coef * self._template[r, c]

        Fv = np.zeros(N)
        Fv[self._edofs[self._load_element]] = self._load_local
        free = self._free
        Kff = K[:, free][:, :, free]
        rhs = np.broadcast_to(Fv[free], (B, int(free.sum())))[..., np.newaxis]
        u = np.zeros((B, N))
        u[:, free] = np.linalg.solve(Kff, rhs)[..., 0]

        u_e = u[:, self._edofs]                                # (B, n, 4)
        k_e = coef[:, :, np.newaxis, np.newaxis] * self._template
        f_int = np.einsum("bnij,bnj->bni", k_e, u_e)
        f_int[:, self._load_element, :] -= self._load_local
        moments = np.max(np.abs(f_int[:, :, [1, 3]]), axis=2)  # (B, n)
        stress = moments * (h / 2.0) / inertia
        return u, stress, u[:, 0::2]

    def evaluate_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        X = np.asarray(X, dtype=float)
        n = self.n_seg
        b = X[:, :n] * self.section_unit
        h = X[:, n:] * self.section_unit
        _, stress, w = self._solve(X)
        deflection = np.max(np.abs(w), axis=1)
        max_stress = np.max(stress, axis=1)
        volume = np.sum(b * h, axis=1) * self.segment_length
        F_out = np.stack([volume, deflection], axis=1)

        a_lo, a_hi = self.aspect_range
        aspect = h / b
        aspect_viol = np.maximum(np.maximum(a_lo - aspect, aspect - a_hi), 0.0)
        G_out = np.concatenate(
            [(max_stress / self.sigma_max - 1.0)[:, np.newaxis],
             (deflection / self.delta_max - 1.0)[:, np.newaxis],
             aspect_viol], axis=1)
        return F_out, G_out


class PlantedEquality:
    """ZDT-style benchmark whose Pareto set satisfies x_k = x_1 for all k.

    f1 = x_1, f2 = g * (1 - sqrt(f1 / g)) with
    g = 1 + 9/(n-1) * sum_k (x_k - x_1)^2, so the front is
    {(t, 1 - sqrt(t)) : t in [0, 1]} and the optimal decision vectors
    plant exact equality rules (power laws with b = -1, c = 1 in
    [1,2]-normalized space).
    """

    def __init__(self, n_var: int = 10):
        if n_var < 3:
            raise ValueError("planted problem needs n_var >= 3")
        self.n_var = n_var
        self.n_obj = 2
        self.n_constraints = 0
        self.specs = tuple(VariableSpec(i, 0.0, 1.0, f"x{i + 1}") for i in range(n_var))
        self.groups = (VariableGroup("all", tuple(range(n_var))),)
        self.name = f"planted_eq_{n_var}"

    def default_learning_config(self) -> LearningConfig:
        # rho matches the beam's relative tolerance (0.1 on a ~40 unit range)
        return LearningConfig(rho=0.0025, eps_eq=0.1, e_min=0.01, s_min=0.7)

    def hv_anchors(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return (0.0, 0.0), (1.0, 1.0)

    def evaluate(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        F, G = self.evaluate_batch(np.asarray(x, dtype=float)[np.newaxis, :])
        return F[0], G[0]

    def evaluate_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        X = np.asarray(X, dtype=float)
        f1 = X[:, 0]
        devsq = (X[:, 1:] - X[:, 0][:, np.newaxis]) ** 2
        g = 1.0 + 9.0 / (self.n_var - 1) * np.sum(devsq, axis=1)
        f2 = g * (1.0 - np.sqrt(f1 / g))
        return np.stack([f1, f2], axis=1), np.empty((X.shape[0], 0))


_REGISTRY: dict[str, Callable[..., object]] = {}


def register(name: str, factory: Callable[..., object]) -> None:
    """Register a problem factory so configs can reference it by name."""
    _REGISTRY[name] = factory


def get_problem(name: str, **params):
    """Resolve a problem by registry name; planted_eq_<n> is parsed dynamically."""
    if name in _REGISTRY:
        return _REGISTRY[name](**params)
    m = re.fullmatch(r"planted_eq_(\d+)", name)
    if m:
        return PlantedEquality(n_var=int(m.group(1)), **params)
    raise KeyError(f"unknown problem {name!r}; known: {problem_names()}")


def problem_names() -> list[str]:
    return sorted(_REGISTRY) + ["planted_eq_<n>"]


register("stepped_beam_39", lambda **p: SteppedBeam(n_seg=39, **p))
register("stepped_beam_59", lambda **p: SteppedBeam(
    n_seg=59, delta_max=p.pop("delta_max", 0.06),
    section_range=p.pop("section_range", (0.1, 60.0)), **p))
register("planted_eq_n", PlantedEquality)
