"""Return maps around a polycycle and fixed-point counting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.optimize import brentq

from .. import coeffs as C
from ..monoid import DomainError
from ..series import INF, GeneralizedSeries, unify
from ..transform import gs_compose, gs_subst_puiseux
from .dulac import DulacExpansion, dulac_series, ratio_basis
from .field import SaddleSpec, SectionPair
from .transition import TransitionMap


class ChartMismatch(DomainError):
    pass


@dataclass(frozen=True)
class CornerMap:
    """``f(y) = sum_k coeffs[k-1] y^k`` with an optional convergence radius.

    ``bound`` is a Cauchy majorant ``|a_k| <= bound / radius^k`` used for
    the tail estimate of a truncated series; polynomials have no tail.
    """

    coeffs: tuple
    radius: float = math.inf
    bound: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if not self.coeffs or not C.to_float(self.coeffs[0]) > 0:
            raise ChartMismatch("corner map must preserve orientation (positive linear term)")

    @classmethod
    def identity(cls) -> "CornerMap":
        return cls((1,))

    def __call__(self, y: float) -> float:
        if abs(y) >= self.radius:
            raise DomainError(f"corner map evaluated outside its radius at {y!r}")
        acc = 0.0
        for a in reversed(self.coeffs):
            acc = (acc + float(a)) * y
        return acc

    def tail_bound(self, y: float) -> float:
        if self.radius == math.inf or self.bound is None:
            return 0.0
        q = abs(y) / self.radius
        return self.bound * q ** (len(self.coeffs) + 1) / (1 - q)

    def as_series(self, basis, degree: int) -> GeneralizedSeries:
        """Polynomial in ``Y1`` (one unused ``X`` slot) up to ``degree``."""
        terms = {((basis.zero(),), (k,)): c
                 for k, c in enumerate(self.coeffs[:degree], start=1) if not C.is_zero(c)}
        return GeneralizedSeries(basis, 1, 1, terms, INF)


@dataclass(frozen=True, eq=False)
class PolycycleSpec:
    vertices: tuple
    corner_maps: tuple
    tol: float = 1e-12
    _maps: dict = dc_field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "corner_maps", tuple(self.corner_maps))
        if not self.vertices:
            raise ValueError("a polycycle needs at least one vertex")
        if len(self.corner_maps) != len(self.vertices):
            raise ChartMismatch("need one corner map per vertex")
        for i, (saddle, sections) in enumerate(self.vertices):
            if not isinstance(saddle, SaddleSpec) or not isinstance(sections, SectionPair):
                raise TypeError(f"vertex {i} must be a (SaddleSpec, SectionPair) pair")

    def transition(self, i: int, mu=()) -> TransitionMap:
        key = (i, tuple(mu))
        if key not in self._maps:
            saddle, sections = self.vertices[i]
            self._maps[key] = TransitionMap(saddle, sections, mu, self.tol)
        return self._maps[key]

    def ratio_product(self) -> float:
        return math.prod(float(s.ratio) for s, _ in self.vertices)


def poincare_map(polycycle: PolycycleSpec, t: float, tol: float | None = None, mu=()) -> float:
    """``f_k o g_k o ... o f_1 o g_1`` evaluated numerically; ``0`` for ``t <= 0``."""
    if t <= 0:
        return 0.0
    value = float(t)
    for i, f in enumerate(polycycle.corner_maps):
        tm = polycycle.transition(i, mu) if tol is None else \
            TransitionMap(*polycycle.vertices[i], mu, tol)
        try:
            value = tm(value)
        except (ArithmeticError, DomainError) as err:
            raise type(err)(f"vertex {i + 1}: {err}") from err
        if value <= 0:
            return 0.0
        value = f(value)
    return value


def _needed_order(saddle: SaddleSpec, nu) -> int:
    per = 1 + min(float(saddle.ratio), 1.0)
    return max(1, math.ceil(float(nu) / per - 1e-12))


def poincare_series(polycycle: PolycycleSpec, nu, mu=(), expansions=None) -> GeneralizedSeries:
    """Formal return map up to exponent ``nu`` via Puiseux substitution."""
    mu = tuple(mu)
    basis = ratio_basis([s.ratio for s, _ in polycycle.vertices])
    if expansions is None:
        expansions = [dulac_series(s, _needed_order(s, nu), sec, mu, basis=basis)
                      for s, sec in polycycle.vertices]
    S = GeneralizedSeries.x_var(0, basis, 1, 0)
    for i, (g, f) in enumerate(zip(expansions, polycycle.corner_maps)):
        if not isinstance(g, DulacExpansion):
            raise TypeError(f"vertex {i + 1}: expected a DulacExpansion")
        G = g.series.truncate(nu)
        G, S = unify(G, S)
        S = gs_subst_puiseux(G, S, 0, nu).truncate(nu)
        order = float(S.order())
        degree = int(math.floor(float(nu) / order)) + 1
        F = f.as_series(S.basis, degree)
        S = gs_compose(F, [S], nu).truncate(nu)
    return S


@dataclass(frozen=True)
class FixedPointReport:
    count: int
    roots: list
    brackets: list
    indeterminate: list
    grid: np.ndarray
    delta: np.ndarray
    noise_floor: float

    @property
    def all_indeterminate(self) -> bool:
        return len(self.indeterminate) == len(self.grid) - 1

    def summary(self) -> dict:
        return {"count": self.count, "roots": [float(r) for r in self.roots],
                "brackets": [[float(a), float(b)] for a, b in self.brackets],
                "indeterminate_cells": len(self.indeterminate),
                "cells": len(self.grid) - 1, "noise_floor": self.noise_floor}


def count_fixed_points(P, interval, resolution: int = 400, tol: float = 1e-12,
                       noise_floor: float | None = None, spacing: str = "geometric"
                       ) -> FixedPointReport:
    """Sign changes of ``P(t) - t`` on a grid, refined by bisection."""
    a, b = map(float, interval)
    if not 0 < a < b:
        raise ValueError("need 0 < a < b")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    grid = np.geomspace(a, b, resolution) if spacing == "geometric" else \
        np.linspace(a, b, resolution)
    floor = 10.0 * tol if noise_floor is None else noise_floor

    def delta_at(t):
        try:
            return float(P(float(t))) - float(t)
        except (ArithmeticError, DomainError) as err:
            raise type(err)(f"{err} at t = {t!r}") from err

    delta = np.array([delta_at(t) for t in grid])
    roots, brackets, indeterminate = [], [], []
    for k in range(len(grid) - 1):
        d0, d1 = delta[k], delta[k + 1]
        if abs(d0) < floor or abs(d1) < floor:
            indeterminate.append((grid[k], grid[k + 1]))
            continue
        if d0 * d1 < 0:
            root = brentq(delta_at, grid[k], grid[k + 1], xtol=tol, rtol=4 * np.finfo(float).eps)
            roots.append(root)
            brackets.append((grid[k], grid[k + 1]))
    return FixedPointReport(len(roots), roots, brackets, indeterminate, grid, delta, floor)
