"""Numerical saddle passages between the entry and exit sections.

Near the saddle the flow is integrated against ``sigma = log x`` instead of
time, so ``dy/dsigma = x Q / P``.  Passage length then grows like
``|log t|`` without any stiffness, and the exit section ``{x = x0}`` is the
end point of the integration interval.  When ``P / x`` stops being
positive along the way we fall back to time integration with event
detection.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp

from ..monoid import DomainError
from . import poly2
from .field import SaddleSpec, SectionPair


class ChartEscape(DomainError):
    pass


class IntegrationFailure(ArithmeticError):
    def __init__(self, message: str, t=None):
        super().__init__(message if t is None else f"{message} (entry value {t!r})")
        self.t = t


_SOLVER = "DOP853"


def _newton_root(coeffs: dict, x0: float = 0.0, iters: int = 60) -> float:
    """Root of a univariate ``{power: coeff}`` polynomial near ``x0``."""
    c = {k: float(v) for k, v in coeffs.items()}
    x = x0
    for _ in range(iters):
        val = sum(v * x ** k for k, v in c.items())
        der = sum(k * v * x ** (k - 1) for k, v in c.items() if k)
        if der == 0:
            raise IntegrationFailure("flat anchor equation")
        step = val / der
        x -= step
        if abs(step) <= 1e-17 * max(1.0, abs(x)):
            break
    return x


class TransitionMap:
    """Entry value ``t`` (measured from the stable separatrix) to exit value
    (measured from the unstable separatrix)."""

    def __init__(self, saddle: SaddleSpec, sections: SectionPair, mu=(), tol: float = 1e-12,
                 escape_radius: float | None = None):
        self.saddle = saddle
        self.sections = sections
        self.mu = tuple(mu)
        self.tol = tol
        self.rhs = saddle.field.numeric(self.mu)
        self.lam1 = float(saddle.lam1)
        self.x0 = float(sections.x0)
        self.y0 = float(sections.y0)
        self.radius = escape_radius or 4.0 * max(self.x0, self.y0, 1.0)
        P, Q = saddle.field.at(self.mu)
        self._x_axis_invariant = all(j >= 1 for (_, j) in Q)
        self._y_axis_invariant = all(i >= 1 for (i, _) in P)
        self._anchor_nf = None
        self.y_star = 0.0 if self._x_axis_invariant else self._unstable_crossing()
        self.x_star = 0.0 if self._y_axis_invariant else self._stable_crossing()

    # -- separatrix crossings ------------------------------------------------
    def _anchors(self):
        if self._anchor_nf is None:
            from .normal_form import normal_form
            self._anchor_nf = normal_form(self.saddle, 3).at(self.mu)
        return self._anchor_nf

    def _unstable_crossing(self) -> float:
        delta = 1e-3 * self.x0
        _, V = self._anchors()
        y = _newton_root(poly2.univariate_in_y(V, delta))
        return self._along_x(delta, y, self.x0)

    def _stable_crossing(self) -> float:
        delta = 1e-3 * self.y0
        U, _ = self._anchors()
        x = _newton_root(poly2.univariate_in_x(U, delta))
        return self._along_time(x, delta, "y", self.y0, backward=True)[0]

    # -- integrators ---------------------------------------------------------
    def _along_x(self, x_start: float, y_start: float, x_end: float, t=None) -> float:
        """Follow the orbit through ``(x_start, y_start)`` to ``{x = x_end}``."""
        if x_start <= 0:
            return self._along_time(x_start, y_start, "x", x_end, t=t)[1]
        rhs = self.rhs
        floor = 1e-3 * abs(self.lam1)
        radius = self.radius

        def fun(sig, yv):
            x = math.exp(sig)
            p, q = rhs(x, yv[0])
            return [x * q / p]

        def guard(sig, yv):
            x = math.exp(sig)
            return rhs(x, yv[0])[0] / x - floor
        guard.terminal = True

        def escape(sig, yv):
            return radius - abs(yv[0])
        escape.terminal = True

        sol = solve_ivp(fun, (math.log(x_start), math.log(x_end)), [y_start], method=_SOLVER,
                        rtol=self.tol, atol=self.tol * 1e-6, events=(guard, escape))
        if sol.status == 1:
            if sol.t_events[1].size:
                raise ChartEscape(f"orbit from x = {x_start!r} leaves the chart")
            return self._along_time(x_start, y_start, "x", x_end, t=t)[1]
        if sol.status != 0:
            raise IntegrationFailure(sol.message, t)
        return float(sol.y[0, -1])

    def _along_time(self, x_start: float, y_start: float, axis: str, value: float,
                    backward: bool = False, t=None):
        rhs = self.rhs
        sign = -1.0 if backward else 1.0
        idx = 0 if axis == "x" else 1
        radius = self.radius

        def fun(_, z):
            p, q = rhs(z[0], z[1])
            return [sign * p, sign * q]

        def hit(_, z):
            return z[idx] - value
        hit.terminal = True

        def escape(_, z):
            return radius - max(abs(z[0]), abs(z[1]))
        escape.terminal = True

        scale = abs(self.lam1)
        span = 40.0 * (abs(math.log(max(abs(x_start), abs(y_start), 1e-300))) + 10.0) / scale
        sol = solve_ivp(fun, (0.0, span), [x_start, y_start], method=_SOLVER, rtol=self.tol,
                        atol=self.tol * 1e-6, events=(hit, escape))
        if sol.t_events[0].size:
            z = sol.y_events[0][0]
            return float(z[0]), float(z[1])
        if sol.t_events[1].size:
            raise ChartEscape(f"orbit from ({x_start!r}, {y_start!r}) leaves the chart")
        raise IntegrationFailure(f"section {axis} = {value} not reached: {sol.message}", t)

    # -- public --------------------------------------------------------------
    def __call__(self, t: float) -> float:
        if t <= 0:
            return 0.0
        if t >= self.sections.eps:
            raise DomainError(f"entry value {t!r} outside (0, {self.sections.eps})")
        y_end = self._along_x(self.x_star + t, self.y0, self.x0, t=t)
        return y_end - self.y_star

    def reverse(self, s: float) -> float:
        """Exit value back to entry value by integrating backwards in time."""
        if s <= 0:
            return 0.0
        x_end, _ = self._along_time(self.x0, self.y_star + s, "y", self.y0, backward=True, t=s)
        return x_end - self.x_star

    def between(self, x_start: float, y_start: float, x_end: float) -> float:
        """Ordinate where the orbit through a point meets ``{x = x_end}``."""
        return self._along_x(x_start, y_start, x_end)


def integrate_transition(saddle: SaddleSpec, sections: SectionPair, t: float,
                         tol: float = 1e-12, mu=()) -> float:
    if t <= 0:
        return 0.0
    return TransitionMap(saddle, sections, mu, tol)(t)


def evaluate_on_grid(tm: TransitionMap, grid) -> np.ndarray:
    return np.array([tm(float(t)) for t in grid])
