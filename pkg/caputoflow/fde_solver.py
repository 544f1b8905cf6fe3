###############################################################################
#                                                                             #
#    This program is free software: you can redistribute it and/or modify     #
#    it under the terms of the GNU General Public License as published by     #
#    the Free Software Foundation, either version 3 of the License, or        #
#    (at your option) any later version.                                      #
#                                                                             #
#    This program is distributed in the hope that it will be useful,          #
#    but WITHOUT ANY WARRANTY; without even the implied warranty of           #
#    MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the            #
#    GNU General Public License for more details.                             #
#                                                                             #
#    You should have received a copy of the GNU General Public License        #
#    along with this program. If not, see <http://www.gnu.org/licenses/>.     #
#                                                                             #
###############################################################################

import json
import logging
import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from caputoflow.common import DefectReport, write_table
from caputoflow.exceptions import (ConvergenceError,
                                   DomainError,
                                   GridMismatchError,
                                   HorizonError)
from caputoflow.history_space import GridFunction, eval_at, sup_dist_on
from caputoflow.kernel_quadrature import Kernel, conv_weights, convolve
from caputoflow.special_functions import (mittag_leffler,
                                          mittag_leffler_log_weights,
                                          order_value)

# smallest successive-iterate distance whose ratio is still meaningful
_RATIO_FLOOR = 1e3 * np.finfo(float).eps


class VectorField(object):
    """Globally Lipschitz vector field g(x) or g(t, x) on R^d.

    The evaluation function works on batches: an autonomous field is called
    as fn(x) and a nonautonomous one as fn(t, x), with x of shape (n, d) and
    t of shape (n, 1). Both return an array of shape (n, d).
    """

    def __init__(self, fn, lipschitz, autonomous=True, name=None):
        """Initialization.

        Parameters
        ----------
        fn : callable
            Batched evaluation map.
        lipschitz : float
            Declared Lipschitz constant L > 0, uniform in t.
        autonomous : bool
            False if fn takes the time as first argument.
        name : str
            Label used in logs and reports.
        """

        self.logger = logging.getLogger()

        if not lipschitz > 0:
            raise DomainError('Lipschitz constant must be positive, got %r.' % lipschitz)

        self.fn = fn
        self.lipschitz = float(lipschitz)
        self.autonomous = autonomous
        self.name = name or getattr(fn, '__name__', 'field')

    def evaluate(self, t, x):
        """Field values at times t (shape (n,)) and states x (shape (n, d))."""

        x = np.asarray(x, dtype=float)
        if self.autonomous:
            out = self.fn(x)
        else:
            t = np.asarray(t, dtype=float).reshape(-1, 1)
            out = self.fn(t, x)

        return np.broadcast_to(np.asarray(out, dtype=float), x.shape)

    def __call__(self, t, x):
        """Single-point evaluation g(t, x)."""

        x = np.atleast_1d(np.asarray(x, dtype=float))
        return self.evaluate(np.array([t]), x[None, :])[0]

    def spot_check(self, points, times=None, pairs=64, seed=0):
        """Sample pairs of points and report violations of the declared L.

        Parameters
        ----------
        points : array_like
            Probe states, shape (m, d).
        times : array_like
            Probe times for nonautonomous fields.
        pairs : int
            Number of random pairs.
        seed : int
            Seed of the pair sampler.

        Returns
        -------
        list
            (x, y, observed ratio) for each violating pair.
        """

        points = np.atleast_2d(np.asarray(points, dtype=float))
        rng = np.random.default_rng(seed)
        scale = max(1.0, float(np.max(np.abs(points))))
        x = points[rng.integers(0, len(points), pairs)]
        y = x + rng.normal(scale=0.1 * scale, size=x.shape)

        if times is None:
            t = np.zeros(pairs)
        else:
            times = np.asarray(times, dtype=float)
            t = times[rng.integers(0, len(times), pairs)]

        dg = np.linalg.norm(self.evaluate(t, x) - self.evaluate(t, y), axis=1)
        dx = np.linalg.norm(x - y, axis=1)
        ratio = dg / np.where(dx > 0, dx, 1.0)

        violations = [(x[i], y[i], float(ratio[i]))
                      for i in np.flatnonzero(ratio > self.lipschitz * (1 + 1e-9))]
        if violations:
            worst = max(v[2] for v in violations)
            self.logger.warning('Field %s violates its declared Lipschitz constant %g (observed %g on %d of %d pairs).'
                                % (self.name, self.lipschitz, worst, len(violations), pairs))

        return violations


@dataclass
class PicardConfig:
    """Weight rate, stopping tolerance and iteration cap of the Picard solver.

    max_weight caps the weight E_alpha(gamma t^alpha) inside one solve window.
    """

    gamma: Optional[float] = None
    tolerance: float = 1e-10
    max_iter: int = 200
    slack: float = 0.05
    max_weight: float = 1e12

    def resolve_gamma(self, lipschitz):
        """Weight rate for a field; defaults to 2L."""

        gamma = 2.0 * lipschitz if self.gamma is None else float(self.gamma)
        if not gamma > lipschitz:
            raise DomainError('Picard weight rate gamma=%g must exceed the Lipschitz constant L=%g.'
                              % (gamma, lipschitz))

        return gamma


@dataclass
class Trajectory:
    """Solution x_f of the integral equation on a grid."""

    grid: object
    values: np.ndarray
    input: GridFunction
    solver: str
    alpha: float
    beta: float = 0.0
    iterations: int = 0
    residual: float = 0.0
    gamma: Optional[float] = None
    ratios: list = dc_field(default_factory=list)
    contraction_violations: int = 0

    @property
    def dimension(self):
        return self.values.shape[1]

    def as_grid_function(self):
        return GridFunction(self.grid, self.values)

    def metadata(self):
        return {'solver': self.solver,
                'alpha': self.alpha,
                'beta': self.beta,
                'h': self.grid.h,
                'n': self.grid.n,
                'dimension': int(self.dimension),
                'iterations': int(self.iterations),
                'residual': float(self.residual),
                'gamma': self.gamma,
                'max_ratio': max(self.ratios) if self.ratios else None,
                'contraction_violations': int(self.contraction_violations)}

    def write_csv(self, output_file):
        """Write columns t, x_1..x_d."""

        header = ['t'] + ['x_%d' % (i + 1) for i in range(self.dimension)]
        write_table(output_file, header, np.column_stack([self.grid.nodes, self.values]))

    def write_json(self, output_file):
        with open(output_file, 'w') as fout:
            json.dump(self.metadata(), fout, indent=2, sort_keys=True)
            fout.write('\n')


def input_on_grid(f, grid):
    """Samples of the input f at the nodes of grid."""

    if grid.horizon > f.horizon * (1 + 1e-12):
        raise HorizonError('Input horizon %g is shorter than the solve horizon %g.' % (f.horizon, grid.horizon))

    if f.grid.h == grid.h:
        return np.array(f.values[:grid.n + 1])

    return np.array([eval_at(f, t) for t in grid.nodes])


class FdeSolver(object):
    """Solvers for x(t) = f(t) + int_0^t a(t,s) g(x(s)) ds."""

    def __init__(self, alpha, beta=0.0):
        """Initialization.

        Parameters
        ----------
        alpha : FractionalOrder or float
            Order of the kernel.
        beta : float
            Tempering rate of the kernel.
        """

        self.logger = logging.getLogger()
        self.kernel = Kernel(alpha, beta)

    @property
    def alpha(self):
        return self.kernel.alpha.alpha

    @property
    def beta(self):
        return self.kernel.beta

    def solve_picard(self, field, f, grid, cfg=None, initial=None):
        """Fixed point of the discretized Picard map under the weighted norm.

        The discrete system is lower triangular, so it is solved window by
        window: nodes already settled enter the next window as fixed memory
        and each window iterates under its own weight E_alpha(gamma (t - t_b)^alpha),
        t_b being the last settled node. A window is as long as that weight
        stays below cfg.max_weight; short horizons are a single window.

        Parameters
        ----------
        field : VectorField
            Right-hand side g with declared Lipschitz constant.
        f : GridFunction
            Input function covering the grid.
        grid : UniformGrid
            Solve grid.
        cfg : PicardConfig
            Weight rate, tolerance, iteration cap and window weight cap.
        initial : array_like
            First iterate; defaults to the input samples.

        Returns
        -------
        Trajectory
            Converged iterate with the largest per-window iteration count and
            the largest final weighted residual.
        """

        cfg = cfg or PicardConfig()
        gamma = cfg.resolve_gamma(field.lipschitz)
        if not cfg.max_weight > 1:
            raise DomainError('Window weight cap must exceed 1, got %r.' % cfg.max_weight)

        fv = input_on_grid(f, grid)
        times = grid.nodes
        field.spot_check(fv, times)

        w = conv_weights(self.alpha, grid, self.beta)
        log_weights = mittag_leffler_log_weights(self.alpha, gamma, grid.h, grid.n)
        span = max(1, int(np.searchsorted(log_weights, math.log(cfg.max_weight), side='right')) - 1)
        bound = field.lipschitz / gamma + cfg.slack

        if initial is None:
            x = fv.copy()
        else:
            x = np.array(initial, dtype=float).reshape(fv.shape)

        ratios = []
        violations = 0
        iterations = 0
        residual = 0.0
        windows = 0
        base = 0
        while True:
            end = min(base + span, grid.n)
            lo = 0 if base == 0 else base + 1
            inv_weights = np.exp(-log_weights[lo - base:end - base + 1])

            prev = None
            for iteration in range(1, cfg.max_iter + 1):
                g = field.evaluate(times[:end + 1], x[:end + 1])
                x_new = fv[lo:end + 1] + convolve(w, g, end + 1)[lo:]
                step = np.linalg.norm(x_new - x[lo:end + 1], axis=1)
                dist = float(np.max(step * inv_weights))
                x[lo:end + 1] = x_new

                scale = max(1.0, float(np.max(np.abs(x_new))))
                sup_step = float(np.max(step))
                if prev is not None and prev > _RATIO_FLOOR * scale and dist > _RATIO_FLOOR * scale:
                    ratio = dist / prev
                    ratios.append(ratio)
                    if ratio > bound:
                        violations += 1
                        self.logger.warning('Picard iterates contract by %.3f > L/gamma + slack = %.3f; '
                                            'is the declared Lipschitz constant of %s correct?'
                                            % (ratio, bound, field.name))
                prev = dist

                # the weight grows like exp(gamma^(1/alpha) t), so late nodes also need the plain increment
                if dist <= cfg.tolerance and sup_step <= cfg.tolerance * scale:
                    break
            else:
                raise ConvergenceError('Picard iteration did not reach tolerance %g in %d iterations on [%g, %g] '
                                       '(last distance %g).'
                                       % (cfg.tolerance, cfg.max_iter, times[base], times[end], dist))

            iterations = max(iterations, iteration)
            residual = max(residual, dist)
            windows += 1
            if end == grid.n:
                break
            base = end

        self.logger.info('Picard solve converged in %d window(s), at most %d iterations each (weighted residual %.3e).'
                         % (windows, iterations, residual))

        return Trajectory(grid, x, f, 'picard', self.alpha, self.beta,
                          iterations=iterations,
                          residual=residual,
                          gamma=gamma,
                          ratios=ratios,
                          contraction_violations=violations)

    def solve_pece(self, field, f, grid, corrector_iterations=1, corrector_tol=None):
        """Adams-type predictor-corrector stepping node by node.

        Parameters
        ----------
        field : VectorField
            Right-hand side g.
        f : GridFunction
            Input function covering the grid.
        grid : UniformGrid
            Solve grid.
        corrector_iterations : int
            Corrector applications per node; 1 gives PECE.
        corrector_tol : float
            Stop correcting early once successive corrections differ by less.

        Returns
        -------
        Trajectory
            Solution with the total number of corrector applications.
        """

        if corrector_iterations < 1:
            raise DomainError('At least one corrector application is required.')

        fv = input_on_grid(f, grid)
        times = grid.nodes
        field.spot_check(fv, times)

        w = conv_weights(self.alpha, grid, self.beta)
        diag = w.diagonal

        x = np.zeros_like(fv)
        g = np.zeros_like(fv)
        x[0] = fv[0]
        g[0] = field(times[0], x[0])

        corrections = 0
        for j in range(1, grid.n + 1):
            y = fv[j] + w.predictor_history(j, g)
            hist = fv[j] + w.history(j, g)
            for _ in range(corrector_iterations):
                y_new = hist + diag * field(times[j], y)
                corrections += 1
                converged = (corrector_tol is not None
                             and np.linalg.norm(y_new - y) <= corrector_tol * (1.0 + np.linalg.norm(y_new)))
                y = y_new
                if converged:
                    break

            x[j] = y
            g[j] = field(times[j], y)

        solver = 'pece' if corrector_iterations == 1 else 'pec%de' % corrector_iterations
        self.logger.info('Predictor-corrector solve finished %d steps.' % grid.n)

        return Trajectory(grid, x, f, solver, self.alpha, self.beta, iterations=corrections)

    def solve(self, field, f, grid, method='picard', cfg=None, corrector_iterations=1, corrector_tol=None):
        """Dispatch to solve_picard or solve_pece."""

        if method == 'picard':
            return self.solve_picard(field, f, grid, cfg)
        elif method == 'pece':
            return self.solve_pece(field, f, grid, corrector_iterations, corrector_tol)

        raise DomainError('Unknown solver: %s' % method)

    def verify_continuity(self, field, f, h, grid, slack=1e-6, method='picard', cfg=None):
        """Gronwall certificate for the solutions of two inputs.

        Parameters
        ----------
        field : VectorField
            Right-hand side g with Lipschitz constant L.
        f, h : GridFunction
            Inputs on a common grid.
        grid : UniformGrid
            Solve grid spanning [0, T].
        slack : float
            Discretization slack added to the bound.

        Returns
        -------
        DefectReport
            Measured sup distance of the solutions against the bound.
        """

        if f.grid != h.grid:
            raise GridMismatchError('Inputs live on different grids: %s vs %s.' % (f.grid, h.grid))

        x_f = self.solve(field, f, grid, method, cfg)
        x_h = self.solve(field, h, grid, method, cfg)
        measured = float(np.max(np.linalg.norm(x_f.values - x_h.values, axis=1)))

        T = grid.horizon
        bound = continuity_bound(f, h, field.lipschitz, self.alpha, T)
        report = DefectReport('continuity', measured, bound + slack, grid.h, self.alpha,
                              details={'bound': bound,
                                       'input_distance': sup_dist_on(f, h, T),
                                       'slack': slack,
                                       'T': T})

        if report.passed:
            self.logger.info('Continuity certificate holds: %.3e <= %.3e.' % (measured, bound))
        else:
            self.logger.warning('Continuity certificate violated: %.3e > %.3e.' % (measured, bound))

        return report


def continuity_bound(f, h, lipschitz, alpha, T):
    """Bound sup_[0,T] ||f - h|| E_alpha(L T^alpha) on the solution distance.

    Parameters
    ----------
    f, h : GridFunction
        Inputs on a common grid spanning [0, T].
    lipschitz : float
        Lipschitz constant L of the field.
    alpha : FractionalOrder or float
        Order in (0, 1]; alpha = 1 gives the classical Gronwall bound.
    T : float
        Time horizon.

    Returns
    -------
    float
        Upper bound on sup_[0,T] ||x_f - x_h||.
    """

    a = order_value(alpha, allow_one=True)

    return sup_dist_on(f, h, T) * mittag_leffler(a, lipschitz * T ** a)
