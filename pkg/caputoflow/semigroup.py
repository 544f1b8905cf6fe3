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

import logging
import math
from dataclasses import dataclass

import numpy as np

from caputoflow.common import DefectReport, aligned_steps
from caputoflow.exceptions import DomainError, GridMismatchError, HorizonError
from caputoflow.fde_solver import FdeSolver, PicardConfig
from caputoflow.history_space import (GridFunction,
                                      MetricParams,
                                      rho_on_horizon,
                                      saturate,
                                      sup_dist_on)
from caputoflow.kernel_quadrature import (UniformGrid,
                                          conv_weights,
                                          partial_convolve,
                                          shifted_trapezoid)
from caputoflow.special_functions import gamma_fn, log_mittag_leffler


@dataclass
class OmegaReport:
    """Trailing-window statistics of the solution from a constant history."""

    x0: list
    horizon: float
    window: float
    minimum: list
    maximum: list
    mean: list
    oscillation: list
    monotone: list
    final: list
    tolerance: float

    @property
    def converged(self):
        return max(self.oscillation) <= self.tolerance

    @property
    def point(self):
        return self.mean if self.converged else None

    def to_dict(self):
        return {'x0': self.x0,
                'horizon': self.horizon,
                'window': self.window,
                'minimum': self.minimum,
                'maximum': self.maximum,
                'mean': self.mean,
                'oscillation': self.oscillation,
                'monotone': self.monotone,
                'final': self.final,
                'tolerance': self.tolerance,
                'converged': self.converged,
                'point': self.point}


class SemigroupEngine(object):
    """Operators T_tau on grid functions for a fixed field and order.

    T_tau maps a history f with horizon H to
        (T_tau f)(theta) = f(tau + theta) + int_0^tau a(tau + theta, s) g(x_f(s)) ds
    with horizon H - tau. Shifts must be multiples of the grid step.
    """

    def __init__(self, field, alpha, h,
                 metric=None,
                 beta=0.0,
                 method='picard',
                 picard=None,
                 corrector_iterations=1,
                 corrector_tol=None,
                 quadrature='product',
                 defect_tol=1e-4,
                 steady_tol=1e-12,
                 omega_tol=1e-6):
        """Initialization.

        Parameters
        ----------
        field : VectorField
            Field g of the integral equation.
        alpha : FractionalOrder or float
            Kernel order.
        h : float
            Grid step shared by all histories.
        metric : MetricParams
            Truncation of the compact-open metric.
        beta : float
            Tempering rate of the kernel.
        method : str
            'picard' or 'pece' for the solves on [0, tau].
        quadrature : str
            'product' uses product-integration weights for every theta;
            'trapezoid' switches to a composite trapezoid rule for theta > 0.
        """

        self.logger = logging.getLogger()

        if method not in ('picard', 'pece'):
            raise DomainError('Unknown solver: %s' % method)
        if quadrature not in ('product', 'trapezoid'):
            raise DomainError('Unknown memory quadrature: %s' % quadrature)

        self.field = field
        self.solver = FdeSolver(alpha, beta)
        self.h = float(h)
        self.metric = metric or MetricParams()
        self.method = method
        self.picard = picard or PicardConfig()
        self.corrector_iterations = corrector_iterations
        self.corrector_tol = corrector_tol
        self.quadrature = quadrature
        self.defect_tol = defect_tol
        self.steady_tol = steady_tol
        self.omega_tol = omega_tol

    @property
    def alpha(self):
        return self.solver.alpha

    @property
    def beta(self):
        return self.solver.beta

    def steps(self, tau):
        return aligned_steps(tau, self.h)

    def _check_history(self, f):
        if abs(f.grid.h - self.h) > 1e-12 * self.h:
            raise GridMismatchError('History step %g differs from engine step %g.' % (f.grid.h, self.h))

    def solve(self, f, n, field=None):
        """Solution x_f on [0, n h]."""

        return self.solver.solve(field or self.field, f, UniformGrid(self.h, n),
                                 method=self.method,
                                 cfg=self.picard,
                                 corrector_iterations=self.corrector_iterations,
                                 corrector_tol=self.corrector_tol)

    def _apply(self, field, m, f):
        """T for a shift of m steps; also returns the solve on [0, m h]."""

        self._check_history(f)
        if m == 0:
            return f, None
        if m >= f.grid.n:
            raise HorizonError('Shift of %d steps exhausts the horizon of %d steps.' % (m, f.grid.n))

        traj = self.solve(f, m, field)
        g = field.evaluate(traj.grid.nodes, traj.values)

        w = conv_weights(self.alpha, f.grid, self.beta)
        if self.quadrature == 'product':
            memory = partial_convolve(w, g, m)
        else:
            memory = shifted_trapezoid(w, g, m)

        shifted = GridFunction(f.grid.truncate(f.grid.n - m), f.values[m:] + memory)

        return shifted, traj

    def apply_T(self, tau, f):
        """History T_tau f on the horizon H - tau.

        With the default quadrature='product' the memory at theta > 0 uses the
        product-integration weights, so it differs from the composite
        trapezoid rule of quadrature='trapezoid' by a discretization error;
        both agree at theta = 0.
        """
        return self._apply(self.field, self.steps(tau), f)[0]

    def _tolerance(self, tolerance):
        return self.defect_tol if tolerance is None else tolerance

    def semigroup_defect(self, sigma, tau, f, tolerance=None):
        """Metric distance between T_{sigma+tau} f and T_sigma(T_tau f).

        Parameters
        ----------
        sigma, tau : float
            Grid-aligned shifts with sigma + tau below the horizon.
        f : GridFunction
            History.
        tolerance : float
            Pass threshold; defaults to the engine defect tolerance.

        Returns
        -------
        DefectReport
            rho on the remaining horizon H - sigma - tau.
        """

        ms = self.steps(sigma)
        mt = self.steps(tau)
        if ms + mt >= f.grid.n:
            raise HorizonError('sigma + tau = %g exhausts the horizon %g.' % (sigma + tau, f.horizon))

        one_step = self._apply(self.field, ms + mt, f)[0]
        two_step = self._apply(self.field, ms, self._apply(self.field, mt, f)[0])[0]

        return self._defect_report('semigroup', one_step, two_step, tolerance, (ms + mt) * self.h,
                                   {'sigma': ms * self.h, 'tau': mt * self.h})

    def _defect_report(self, identity, lhs, rhs, tolerance, consumed, details):
        metric = rho_on_horizon(lhs, rhs, self.metric)
        details = dict(details)
        details.update({'tail_bound': metric.tail_bound,
                        'terms': metric.terms,
                        'sup_distance': sup_dist_on(lhs, rhs, lhs.horizon)})

        report = DefectReport(identity, float(metric.value), self._tolerance(tolerance), self.h, self.alpha,
                              horizon_consumed=consumed, details=details)
        self._log_report(report)

        return report

    def _log_report(self, report):
        if report.passed:
            self.logger.info('Identity %s holds: defect %.3e <= %.3e.' % (report.identity, report.defect, report.tolerance))
        else:
            self.logger.warning('Identity %s violated: defect %.3e > %.3e.' % (report.identity, report.defect, report.tolerance))

    def shift_identity_residual(self, tau, f, tolerance=None):
        """Sup distance between x_f(tau + .) and the solution psi with input T_tau f."""

        m = self.steps(tau)
        n = f.grid.n
        if m >= n:
            raise HorizonError('Shift of %g exhausts the horizon %g.' % (tau, f.horizon))

        x_f = self.solve(f, n)
        psi = self.solve(self.apply_T(tau, f), n - m)
        residual = float(np.max(np.linalg.norm(x_f.values[m:] - psi.values, axis=1)))

        if tolerance is None:
            if self.method == 'picard':
                # weighted stopping tolerance in the sup norm, once per solve; windows cap the weight
                log_weight = min(log_mittag_leffler(self.alpha, x_f.gamma * f.horizon ** self.alpha),
                                 math.log(self.picard.max_weight))
                tolerance = 2.0 * self.picard.tolerance * math.exp(log_weight)
            else:
                tolerance = self.defect_tol

        report = DefectReport('shift', residual, tolerance, self.h, self.alpha,
                              horizon_consumed=m * self.h,
                              details={'tau': m * self.h})
        self._log_report(report)

        return report

    def steady_state_residual(self, x_star, tau, horizon=None, tolerance=None):
        """rho(T_tau f*, f*) for the constant history f* = x*.

        The report also carries ||g(x*)||, which is zero for a steady state.
        """

        x_star = np.atleast_1d(np.asarray(x_star, dtype=float))
        m = self.steps(tau)
        if horizon is None:
            horizon = m * self.h + self.metric.n_max

        f_star = GridFunction.constant(UniformGrid.from_horizon(self.h, horizon), x_star)
        shifted = self.apply_T(tau, f_star)
        reference = f_star.truncate(shifted.grid.n) if m > 0 else f_star

        g_norm = float(np.linalg.norm(self.field(0.0, x_star)))
        metric = rho_on_horizon(shifted, reference, self.metric)
        report = DefectReport('steady', float(metric.value),
                              self.steady_tol if tolerance is None else tolerance,
                              self.h, self.alpha,
                              horizon_consumed=m * self.h,
                              details={'x_star': x_star.tolist(),
                                       'g_norm': g_norm,
                                       'tau': m * self.h,
                                       'tail_bound': metric.tail_bound})
        self._log_report(report)

        return report

    def orbit(self, x0, t):
        """(T_t f0)(0) for the constant history f0 = x0, i.e. the solution x(t, x0)."""

        m = self.steps(t)
        f0 = GridFunction.constant(UniformGrid(self.h, m + 1), x0)

        return self.apply_T(t, f0).values[0].copy()

    def omega_probe(self, x0, horizon, window, tolerance=None):
        """Trailing-window summary of the solution from f0 = x0.

        Parameters
        ----------
        x0 : array_like
            Initial state.
        horizon : float
            Length of the solve.
        window : float
            Trailing window, shorter than the horizon.
        tolerance : float
            Oscillation below which the orbit counts as converged to a point.

        Returns
        -------
        OmegaReport
            Per-coordinate statistics on [horizon - window, horizon].
        """

        if not 0 < window < horizon:
            raise DomainError('Window %g must lie in (0, horizon=%g).' % (window, horizon))

        x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        grid = UniformGrid.from_horizon(self.h, horizon)
        traj = self.solve(GridFunction.constant(grid, x0), grid.n)

        tail = traj.values[grid.nodes >= horizon - window - 1e-12 * horizon]
        steps = np.diff(tail, axis=0)
        eps = 1e-14 * max(1.0, float(np.max(np.abs(tail))))
        monotone = [bool(np.all(steps[:, i] <= eps) or np.all(steps[:, i] >= -eps)) for i in range(tail.shape[1])]

        report = OmegaReport(x0=x0.tolist(),
                             horizon=float(horizon),
                             window=float(window),
                             minimum=tail.min(axis=0).tolist(),
                             maximum=tail.max(axis=0).tolist(),
                             mean=tail.mean(axis=0).tolist(),
                             oscillation=np.ptp(tail, axis=0).tolist(),
                             monotone=monotone,
                             final=tail[-1].tolist(),
                             tolerance=self.omega_tol if tolerance is None else tolerance)

        self.logger.info('Omega probe from %s: oscillation %.3e on the trailing window (%s).'
                         % (x0.tolist(), max(report.oscillation),
                            'converged' if report.converged else 'not converged'))

        return report

    def continuity_estimate(self, tau, f, h, slack=1e-12):
        """rho(T_tau f, T_tau h) against the quantitative continuity bound.

        With k = ceil(tau), S = sup_[0,tau] ||x_f - x_h|| and N terms of the
        metric, the bound is
            sum_n 2^-n rho_{n+k}(f, h) + L c S / (alpha Gamma(alpha)),
            c = sum_{n<=N} (k + n)^alpha 2^-n.
        The looser form 2^k rho(f, h) + L (c + tail) S / (alpha Gamma(alpha))
        is reported alongside.
        """

        if f.grid != h.grid:
            raise GridMismatchError('Histories live on different grids.')

        m = self.steps(tau)
        k = int(math.ceil(m * self.h - 1e-12))
        a = self.alpha
        lipschitz = self.field.lipschitz

        Tf, x_f = self._apply(self.field, m, f)
        Th, x_h = self._apply(self.field, m, h)
        measured = rho_on_horizon(Tf, Th, self.metric)
        terms = measured.terms

        if m > 0:
            S = float(np.max(np.linalg.norm(x_f.values - x_h.values, axis=1)))
        else:
            S = 0.0

        first = sum(2.0 ** -n * saturate(sup_dist_on(f, h, min(n + k, f.horizon))) for n in range(1, terms + 1))
        c = sum((k + n) ** a * 2.0 ** -n for n in range(1, terms + 1))
        c_tail = 2.0 ** -terms * ((k + terms) ** a + 2.0)
        memory = lipschitz * S / (a * gamma_fn(a))

        bound = first + c * memory
        coarse = rho_on_horizon(f, h, self.metric)
        loose_bound = 2.0 ** k * (coarse.value + coarse.tail_bound) + (c + c_tail) * memory

        report = DefectReport('continuity_T', float(measured.value), bound + slack, self.h, a,
                              horizon_consumed=m * self.h,
                              details={'bound': bound,
                                       'loose_bound': loose_bound,
                                       'k': k,
                                       'c': c,
                                       'c_tail': c_tail,
                                       'solution_distance': S,
                                       'input_distance': float(coarse.value)})
        self._log_report(report)

        return report
