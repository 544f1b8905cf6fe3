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

from dataclasses import dataclass

import numpy as np

from caputoflow.common import DefectReport
from caputoflow.exceptions import DomainError, HorizonError
from caputoflow.history_space import GridFunction, rho_on_horizon, sup_dist_on
from caputoflow.semigroup import SemigroupEngine


class TimedField(object):
    """Time translate t -> g(offset + t, .) of a field.

    Behaves like a VectorField, so it can be handed to the solvers directly.
    """

    def __init__(self, base, offset=0.0):
        if offset < 0:
            raise DomainError('Field offset must be nonnegative, got %g.' % offset)

        self.base = base
        self.offset = float(offset)

    @property
    def lipschitz(self):
        return self.base.lipschitz

    @property
    def autonomous(self):
        return self.base.autonomous

    @property
    def name(self):
        if self.offset == 0:
            return self.base.name
        return '%s@%g' % (self.base.name, self.offset)

    def evaluate(self, t, x):
        return self.base.evaluate(self.offset + np.asarray(t, dtype=float), x)

    def __call__(self, t, x):
        return self.base(self.offset + t, x)

    def spot_check(self, points, times=None, pairs=64, seed=0):
        if times is not None:
            times = self.offset + np.asarray(times, dtype=float)
        return self.base.spot_check(points, times, pairs, seed)


def shift_field(g, tau):
    """g_tau(t, x) = g(t + tau, x)."""

    if tau < 0:
        raise DomainError('Field shift must be nonnegative, got %g.' % tau)

    if isinstance(g, TimedField):
        return TimedField(g.base, g.offset + tau)

    return TimedField(g, tau)


@dataclass(frozen=True)
class SkewState:
    """Pair (f, g) of a history and a time-dependent field."""

    f: GridFunction
    g: TimedField

    def __post_init__(self):
        if not self.f.horizon > 0:
            raise HorizonError('Skew state history must have a positive horizon.')
        if not isinstance(self.g, TimedField):
            object.__setattr__(self, 'g', TimedField(self.g))


class SkewProductEngine(SemigroupEngine):
    """Skew-product flow Pi(tau, (f, g)) = (T_tau(f, g), g_tau) for nonautonomous fields.

    The operator on the first component is the same memory shift as for the
    autonomous semigroup, with the field carried by the state.
    """

    def __init__(self, alpha, h, **kwargs):
        SemigroupEngine.__init__(self, None, alpha, h, **kwargs)

    def _field_from_state(self, operation):
        raise DomainError('%s needs a fixed field; the skew-product engine takes the field from the state, '
                          'use apply_T_skew, apply_Pi or cocycle_defect.' % operation)

    def solve(self, f, n, field=None):
        if field is None:
            self._field_from_state('solve')
        return SemigroupEngine.solve(self, f, n, field)

    def apply_T(self, tau, f):
        self._field_from_state('apply_T')

    def semigroup_defect(self, sigma, tau, f, tolerance=None):
        self._field_from_state('semigroup_defect')

    def shift_identity_residual(self, tau, f, tolerance=None):
        self._field_from_state('shift_identity_residual')

    def steady_state_residual(self, x_star, tau, horizon=None, tolerance=None):
        self._field_from_state('steady_state_residual')

    def orbit(self, x0, t):
        self._field_from_state('orbit')

    def omega_probe(self, x0, horizon, window, tolerance=None):
        self._field_from_state('omega_probe')

    def continuity_estimate(self, tau, f, h, slack=1e-12):
        self._field_from_state('continuity_estimate')

    def apply_T_skew(self, tau, state):
        """History component of Pi(tau, state)."""
        return self._apply(state.g, self.steps(tau), state.f)[0]

    def apply_Pi(self, tau, state):
        """Pi(tau, (f, g)) = (T_tau(f, g), g_tau)."""

        if self.steps(tau) == 0:
            return state

        return SkewState(self.apply_T_skew(tau, state), shift_field(state.g, tau))

    def cocycle_defect(self, sigma, tau, state, probes=None, tolerance=None):
        """Distance between Pi(sigma + tau, s) and Pi(sigma, Pi(tau, s)).

        Parameters
        ----------
        sigma, tau : float
            Grid-aligned shifts with sigma + tau below the horizon.
        state : SkewState
            Starting pair (f, g).
        probes : array_like
            States at which the field components are compared; defaults to
            the values of f.
        tolerance : float
            Pass threshold; defaults to the engine defect tolerance.

        Returns
        -------
        DefectReport
            The larger of the history distance rho and the field defect.
        """

        ms = self.steps(sigma)
        mt = self.steps(tau)
        if ms + mt >= state.f.grid.n:
            raise HorizonError('sigma + tau = %g exhausts the horizon %g.' % (sigma + tau, state.f.horizon))

        one_step = self.apply_Pi(sigma + tau, state)
        two_step = self.apply_Pi(sigma, self.apply_Pi(tau, state))

        if probes is None:
            probes = state.f.values
        probes = np.atleast_2d(np.asarray(probes, dtype=float))
        times = one_step.f.grid.nodes
        field_defect = 0.0
        for x in probes:
            batch = np.tile(x, (len(times), 1))
            diff = one_step.g.evaluate(times, batch) - two_step.g.evaluate(times, batch)
            field_defect = max(field_defect, float(np.max(np.linalg.norm(diff, axis=1))))

        metric = rho_on_horizon(one_step.f, two_step.f, self.metric)
        report = DefectReport('cocycle', max(float(metric.value), field_defect), self._tolerance(tolerance),
                              self.h, self.alpha,
                              horizon_consumed=(ms + mt) * self.h,
                              details={'sigma': ms * self.h,
                                       'tau': mt * self.h,
                                       'history_defect': float(metric.value),
                                       'field_defect': field_defect,
                                       'tail_bound': metric.tail_bound,
                                       'terms': metric.terms,
                                       'sup_distance': sup_dist_on(one_step.f, two_step.f, one_step.f.horizon)})
        self._log_report(report)

        return report
