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
import math
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from caputoflow.common import write_table
from caputoflow.exceptions import (DomainError,
                                   GridMismatchError,
                                   HorizonError)
from caputoflow.kernel_quadrature import UniformGrid

MetricValue = namedtuple('MetricValue', 'value tail_bound terms')


class GridFunction(object):
    """Continuous function on [0, H] sampled on a uniform grid.

    Values between nodes are defined by piecewise-linear interpolation.
    Instances are immutable.
    """

    def __init__(self, grid, values):
        """Initialization.

        Parameters
        ----------
        grid : UniformGrid
            Grid with horizon H = n h.
        values : array_like
            Samples at the n+1 nodes, shape (n+1,) or (n+1, d).
        """

        values = np.array(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]

        if values.ndim != 2 or values.shape[0] != grid.n + 1:
            raise GridMismatchError('Expected %d samples, got array of shape %s.' % (grid.n + 1, values.shape))
        if not np.all(np.isfinite(values)):
            raise DomainError('Grid function values must be finite.')

        values.setflags(write=False)
        self.grid = grid
        self.values = values

    @classmethod
    def sample(cls, fn, grid):
        """Sample fn(t), vectorized over an array of times, on the grid."""
        return cls(grid, fn(grid.nodes))

    @classmethod
    def constant(cls, grid, x0):
        x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        return cls(grid, np.tile(x0, (grid.n + 1, 1)))

    @classmethod
    def polynomial(cls, grid, coeffs):
        """Polynomial per coordinate, coeffs[i] in increasing powers."""

        t = grid.nodes
        columns = [np.polynomial.polynomial.polyval(t, c) for c in coeffs]

        return cls(grid, np.stack(columns, axis=1))

    @classmethod
    def sinusoid(cls, grid, offset, amplitude, omega, phase=0.0):
        """offset + amplitude sin(omega t + phase), broadcast per coordinate."""

        t = grid.nodes[:, None]
        offset, amplitude, omega, phase = (np.atleast_1d(np.asarray(p, dtype=float))
                                           for p in (offset, amplitude, omega, phase))

        return cls(grid, offset + amplitude * np.sin(omega * t + phase))

    @property
    def dimension(self):
        return self.values.shape[1]

    @property
    def horizon(self):
        return self.grid.horizon

    def __call__(self, t):
        return eval_at(self, t)

    def __eq__(self, other):
        return (isinstance(other, GridFunction)
                and self.grid == other.grid
                and np.array_equal(self.values, other.values))

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __add__(self, other):
        _check_common_grid(self, other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_common_grid(self, other)
        return GridFunction(self.grid, self.values - other.values)

    def scaled(self, c):
        return GridFunction(self.grid, c * self.values)

    def truncate(self, m):
        """Restriction to [0, m h]."""

        if not 1 <= m <= self.grid.n:
            raise HorizonError('Cannot restrict %d-step function to %d steps.' % (self.grid.n, m))

        return GridFunction(self.grid.truncate(m), self.values[:m + 1])

    def shift(self, m):
        """Function t -> f(m h + t) on the remaining horizon."""

        if not 0 <= m < self.grid.n:
            raise HorizonError('Shift by %d steps exhausts horizon of %d steps.' % (m, self.grid.n))
        if m == 0:
            return self

        return GridFunction(self.grid.truncate(self.grid.n - m), self.values[m:])

    def to_dict(self):
        return {'h': self.grid.h,
                'n': self.grid.n,
                'values': self.values.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(UniformGrid(d['h'], d['n']), d['values'])

    def write_csv(self, output_file):
        """Write columns t, f_1..f_d."""

        header = ['t'] + ['f_%d' % (i + 1) for i in range(self.dimension)]
        rows = np.column_stack([self.grid.nodes, self.values])
        write_table(output_file, header, rows)

    def write_json(self, output_file):
        with open(output_file, 'w') as fout:
            json.dump(self.to_dict(), fout)


@dataclass(frozen=True)
class MetricParams:
    """Number of terms kept from the series sum_n 2^-n rho_n."""

    n_max: int = 8

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise DomainError('Metric truncation level must be an integer >= 1, got %r.' % self.n_max)

    @property
    def tail_bound(self):
        return 2.0 ** -self.n_max


def _check_common_grid(f, h):
    if f.grid != h.grid:
        raise GridMismatchError('Grid functions live on different grids: %s vs %s.' % (f.grid, h.grid))
    if f.dimension != h.dimension:
        raise GridMismatchError('Grid functions have dimensions %d and %d.' % (f.dimension, h.dimension))


def eval_at(f, t):
    """Piecewise-linear interpolation of f at time t in [0, H]."""

    h = f.grid.h
    n = f.grid.n
    if t < 0 or t > f.horizon * (1 + 1e-12):
        raise DomainError('Time %r outside [0, %g].' % (t, f.horizon))

    pos = t / h
    j = min(int(math.floor(pos)), n)
    frac = pos - j
    if j == n or frac == 0.0:
        return f.values[j].copy()

    return (1.0 - frac) * f.values[j] + frac * f.values[j + 1]


def saturate(s):
    """s / (1 + s), the bounded transform used by rho_n."""
    return s / (1.0 + s)


def sup_dist_on(f, h, n):
    """sup of ||f(t) - h(t)|| over [0, n].

    The difference of two piecewise-linear functions attains its sup at the
    nodes, so the maximum over nodes in [0, n] is exact.
    """

    _check_common_grid(f, h)
    if n > f.horizon * (1 + 1e-12):
        raise HorizonError('Requested sup over [0, %g] beyond horizon %g.' % (n, f.horizon))

    last = int(math.floor(n / f.grid.h + 1e-9))
    diff = f.values[:last + 1] - h.values[:last + 1]

    return float(np.max(np.linalg.norm(diff, axis=1)))


def rho_n(f, h, n):
    """Component rho_n = s / (1 + s) with s the sup distance on [0, n]."""

    if int(n) != n or n < 1:
        raise DomainError('rho_n is defined for integers n >= 1, got %r.' % n)

    return saturate(sup_dist_on(f, h, n))


def rho(f, h, p):
    """Truncated compact-open metric sum_{n<=N_max} 2^-n rho_n(f, h).

    Parameters
    ----------
    f, h : GridFunction
        Functions on a common grid.
    p : MetricParams
        Truncation level N_max, at most the horizon.

    Returns
    -------
    MetricValue
        Truncated value, tail bound 2^-N_max and number of terms.
    """

    _check_common_grid(f, h)
    if p.n_max > f.horizon * (1 + 1e-12):
        raise HorizonError('Metric truncation N_max=%d exceeds horizon %g.' % (p.n_max, f.horizon))

    # sup distances on [0, n] are running maxima of the nodal distances
    dist = np.maximum.accumulate(np.linalg.norm(f.values - h.values, axis=1))
    total = 0.0
    for n in range(1, p.n_max + 1):
        last = int(math.floor(n / f.grid.h + 1e-9))
        total += 2.0 ** -n * saturate(dist[last])

    return MetricValue(total, p.tail_bound, p.n_max)


def rho_on_horizon(f, h, p):
    """rho with N = min(N_max, floor(H)) terms, for functions on shortened horizons."""

    terms = min(p.n_max, int(math.floor(f.horizon + 1e-9)))
    if terms < 1:
        raise HorizonError('Remaining horizon %g is shorter than 1; rho_1 is undefined.' % f.horizon)

    return rho(f, h, MetricParams(terms))
