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

'''Weakly singular kernel a(t,s), its tempered variant and product integration.

Weights are stored per panel. For a panel [t_i, t_{i+1}] at distance
m = j - i from the evaluation node t_j, left[m] and right[m] are the
integrals of the kernel against the two hat functions of the panel, so
that the product-trapezoid rule reads

    sum_k w_{j,k} phi_k = sum_{k<j} left[j-k] phi_k + sum_{k>=1} right[j-k+1] phi_k.

The table only depends on the distance, which keeps memory O(N).
'''

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammainc as sp_gammainc

from caputoflow.exceptions import DomainError, GridMismatchError
from caputoflow.special_functions import FractionalOrder, gamma_fn, order_value


@dataclass(frozen=True)
class Kernel:
    """Kernel (t-s)^(alpha-1) exp(-beta (t-s)) / Gamma(alpha)."""

    alpha: FractionalOrder
    beta: float = 0.0

    def __post_init__(self):
        if not isinstance(self.alpha, FractionalOrder):
            object.__setattr__(self, 'alpha', FractionalOrder(self.alpha))
        if not self.beta >= 0:
            raise DomainError('Tempering rate beta must be nonnegative, got %r.' % self.beta)
        object.__setattr__(self, 'beta', float(self.beta))

    @property
    def tempered(self):
        return self.beta > 0

    def __call__(self, t, s):
        return kernel_eval(self, t, s)


@dataclass(frozen=True)
class UniformGrid:
    """Nodes t_j = j h, j = 0..n."""

    h: float
    n: int

    def __post_init__(self):
        if not self.h > 0:
            raise DomainError('Grid step must be positive, got %r.' % self.h)
        if int(self.n) != self.n or self.n < 1:
            raise DomainError('Grid must have at least one step, got n=%r.' % self.n)
        object.__setattr__(self, 'h', float(self.h))
        object.__setattr__(self, 'n', int(self.n))

    @classmethod
    def from_horizon(cls, h, horizon):
        """Grid of step h covering [0, horizon]; h must divide the horizon."""

        n = int(round(horizon / h))
        if n < 1 or abs(n * h - horizon) > 1e-9 * max(1.0, horizon):
            raise DomainError('Grid step %g does not divide the horizon %g.' % (h, horizon))

        return cls(h, n)

    @property
    def nodes(self):
        return self.h * np.arange(self.n + 1)

    @property
    def horizon(self):
        return self.n * self.h

    def truncate(self, n):
        """Leading sub-grid with n steps."""
        return UniformGrid(self.h, n)


@dataclass(frozen=True, eq=False)
class ConvolutionWeights:
    """Product-integration tables for one (alpha, beta, h, n)."""

    alpha: float
    beta: float
    grid: UniformGrid
    left: np.ndarray
    right: np.ndarray
    rect: np.ndarray

    @property
    def diagonal(self):
        """Weight w_{j,j} of the current node."""
        return self.right[1]

    def row(self, j):
        """Dense weights w_{j,0..j} of node j."""

        w = np.zeros(j + 1)
        k = np.arange(j + 1)
        w[:j] += self.left[j - k[:j]]
        w[1:] += self.right[j - k[1:] + 1]

        return w

    def history(self, j, g):
        """sum_{k<j} w_{j,k} g_k, the corrector sum without the node itself."""

        hist = self.left[j:0:-1] @ g[:j]
        if j > 1:
            hist = hist + self.right[j:1:-1] @ g[1:j]

        return hist

    def predictor_history(self, j, g):
        """Product-rectangle sum over k < j used by the predictor."""
        return self.rect[j:0:-1] @ g[:j]


def kernel_eval(k, t, s):
    """Kernel value a(t,s), tempered when k.beta > 0.

    Parameters
    ----------
    k : Kernel
        Kernel parameters.
    t : float
        Evaluation time.
    s : float
        Integration variable, 0 <= s < t.

    Returns
    -------
    float
        (t-s)^(alpha-1) exp(-beta (t-s)) / Gamma(alpha)
    """

    if s < 0 or s >= t:
        raise DomainError('Kernel requires 0 <= s < t, got t=%r, s=%r.' % (t, s))

    a = k.alpha.alpha
    u = t - s

    return u ** (a - 1.0) * math.exp(-k.beta * u) / gamma_fn(a)


def kernel_mass(alpha, tau, theta):
    """Closed form of the integral of a(tau+theta, s) over s in [0, tau]."""

    if tau < 0 or theta < 0:
        raise DomainError('Kernel mass requires tau >= 0 and theta >= 0.')

    a = order_value(alpha)

    return ((tau + theta) ** a - theta ** a) / (a * gamma_fn(a))


def tempered_mass(k, t):
    """Integral of the (possibly tempered) kernel a(t, s) over s in [0, t]."""

    if t < 0:
        raise DomainError('Kernel mass requires t >= 0.')

    a = k.alpha.alpha
    if not k.tempered:
        return kernel_mass(a, t, 0.0)

    return float(sp_gammainc(a, k.beta * t)) / k.beta ** a


@lru_cache(maxsize=64)
def _panel_tables(a, beta, h, n):
    m = np.arange(1, n + 1, dtype=float)
    p = (m ** a - (m - 1.0) ** a) / a
    q = (m ** (a + 1.0) - (m - 1.0) ** (a + 1.0)) / (a + 1.0)
    scale = h ** a / gamma_fn(a)

    left = np.zeros(n + 1)
    right = np.zeros(n + 1)
    rect = np.zeros(n + 1)
    left[1:] = scale * (q - (m - 1.0) * p)
    right[1:] = scale * (m * p - q)
    rect[1:] = scale * p

    if beta > 0:
        # exponential factor frozen at the panel midpoint
        damping = np.exp(-beta * h * (m - 0.5))
        left[1:] *= damping
        right[1:] *= damping
        rect[1:] *= damping

    for table in (left, right, rect):
        table.setflags(write=False)

    return left, right, rect


def conv_weights(alpha, grid, beta=0.0):
    """Product-trapezoid weights for integrals of a(t_j, s) phi(s).

    Parameters
    ----------
    alpha : FractionalOrder or float
        Order of the kernel.
    grid : UniformGrid
        Uniform grid.
    beta : float
        Tempering rate, 0 for the untempered kernel.

    Returns
    -------
    ConvolutionWeights
        Tables shared through a cache keyed by (alpha, beta, h, n).
    """

    a = order_value(alpha)
    if beta < 0:
        raise DomainError('Tempering rate beta must be nonnegative, got %r.' % beta)

    left, right, rect = _panel_tables(a, float(beta), grid.h, grid.n)

    return ConvolutionWeights(a, float(beta), grid, left, right, rect)


def _as_samples(w, samples, count):
    g = np.asarray(samples, dtype=float)
    if g.ndim == 0 or len(g) < count:
        raise GridMismatchError('Expected at least %d samples, got %d.' % (count, 0 if g.ndim == 0 else len(g)))

    return g[:count]


def _conv_columns(table, g, count):
    if g.ndim == 1:
        return np.convolve(table, g)[:count]

    return np.stack([np.convolve(table, g[:, i])[:count] for i in range(g.shape[1])], axis=1)


def convolve(w, samples, count=None):
    """Discrete convolution sum_k w_{j,k} samples_k for every node j.

    Parameters
    ----------
    w : ConvolutionWeights
        Product-integration tables.
    samples : array_like
        Values at the grid nodes, shape (n+1,) or (n+1, d).
    count : int
        Only evaluate the leading nodes 0..count-1 from the first count samples.

    Returns
    -------
    ndarray
        Integral approximations at the evaluated nodes.
    """

    if count is None:
        count = w.grid.n + 1
    elif not 1 <= count <= w.grid.n + 1:
        raise GridMismatchError('Cannot evaluate %d nodes of a grid with %d steps.' % (count, w.grid.n))

    g = _as_samples(w, samples, count)

    out = _conv_columns(w.left, g, count)
    if count > 1:
        out = out + _conv_columns(w.right, g[1:], count)

    return out


def partial_convolve(w, samples, m):
    """Memory of [0, t_m] seen from the nodes t_m..t_n.

    Returns sum over the panels inside [0, t_m] of the product-trapezoid
    contributions at every node J = m..n. Only samples 0..m are used; at
    J = m this equals the full convolution at t_m.
    """

    n = w.grid.n
    if not 0 <= m <= n:
        raise GridMismatchError('Memory length %d outside grid with %d steps.' % (m, n))

    g = _as_samples(w, samples, m + 1)
    if m == 0:
        shape = (n + 1,) + g.shape[1:]
        return np.zeros(shape)[: n - m + 1]

    out = _conv_columns(w.left, g[:m], n + 1) + _conv_columns(w.right, g[1:m + 1], n + 1)

    return out[m:]


def shifted_trapezoid(w, samples, m):
    """Variant of partial_convolve with a composite trapezoid rule for J > m.

    The node J = m keeps the product weights (the kernel is singular at
    s = t_m there); the other nodes integrate the smooth shifted kernel
    a(t_J, s) on the nodes of [0, t_m].
    """

    out = partial_convolve(w, samples, m)
    if m == 0:
        return out

    g = _as_samples(w, samples, m + 1)
    h = w.grid.h
    a = w.alpha
    scale = 1.0 / gamma_fn(a)

    trap = np.full(m + 1, h)
    trap[0] = trap[-1] = 0.5 * h
    k = np.arange(m + 1)
    for i, J in enumerate(range(m + 1, w.grid.n + 1), start=1):
        u = (J - k) * h
        kernel = scale * u ** (a - 1.0) * np.exp(-w.beta * u)
        out[i] = (trap * kernel) @ g

    return out
