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

'''Gamma and one-parameter Mittag-Leffler functions on real arguments.'''

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import gamma as sp_gamma, rgamma as sp_rgamma

from caputoflow.exceptions import (AccuracyLossError,
                                   DomainError,
                                   MittagLefflerOverflowError)

# regime switch, in terms of z = |t|^(1/alpha)
POSITIVE_SERIES_LIMIT = 50.0
NEGATIVE_SERIES_LIMIT = 4.0
NEGATIVE_ASYMPTOTIC_LIMIT = 60.0

TARGET_RTOL = 1e-10
MAX_SERIES_TERMS = 20000
LOG_FLOAT_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class FractionalOrder:
    """Order alpha of a Caputo derivative, strictly inside (0, 1)."""

    alpha: float

    def __post_init__(self):
        alpha = float(self.alpha)
        if not (0.0 < alpha < 1.0):
            raise DomainError('Fractional order must satisfy 0 < alpha < 1, got %r.' % self.alpha)
        object.__setattr__(self, 'alpha', alpha)

    def __float__(self):
        return self.alpha


@dataclass(frozen=True)
class WeightParams:
    """Rate gamma and order alpha of the weight E_alpha(gamma t^alpha)."""

    gamma: float
    alpha: FractionalOrder

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError('Weight rate gamma must be positive, got %r.' % self.gamma)
        if not isinstance(self.alpha, FractionalOrder):
            object.__setattr__(self, 'alpha', FractionalOrder(self.alpha))


def order_value(alpha, allow_one=False):
    """Plain float of an order given as FractionalOrder or number."""

    if isinstance(alpha, FractionalOrder):
        return alpha.alpha

    a = float(alpha)
    if allow_one and a == 1.0:
        return a
    return FractionalOrder(a).alpha


def gamma_fn(x):
    """Gamma function on the positive half-line.

    Parameters
    ----------
    x : float
        Argument, must be positive.

    Returns
    -------
    float
        Gamma(x).
    """

    if not x > 0:
        raise DomainError('Gamma function is only evaluated for x > 0, got %r.' % x)

    return float(sp_gamma(x))


def _ml_series(a, t):
    """Power series with compensated summation."""

    terms = []
    max_term = 0.0
    running = 0.0
    prev_mag = math.inf
    for k in range(MAX_SERIES_TERMS):
        term = t ** k * sp_rgamma(a * k + 1.0)
        mag = abs(term)
        terms.append(term)
        running += term
        max_term = max(max_term, mag)

        if k > 0 and mag < prev_mag and mag <= 1e-18 * max(abs(running), 1e-300):
            break
        prev_mag = mag
    else:
        raise AccuracyLossError('Mittag-Leffler series did not converge for alpha=%g, t=%g.' % (a, t))

    result = math.fsum(terms)

    # terms carry a few ulp each; cancellation amplifies by max_term/|result|
    if result == 0 or 8 * np.finfo(float).eps * max_term > TARGET_RTOL * abs(result):
        raise AccuracyLossError('Cancellation in Mittag-Leffler series for alpha=%g, t=%g.' % (a, t))

    return result


def _ml_exponential_asymptotic(a, t, z):
    """Large positive arguments: (1/a) exp(t^(1/a)) minus the algebraic tail."""

    log_lead = z - math.log(a)
    if log_lead >= LOG_FLOAT_MAX:
        raise MittagLefflerOverflowError('E_%g(%g) exceeds the largest representable float.' % (a, t))

    lead = math.exp(log_lead)
    tail = []
    for k in range(1, 50):
        term = t ** (-k) * sp_rgamma(1.0 - a * k)
        tail.append(term)
        if abs(term) <= 1e-18 * lead:
            break

    return lead - math.fsum(tail)


def _ml_algebraic_asymptotic(a, t):
    """Large negative arguments: -sum_k t^(-k) / Gamma(1 - a k)."""

    terms = []
    running = 0.0
    smallest = math.inf
    for k in range(1, MAX_SERIES_TERMS):
        term = -(t ** (-k)) * sp_rgamma(1.0 - a * k)
        if not math.isfinite(term):
            break

        mag = abs(term)
        if mag > smallest and mag > 0:
            # asymptotic series started to diverge
            break

        terms.append(term)
        running += term
        if mag > 0:
            smallest = mag
            if mag <= 1e-18 * abs(running):
                return math.fsum(terms)

    result = math.fsum(terms)
    if result == 0 or smallest > 1e-2 * TARGET_RTOL * abs(result):
        raise AccuracyLossError('Asymptotic expansion of E_%g(%g) is not accurate enough.' % (a, t))

    return result


def _ml_laplace(a, x):
    """E_a(-x), x > 0, from its representation as a Laplace-type integral."""

    inv = 1.0 / a
    cos_ap = math.cos(a * math.pi)
    scale = math.sin(a * math.pi) / (a * math.pi)

    # exp(-s) underflows to zero for s > 750
    log_cut = math.log(750.0)

    def integrand(u):
        xu = x * u
        if xu > 0 and inv * math.log(xu) > log_cut:
            return 0.0
        return math.exp(-xu ** inv) / (u * u + 2.0 * u * cos_ap + 1.0)

    # the exponential factor drops from 1 to 0 around u = 1/x
    edges = sorted({0.0, 1.0, 2.0} | {c / x for c in (0.5, 1.0, 2.0, 4.0)})
    intervals = list(zip(edges[:-1], edges[1:])) + [(edges[-1], math.inf)]

    value = 0.0
    error = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', IntegrationWarning)
        for lo, hi in intervals:
            v, e = quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-13, limit=400)
            value += v
            error += e

    result = scale * value
    if error > 0.1 * TARGET_RTOL * value:
        raise AccuracyLossError('Quadrature for E_%g(%g) could not be certified (error %.2e).' % (a, -x, error))

    return result


def mittag_leffler(alpha, t):
    """One-parameter Mittag-Leffler function E_alpha(t) on real arguments.

    Parameters
    ----------
    alpha : FractionalOrder or float
        Order in (0, 1]; alpha = 1 is the exponential.
    t : float
        Real argument.

    Returns
    -------
    float
        sum_k t^k / Gamma(alpha k + 1).
    """

    a = order_value(alpha, allow_one=True)
    t = float(t)
    if not math.isfinite(t):
        raise DomainError('Mittag-Leffler argument must be finite, got %r.' % t)

    if t == 0.0:
        return 1.0

    if a == 1.0:
        if t >= LOG_FLOAT_MAX:
            raise MittagLefflerOverflowError('exp(%g) exceeds the largest representable float.' % t)
        return math.exp(t)

    log_z = math.log(abs(t)) / a
    z = math.exp(min(log_z, 700.0))
    if t > 0:
        if z < POSITIVE_SERIES_LIMIT:
            return _ml_series(a, t)
        return _ml_exponential_asymptotic(a, t, z)

    if z <= NEGATIVE_SERIES_LIMIT:
        expansion = _ml_series
    elif z >= NEGATIVE_ASYMPTOTIC_LIMIT:
        expansion = _ml_algebraic_asymptotic
    else:
        return _ml_laplace(a, -t)

    try:
        return expansion(a, t)
    except AccuracyLossError:
        # the integral representation holds on the whole negative axis
        return _ml_laplace(a, -t)


def log_mittag_leffler(alpha, t):
    """log E_alpha(t), also where E_alpha(t) exceeds the largest float.

    Past overflow only the leading term exp(t^(1/alpha)) / alpha of the
    exponential asymptotic is visible in double precision.
    """

    try:
        return math.log(mittag_leffler(alpha, t))
    except MittagLefflerOverflowError:
        a = order_value(alpha, allow_one=True)
        return float(t) ** (1.0 / a) - math.log(a)


@lru_cache(maxsize=256)
def mittag_leffler_log_weights(alpha, gamma, h, n):
    """log E_alpha(gamma t_j^alpha) at the nodes t_j = j h, j = 0..n.

    Finite on any horizon; the returned array is read-only.
    """

    nodes = h * np.arange(n + 1)
    logs = np.array([log_mittag_leffler(alpha, gamma * t ** alpha) for t in nodes])
    logs.setflags(write=False)

    return logs


@lru_cache(maxsize=256)
def mittag_leffler_weights(alpha, gamma, h, n):
    """E_alpha(gamma t_j^alpha) at the nodes t_j = j h, j = 0..n.

    Cached per (alpha, gamma, h, n); the returned array is read-only.
    """

    nodes = h * np.arange(n + 1)
    weights = np.array([mittag_leffler(alpha, gamma * t ** alpha) for t in nodes])
    weights.setflags(write=False)

    return weights


def bielecki_norm(x, w):
    """Mittag-Leffler weighted sup norm on the grid of x.

    Parameters
    ----------
    x : Trajectory or GridFunction
        Sampled function with attributes grid and values.
    w : WeightParams
        Weight rate and order.

    Returns
    -------
    float
        max_j ||x(t_j)|| / E_alpha(gamma t_j^alpha).
    """

    values = np.asarray(x.values, dtype=float)
    if values.size == 0:
        raise DomainError('Weighted norm of an empty function.')

    log_weights = mittag_leffler_log_weights(w.alpha.alpha, w.gamma, x.grid.h, x.grid.n)
    norms = np.linalg.norm(values.reshape(len(values), -1), axis=1)

    return float(np.max(norms * np.exp(-log_weights)))


def weighted_distance(x, y, alpha, gamma, h):
    """Weighted sup distance of two sample arrays on a grid of step h."""

    diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    n = len(diff) - 1
    log_weights = mittag_leffler_log_weights(order_value(alpha), gamma, h, n)
    norms = np.linalg.norm(diff.reshape(n + 1, -1), axis=1)

    return float(np.max(norms * np.exp(-log_weights)))
