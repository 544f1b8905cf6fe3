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

import math
import unittest

import numpy as np
from numpy.testing import assert_allclose
from scipy.special import erfcx

from caputoflow.exceptions import AccuracyLossError, DomainError, MittagLefflerOverflowError
from caputoflow.history_space import GridFunction
from caputoflow.kernel_quadrature import UniformGrid, conv_weights, convolve
from caputoflow.special_functions import (FractionalOrder,
                                          WeightParams,
                                          bielecki_norm,
                                          gamma_fn,
                                          log_mittag_leffler,
                                          mittag_leffler,
                                          mittag_leffler_weights,
                                          weighted_distance)


def ml_half(t):
    """E_{1/2}(t) = exp(t^2) erfc(-t)."""
    return float(erfcx(-t))


class TestGamma(unittest.TestCase):

    def test_values(self):
        self.assertAlmostEqual(gamma_fn(0.5), math.sqrt(math.pi), places=14)
        self.assertAlmostEqual(gamma_fn(1.0), 1.0, places=14)
        self.assertAlmostEqual(gamma_fn(2.5), 1.3293403881791355, places=12)

    def test_recurrence(self):
        for x in np.linspace(0.05, 5.0, 40):
            self.assertAlmostEqual(gamma_fn(x + 1) / (x * gamma_fn(x)), 1.0, places=12)

    def test_domain(self):
        for x in (0.0, -1.0, -0.5):
            with self.assertRaises(DomainError):
                gamma_fn(x)


class TestFractionalOrder(unittest.TestCase):

    def test_range(self):
        self.assertEqual(float(FractionalOrder(0.5)), 0.5)
        for a in (0.0, 1.0, 1.5, -0.2):
            with self.assertRaises(DomainError):
                FractionalOrder(a)

    def test_weight_params(self):
        w = WeightParams(2.0, 0.5)
        self.assertIsInstance(w.alpha, FractionalOrder)
        with self.assertRaises(DomainError):
            WeightParams(0.0, 0.5)


class TestMittagLeffler(unittest.TestCase):

    def test_zero_argument(self):
        for a in (0.1, 0.5, 0.9, 1.0):
            self.assertEqual(mittag_leffler(a, 0.0), 1.0)

    def test_exponential_case(self):
        t = np.linspace(-50.0, 50.0, 1000)
        values = np.array([mittag_leffler(1.0, x) for x in t])
        assert_allclose(values, np.exp(t), rtol=1e-10)

    def test_reference_values(self):
        self.assertAlmostEqual(mittag_leffler(0.5, 1.0), 5.00898008076228, places=10)
        self.assertAlmostEqual(mittag_leffler(0.5, -1.0), 0.42758357615580705, places=10)

    def test_half_order_identity(self):
        # covers every regime of the evaluator on both half-lines
        for t in np.concatenate([np.linspace(-80.0, -0.01, 97), np.linspace(0.01, 9.0, 61)]):
            self.assertAlmostEqual(mittag_leffler(0.5, t) / ml_half(t), 1.0, places=9, msg='t = %g' % t)

    def test_negative_decay(self):
        for a in (0.3, 0.5, 0.8):
            previous = 1.0
            for t in np.linspace(-0.5, -30.0, 40):
                value = mittag_leffler(a, t)
                self.assertGreater(value, 0.0)
                self.assertLess(value, previous)
                previous = value

    def test_large_negative_asymptote(self):
        for a in (0.3, 0.6):
            t = -1e4
            self.assertAlmostEqual(mittag_leffler(a, t) * -t * gamma_fn(1 - a), 1.0, places=3)

    def test_series_agrees_with_asymptotic_at_switch(self):
        a = 0.5
        t = 50.0 ** a
        below = mittag_leffler(a, t * (1 - 1e-9))
        above = mittag_leffler(a, t * (1 + 1e-9))
        self.assertAlmostEqual(below / above, 1.0, places=7)

    def test_monotone_on_positive_axis(self):
        values = [mittag_leffler(0.7, t) for t in np.linspace(0.0, 10.0, 50)]
        self.assertTrue(all(b > a for a, b in zip(values[:-1], values[1:])))

    def test_overflow(self):
        with self.assertRaises(MittagLefflerOverflowError):
            mittag_leffler(0.5, 1e3)
        with self.assertRaises(MittagLefflerOverflowError):
            mittag_leffler(1.0, 1e4)

    def test_overflow_is_an_overflow_error(self):
        self.assertTrue(issubclass(MittagLefflerOverflowError, OverflowError))
        self.assertTrue(issubclass(AccuracyLossError, Exception))

    def test_domain(self):
        with self.assertRaises(DomainError):
            mittag_leffler(1.2, 1.0)
        with self.assertRaises(DomainError):
            mittag_leffler(0.5, float('nan'))

    def test_small_order_on_negative_axis(self):
        self.assertAlmostEqual(mittag_leffler(0.3, -4.0) / 0.16650174431551665, 1.0, places=10)
        self.assertAlmostEqual(mittag_leffler(0.5, -10.0) / 0.05614099274382259, 1.0, places=10)

        for a in (0.05, 0.1, 0.15, 0.2, 0.25, 0.3):
            previous = 1.0
            for t in np.linspace(-0.1, -12.0, 25):
                value = mittag_leffler(a, t)
                self.assertGreater(value, 0.0, msg='alpha = %g, t = %g' % (a, t))
                self.assertLess(value, previous, msg='alpha = %g, t = %g' % (a, t))
                previous = value

    def test_log_beyond_overflow(self):
        for t in (1.0, 5.0, 20.0):
            self.assertAlmostEqual(log_mittag_leffler(0.5, t), math.log(ml_half(t)), places=10)

        # E_{1/2}(t) = 2 exp(t^2) up to a relative error below 1e-300 at t = 30
        self.assertAlmostEqual(log_mittag_leffler(0.5, 30.0), 900.0 + math.log(2.0), places=9)
        self.assertAlmostEqual(log_mittag_leffler(1.0, 1e4), 1e4, places=9)


class TestWeightedNorm(unittest.TestCase):

    def test_weights(self):
        w = mittag_leffler_weights(0.5, 2.0, 0.25, 4)
        self.assertEqual(w[0], 1.0)
        self.assertAlmostEqual(w[4], mittag_leffler(0.5, 2.0), places=12)
        self.assertFalse(w.flags.writeable)

    def test_norm_of_weight_is_one(self):
        grid = UniformGrid(0.125, 16)
        w = WeightParams(2.0, 0.5)
        x = GridFunction(grid, mittag_leffler_weights(0.5, 2.0, grid.h, grid.n))
        self.assertAlmostEqual(bielecki_norm(x, w), 1.0, places=14)

    def test_norm_bounded_by_sup_norm(self):
        grid = UniformGrid(0.1, 20)
        x = GridFunction.sinusoid(grid, 0.0, 1.0, 3.0)
        norm = bielecki_norm(x, WeightParams(1.0, 0.4))
        self.assertLessEqual(norm, np.max(np.abs(x.values)))
        self.assertGreater(norm, 0.0)

    def test_weighted_distance(self):
        x = np.ones(5)
        y = np.zeros(5)
        self.assertAlmostEqual(weighted_distance(x, y, 0.5, 2.0, 0.25), 1.0, places=14)

    def test_norm_is_homogeneous(self):
        grid = UniformGrid(0.1, 30)
        w = WeightParams(1.5, 0.6)
        x = GridFunction.sinusoid(grid, [0.5, -1.0], [1.0, 2.0], [3.0, 0.5])
        norm = bielecki_norm(x, w)
        for c in (-3.0, 0.5, 7.0):
            scaled = GridFunction(grid, c * x.values)
            self.assertAlmostEqual(bielecki_norm(scaled, w) / (abs(c) * norm), 1.0, places=13)

    def test_long_horizon(self):
        # E_{1/2}(2 t^{1/2}) exceeds the largest float before t = 200
        grid = UniformGrid(0.5, 400)
        w = WeightParams(2.0, 0.5)
        with self.assertRaises(MittagLefflerOverflowError):
            mittag_leffler(0.5, 2.0 * grid.horizon ** 0.5)

        ones = GridFunction.constant(grid, [1.0])
        self.assertEqual(bielecki_norm(ones, w), 1.0)

        late = np.zeros(grid.n + 1)
        late[-1] = 1.0
        self.assertLess(weighted_distance(late, np.zeros(grid.n + 1), 0.5, 2.0, grid.h), 1e-300)

    def test_volterra_identity_of_weight(self):
        # E_alpha(gamma t^alpha) = 1 + gamma int_0^t a(t,s) E_alpha(gamma s^alpha) ds
        alpha = 0.5
        gamma = 1.0
        residuals = []
        for n in (16, 32, 64):
            grid = UniformGrid(1.0 / n, n)
            e = mittag_leffler_weights(alpha, gamma, grid.h, grid.n)
            rhs = 1.0 + gamma * convolve(conv_weights(alpha, grid), e)
            residuals.append(float(np.max(np.abs(rhs - e) / e)))

        self.assertGreater(residuals[0] / residuals[1], 1.5)
        self.assertGreater(residuals[1] / residuals[2], 1.5)
        self.assertLess(residuals[-1], 1e-2)


if __name__ == '__main__':
    unittest.main()
