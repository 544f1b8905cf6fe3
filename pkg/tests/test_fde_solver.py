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
import os
import shutil
import tempfile
import unittest

import numpy as np
from numpy.testing import assert_allclose
from scipy.special import erfcx

from caputoflow.exceptions import ConvergenceError, DomainError, HorizonError
from caputoflow.fde_solver import (FdeSolver,
                                   PicardConfig,
                                   VectorField,
                                   continuity_bound,
                                   input_on_grid)
from caputoflow.history_space import GridFunction
from caputoflow.kernel_quadrature import Kernel, UniformGrid, tempered_mass
from caputoflow.special_functions import gamma_fn, mittag_leffler


def linear(lam):
    return VectorField(lambda x: lam * x, abs(lam), name='linear')


def logistic():
    return VectorField(lambda x: x * (1.0 - x), 1.0, name='logistic')


class TestVectorField(unittest.TestCase):

    def test_evaluation(self):
        g = VectorField(lambda t, x: -x + np.sin(t), 1.0, autonomous=False)
        x = np.array([[1.0], [2.0]])
        assert_allclose(g.evaluate(np.array([0.0, math.pi / 2]), x), [[-1.0], [-1.0]])
        assert_allclose(g(0.0, 3.0), [-3.0])

    def test_invalid_lipschitz(self):
        with self.assertRaises(DomainError):
            VectorField(lambda x: x, 0.0)

    def test_spot_check(self):
        points = np.linspace(-2.0, 2.0, 20)[:, None]
        self.assertEqual(linear(-1.0).spot_check(points), [])

        understated = VectorField(lambda x: 3.0 * x, 1.0, name='steep')
        with self.assertLogs(level='WARNING') as logs:
            violations = understated.spot_check(points)
        self.assertGreater(len(violations), 0)
        self.assertAlmostEqual(violations[0][2], 3.0, places=9)
        self.assertIn('steep', logs.output[0])

    def test_picard_config(self):
        self.assertEqual(PicardConfig().resolve_gamma(1.5), 3.0)
        with self.assertRaises(DomainError):
            PicardConfig(gamma=1.0).resolve_gamma(1.0)


class TestSolvers(unittest.TestCase):

    def setUp(self):
        self.grid = UniformGrid.from_horizon(1.0 / 64, 1.0)
        self.dir_tmp = tempfile.mkdtemp(prefix='caputoflow_tmp_')

    def tearDown(self):
        shutil.rmtree(self.dir_tmp)

    def test_zero_field(self):
        f = GridFunction.sinusoid(self.grid, 1.0, 0.5, 3.0)
        zero = VectorField(lambda x: np.zeros_like(x), 1.0)
        solver = FdeSolver(0.5)

        traj = solver.solve_picard(zero, f, self.grid)
        self.assertEqual(traj.iterations, 1)
        assert_allclose(traj.values, f.values, rtol=0, atol=0)

        traj = solver.solve_pece(zero, f, self.grid)
        assert_allclose(traj.values, f.values, rtol=0, atol=0)

    def test_initial_value(self):
        f = GridFunction.constant(self.grid, [0.3, -0.2])
        for method in ('picard', 'pece'):
            traj = FdeSolver(0.7).solve(linear(-1.0), f, self.grid, method=method)
            assert_allclose(traj.values[0], [0.3, -0.2], rtol=0, atol=0)

    def test_mittag_leffler_solution(self):
        grid = UniformGrid.from_horizon(1.0 / 256, 1.0)
        f = GridFunction.constant(grid, 1.0)
        traj = FdeSolver(0.5).solve_picard(linear(-1.0), f, grid)
        self.assertAlmostEqual(traj.values[-1, 0], 0.4275836, delta=1e-4)

    def test_linear_order(self):
        T = 2.0
        steps = (1.0 / 64, 1.0 / 128, 1.0 / 256)
        cfg = PicardConfig(tolerance=1e-13)
        for lam in (1.0, -1.0):
            for a in (0.3, 0.5, 0.8):
                exact = mittag_leffler(a, lam * T ** a)
                errors = []
                for h in steps:
                    grid = UniformGrid.from_horizon(h, T)
                    traj = FdeSolver(a).solve_picard(linear(lam), GridFunction.constant(grid, 1.0), grid, cfg)
                    errors.append(abs(traj.values[-1, 0] - exact))

                self.assertLess(errors[-1], 1e-3)
                order = math.log2(errors[1] / errors[2])
                self.assertGreater(order, 1.0 + a - 0.2, msg='lam=%g alpha=%g' % (lam, a))
                self.assertLess(order, 2.2, msg='lam=%g alpha=%g' % (lam, a))

    def test_contraction(self):
        f = GridFunction.constant(self.grid, 0.5)
        for field in (linear(1.0), linear(-1.0), logistic()):
            traj = FdeSolver(0.5).solve_picard(field, f, self.grid)
            self.assertEqual(traj.gamma, 2.0)
            self.assertEqual(traj.contraction_violations, 0)
            self.assertTrue(traj.ratios)
            self.assertLessEqual(max(traj.ratios), 0.55)

    def test_picard_agrees_with_iterated_corrector(self):
        f = GridFunction.constant(self.grid, 0.5)
        solver = FdeSolver(0.6)
        for field in (linear(1.0), linear(-1.0), logistic()):
            picard = solver.solve_picard(field, f, self.grid, PicardConfig(tolerance=1e-13))
            iterated = solver.solve_pece(field, f, self.grid, corrector_iterations=50, corrector_tol=1e-15)
            pece = solver.solve_pece(field, f, self.grid)

            self.assertEqual(iterated.solver, 'pec50e')
            self.assertLessEqual(np.max(np.abs(picard.values - iterated.values)), 1e-8)
            self.assertLessEqual(np.max(np.abs(picard.values - pece.values)), 1e-3)

    def test_uniqueness_from_different_seeds(self):
        f = GridFunction.sinusoid(self.grid, 0.5, 0.2, 4.0)
        solver = FdeSolver(0.4)
        cfg = PicardConfig(tolerance=1e-12)
        from_input = solver.solve_picard(logistic(), f, self.grid, cfg)
        from_zero = solver.solve_picard(logistic(), f, self.grid, cfg, initial=np.zeros((self.grid.n + 1, 1)))
        # each run stops within the tolerance of the fixed point; |x| < 1 here
        self.assertLessEqual(np.max(np.abs(from_input.values - from_zero.values)), 2 * cfg.tolerance)

    def test_long_horizon_picard(self):
        # E_{1/2}(2 t^{1/2}) overflows before t = 200
        grid = UniformGrid.from_horizon(0.5, 200.0)
        f = GridFunction.constant(grid, 1.0)
        solver = FdeSolver(0.5)
        picard = solver.solve_picard(linear(-1.0), f, grid, PicardConfig(tolerance=1e-12))
        iterated = solver.solve_pece(linear(-1.0), f, grid, corrector_iterations=50, corrector_tol=1e-14)

        self.assertTrue(np.all(np.isfinite(picard.values)))
        self.assertEqual(picard.contraction_violations, 0)
        self.assertLessEqual(np.max(np.abs(picard.values - iterated.values)), 1e-8)
        self.assertLess(abs(picard.values[-1, 0] / erfcx(200.0 ** 0.5) - 1.0), 0.05)

    def test_windows_reach_the_same_solution(self):
        f = GridFunction.sinusoid(self.grid, 0.5, 0.2, 4.0)
        solver = FdeSolver(0.6)
        single = solver.solve_picard(logistic(), f, self.grid, PicardConfig(tolerance=1e-13))
        windowed = solver.solve_picard(logistic(), f, self.grid, PicardConfig(tolerance=1e-13, max_weight=2.0))
        assert_allclose(windowed.values, single.values, rtol=0, atol=1e-11)

        with self.assertRaises(DomainError):
            solver.solve_picard(logistic(), f, self.grid, PicardConfig(max_weight=1.0))

    def test_near_integer_order(self):
        # E_alpha(t) tends to exp(t) as alpha -> 1
        grid = UniformGrid.from_horizon(1.0 / 256, 1.0)
        traj = FdeSolver(0.999).solve_pece(linear(1.0), GridFunction.constant(grid, 1.0), grid)
        self.assertLess(abs(traj.values[-1, 0] / math.e - 1.0), 0.02)

    def test_nonautonomous_exactness(self):
        # x(t) = int_0^t a(t, s) s ds is integrated exactly
        ramp = VectorField(lambda t, x: np.broadcast_to(t, x.shape), 1.0, autonomous=False)
        f = GridFunction.constant(self.grid, 0.0)
        a = 0.35
        traj = FdeSolver(a).solve_picard(ramp, f, self.grid)
        assert_allclose(traj.values[:, 0], self.grid.nodes ** (a + 1) / gamma_fn(a + 2), rtol=1e-12, atol=1e-15)

    def test_tempered_constant_forcing(self):
        grid = UniformGrid.from_horizon(1.0 / 128, 1.0)
        forcing = VectorField(lambda x: np.ones_like(x), 1.0)
        f = GridFunction.constant(grid, 0.0)
        traj = FdeSolver(0.5, beta=1.5).solve_pece(forcing, f, grid)
        self.assertEqual(traj.beta, 1.5)
        self.assertAlmostEqual(traj.values[-1, 0], tempered_mass(Kernel(0.5, 1.5), 1.0), delta=1e-3)
        untempered = FdeSolver(0.5).solve_pece(forcing, f, grid)
        self.assertLess(traj.values[-1, 0], untempered.values[-1, 0])

    def test_max_iterations(self):
        f = GridFunction.constant(self.grid, 1.0)
        with self.assertRaises(ConvergenceError):
            FdeSolver(0.5).solve_picard(linear(1.0), f, self.grid, PicardConfig(max_iter=2))

    def test_unknown_method(self):
        f = GridFunction.constant(self.grid, 1.0)
        with self.assertRaises(DomainError):
            FdeSolver(0.5).solve(linear(1.0), f, self.grid, method='euler')
        with self.assertRaises(DomainError):
            FdeSolver(0.5).solve_pece(linear(1.0), f, self.grid, corrector_iterations=0)

    def test_input_on_grid(self):
        fine = UniformGrid.from_horizon(1.0 / 64, 2.0)
        f = GridFunction.sample(lambda t: 2.0 * t, fine)
        coarse = UniformGrid.from_horizon(0.1, 1.0)
        assert_allclose(input_on_grid(f, coarse)[:, 0], 2.0 * coarse.nodes, atol=1e-12)
        with self.assertRaises(HorizonError):
            input_on_grid(f, UniformGrid.from_horizon(0.5, 3.0))

    def test_trajectory_output(self):
        f = GridFunction.constant(self.grid, 1.0)
        traj = FdeSolver(0.5).solve_picard(linear(-1.0), f, self.grid)

        csv_file = os.path.join(self.dir_tmp, 'trajectory.csv')
        traj.write_csv(csv_file)
        table = np.loadtxt(csv_file, delimiter=',', skiprows=1)
        assert_allclose(table[:, 1], traj.values[:, 0], rtol=0, atol=0)

        json_file = os.path.join(self.dir_tmp, 'trajectory.json')
        traj.write_json(json_file)
        with open(json_file) as fin:
            meta = json.load(fin)
        self.assertEqual(meta['solver'], 'picard')
        self.assertEqual(meta['iterations'], traj.iterations)
        self.assertEqual(meta['n'], self.grid.n)
        self.assertLessEqual(meta['residual'], 1e-10)


class TestContinuity(unittest.TestCase):

    def test_bound_value(self):
        grid = UniformGrid.from_horizon(0.125, 1.0)
        f = GridFunction.constant(grid, 1.1)
        h = GridFunction.constant(grid, 1.0)
        self.assertAlmostEqual(continuity_bound(f, h, 1.0, 0.5, 1.0), 0.500898008076228, places=8)
        self.assertAlmostEqual(continuity_bound(f, h, 1.0, 1.0, 1.0), 0.1 * math.e, places=8)

    def test_identical_inputs(self):
        grid = UniformGrid.from_horizon(1.0 / 32, 1.0)
        f = GridFunction.sinusoid(grid, 0.5, 0.1, 2.0)
        report = FdeSolver(0.5).verify_continuity(logistic(), f, f, grid)
        self.assertEqual(report.defect, 0.0)
        self.assertTrue(report.passed)

    def test_randomized_certificate(self):
        rng = np.random.default_rng(2024)
        grid = UniformGrid.from_horizon(1.0 / 32, 1.0)
        fields = (linear(-1.0), VectorField(np.sin, 1.0, name='sin'), logistic())
        for field in fields:
            for _ in range(50):
                a = rng.uniform(0.2, 0.9)
                f = GridFunction.sinusoid(grid, 0.5, rng.uniform(0.0, 0.2), rng.uniform(0.5, 6.0), rng.uniform(0, 6.3))
                dh = GridFunction.sinusoid(grid, rng.uniform(-0.1, 0.1), rng.uniform(0.01, 0.2),
                                           rng.uniform(0.5, 6.0), rng.uniform(0, 6.3))
                report = FdeSolver(a).verify_continuity(field, f, f + dh, grid, slack=1e-6)
                self.assertTrue(report.passed, msg='%s alpha=%g: %s' % (field.name, a, report.to_dict()))


if __name__ == '__main__':
    unittest.main()
