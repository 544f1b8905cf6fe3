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
import os

from biolib.common import make_sure_path_exists
from biolib.misc.time_keeper import TimeKeeper

from caputoflow.common import refinement_rates
from caputoflow.config import PresetSection, read_config
from caputoflow.exceptions import (AccuracyLossError,
                                   ConfigError,
                                   ConvergenceError,
                                   DomainError,
                                   GridAlignmentError,
                                   GridMismatchError,
                                   HorizonError)
from caputoflow.fde_solver import FdeSolver, PicardConfig
from caputoflow.history_space import MetricParams
from caputoflow.kernel_quadrature import UniformGrid
from caputoflow.presets import make_field, make_input
from caputoflow.semigroup import SemigroupEngine
from caputoflow.skew_product import SkewProductEngine, SkewState, TimedField
from caputoflow.special_functions import mittag_leffler

EXIT_SUCCESS = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VIOLATION = 4


class OptionsParser(object):
    def __init__(self):
        """Initialization"""
        self.logger = logging.getLogger()
        self.time_keeper = TimeKeeper()

    def _read_config(self, options):
        """Run configuration with command-line overrides applied."""

        if not options.config or not os.path.isfile(options.config):
            raise ConfigError('Configuration file does not exist: %s' % options.config)

        cfg = read_config(options.config)
        if getattr(options, 'h', None) is not None:
            cfg = cfg.with_step(options.h)

        self.logger.info('Read configuration: alpha = %g, field = %s, input = %s, h = %g, horizon = %g.'
                         % (cfg.alpha, cfg.field.name, cfg.input.name, cfg.grid.h, cfg.grid.horizon))

        return cfg

    def _problem(self, cfg):
        grid = UniformGrid.from_horizon(cfg.grid.h, cfg.grid.horizon)
        field = make_field(cfg.field.name, cfg.field.params)
        f = make_input(cfg.input.name, cfg.input.params, grid)

        return grid, field, f

    def _picard(self, cfg):
        return PicardConfig(gamma=cfg.solver.gamma,
                            tolerance=cfg.solver.tolerance,
                            max_iter=cfg.solver.max_iter)

    def _engine_options(self, cfg):
        options = {'metric': MetricParams(cfg.check.n_max),
                   'beta': cfg.beta,
                   'method': cfg.solver.method,
                   'picard': self._picard(cfg),
                   'corrector_iterations': cfg.solver.corrector_iterations,
                   'corrector_tol': cfg.solver.corrector_tol,
                   'quadrature': cfg.solver.quadrature}

        return options

    def _write_json(self, d, output_file):
        with open(output_file, 'w') as fout:
            json.dump(d, fout, indent=2, sort_keys=True)
            fout.write('\n')

    def solve(self, options):
        """Solve the integral equation for the configured field and input."""

        cfg = self._read_config(options)
        grid, field, f = self._problem(cfg)

        solver = FdeSolver(cfg.alpha, cfg.beta)
        traj = solver.solve(field, f, grid,
                            method=cfg.solver.method,
                            cfg=self._picard(cfg),
                            corrector_iterations=cfg.solver.corrector_iterations,
                            corrector_tol=cfg.solver.corrector_tol)

        make_sure_path_exists(options.out)
        traj.write_csv(os.path.join(options.out, 'trajectory.csv'))
        traj.write_json(os.path.join(options.out, 'trajectory.json'))

        self.logger.info('Trajectory written to: %s' % os.path.join(options.out, 'trajectory.csv'))

        return EXIT_SUCCESS

    def _run_check(self, identity, cfg):
        """DefectReport of one identity on the grid of cfg."""

        grid, field, f = self._problem(cfg)
        check = cfg.check

        if identity == 'continuity':
            perturbation = check.perturbation or PresetSection('constant', {'x0': [0.1] * f.dimension})
            h = f + make_input(perturbation.name, perturbation.params, grid)
            solver = FdeSolver(cfg.alpha, cfg.beta)
            return solver.verify_continuity(field, f, h, grid, check.slack, cfg.solver.method, self._picard(cfg))

        if identity == 'cocycle':
            engine = SkewProductEngine(cfg.alpha, cfg.grid.h, **self._engine_options(cfg))
            return engine.cocycle_defect(check.sigma, check.tau, SkewState(f, TimedField(field)),
                                         tolerance=check.tolerance)

        engine = SemigroupEngine(field, cfg.alpha, cfg.grid.h, **self._engine_options(cfg))
        if identity == 'semigroup':
            return engine.semigroup_defect(check.sigma, check.tau, f, tolerance=check.tolerance)
        elif identity == 'shift':
            return engine.shift_identity_residual(check.tau, f, tolerance=check.tolerance)
        elif identity == 'steady':
            if check.x_star is None:
                raise ConfigError("The steady check requires 'check.x_star'.")
            return engine.steady_state_residual(check.x_star, check.tau, tolerance=check.tolerance)

        raise ConfigError('Unknown identity: %s' % identity)

    def check(self, options):
        """Verify an identity, optionally over a sequence of halved grid steps."""

        cfg = self._read_config(options)
        if options.refine < 1:
            raise ConfigError('--refine must be at least 1.')

        steps = [cfg.grid.h / 2 ** k for k in range(options.refine)]
        reports = []
        for h in steps:
            self.logger.info('Checking %s identity with h = %g.' % (options.identity, h))
            reports.append(self._run_check(options.identity, cfg.with_step(h)))
            self.time_keeper.print_time_stamp()

        final = reports[-1]
        summary = final.to_dict()
        if len(reports) > 1:
            defects = [r.defect for r in reports]
            summary['refinement'] = {'h': steps,
                                     'defects': defects,
                                     'rates': refinement_rates(defects)}

        make_sure_path_exists(options.out)
        self._write_json(summary, os.path.join(options.out, 'report.json'))

        if not final.passed:
            self.logger.warning('Identity %s violated: defect %.6g exceeds tolerance %.6g.'
                                % (options.identity, final.defect, final.tolerance))
            return EXIT_VIOLATION

        return EXIT_SUCCESS

    def ml(self, options):
        """Print E_alpha(t)."""

        value = mittag_leffler(options.alpha, options.t)
        print('%.12g' % value)

        return EXIT_SUCCESS

    def omega(self, options):
        """Trailing-window statistics of the orbit from the configured initial state."""

        cfg = self._read_config(options)
        grid, field, f = self._problem(cfg)

        engine = SemigroupEngine(field, cfg.alpha, cfg.grid.h, **self._engine_options(cfg))
        report = engine.omega_probe(f.values[0], cfg.grid.horizon, cfg.check.window, tolerance=cfg.check.tolerance)

        make_sure_path_exists(options.out)
        self._write_json(report.to_dict(), os.path.join(options.out, 'report.json'))

        return EXIT_SUCCESS

    def parse_options(self, options):
        """Parse user options and call the correct pipeline(s)"""

        try:
            if options.subparser_name == 'solve':
                return self.solve(options)
            elif options.subparser_name == 'check':
                return self.check(options)
            elif options.subparser_name == 'ml':
                return self.ml(options)
            elif options.subparser_name == 'omega':
                return self.omega(options)
        except (ConfigError, DomainError, GridAlignmentError, GridMismatchError, HorizonError) as e:
            self.logger.error(str(e))
            return EXIT_CONFIG
        except (ConvergenceError, AccuracyLossError, OverflowError) as e:
            self.logger.error(str(e))
            return EXIT_SOLVER

        self.logger.error('Unknown caputoflow command: %s' % options.subparser_name)
        return EXIT_CONFIG
