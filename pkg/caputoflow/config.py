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
import numbers
from dataclasses import asdict, dataclass, field as dc_field, fields, replace
from typing import Optional

from caputoflow.common import aligned_steps
from caputoflow.exceptions import ConfigError, DomainError, GridAlignmentError
from caputoflow.presets import FIELD_PRESETS, INPUT_PRESETS, preset_params
from caputoflow.special_functions import FractionalOrder

IDENTITIES = ('semigroup', 'shift', 'cocycle', 'continuity', 'steady')


@dataclass
class GridSection:
    h: float = 1.0 / 64
    horizon: float = 2.0


@dataclass
class PresetSection:
    name: str
    params: dict = dc_field(default_factory=dict)


@dataclass
class SolverSection:
    method: str = 'picard'
    gamma: Optional[float] = None
    tolerance: float = 1e-10
    max_iter: int = 200
    corrector_iterations: int = 1
    corrector_tol: Optional[float] = None
    quadrature: str = 'product'


@dataclass
class CheckSection:
    tau: float = 0.0
    sigma: float = 0.0
    n_max: int = 8
    x_star: Optional[list] = None
    window: float = 1.0
    perturbation: Optional[PresetSection] = None
    tolerance: Optional[float] = None
    slack: float = 1e-6


@dataclass
class RunConfig:
    """Complete description of a run, read from a JSON document."""

    alpha: float
    field: PresetSection
    input: PresetSection
    beta: float = 0.0
    grid: GridSection = dc_field(default_factory=GridSection)
    solver: SolverSection = dc_field(default_factory=SolverSection)
    check: CheckSection = dc_field(default_factory=CheckSection)

    @classmethod
    def from_dict(cls, d):
        """Parse and validate a configuration, filling in defaults."""

        d = _section_dict(d, 'config')
        _reject_unknown(d, cls, 'config')
        for key in ('alpha', 'field', 'input'):
            if key not in d:
                raise ConfigError("Missing required key '%s'." % key)

        check = dict(_section_dict(d.get('check', {}), 'check'))
        if check.get('perturbation') is not None:
            check['perturbation'] = _preset(check['perturbation'], INPUT_PRESETS, 'input', 'check.perturbation')

        cfg = cls(alpha=d['alpha'],
                  beta=d.get('beta', 0.0),
                  field=_preset(d['field'], FIELD_PRESETS, 'field', 'field'),
                  input=_preset(d['input'], INPUT_PRESETS, 'input', 'input'),
                  grid=_build(GridSection, d.get('grid', {}), 'grid'),
                  solver=_build(SolverSection, d.get('solver', {}), 'solver'),
                  check=_build(CheckSection, check, 'check'))
        cfg.validate()

        return cfg

    def to_dict(self):
        return asdict(self)

    def validate(self):
        """Raise ConfigError naming the first violated invariant."""

        _check_types(self)

        try:
            FractionalOrder(self.alpha)
        except DomainError:
            raise ConfigError('alpha must lie in the open interval (0, 1), got %r.' % (self.alpha,))

        if not self.beta >= 0:
            raise ConfigError('beta must be nonnegative, got %r.' % (self.beta,))
        if not self.grid.h > 0:
            raise ConfigError('grid.h must be positive, got %r.' % (self.grid.h,))
        if self.solver.method not in ('picard', 'pece'):
            raise ConfigError("solver.method must be 'picard' or 'pece', got %r." % (self.solver.method,))
        if self.solver.quadrature not in ('product', 'trapezoid'):
            raise ConfigError("solver.quadrature must be 'product' or 'trapezoid', got %r." % (self.solver.quadrature,))
        if self.solver.corrector_iterations < 1:
            raise ConfigError('solver.corrector_iterations must be at least 1.')
        if self.solver.max_iter < 1:
            raise ConfigError('solver.max_iter must be at least 1.')
        if int(self.check.n_max) != self.check.n_max or self.check.n_max < 1:
            raise ConfigError('check.n_max must be an integer >= 1, got %r.' % (self.check.n_max,))

        for name, value in (('grid.horizon', self.grid.horizon),
                            ('check.tau', self.check.tau),
                            ('check.sigma', self.check.sigma)):
            try:
                aligned_steps(value, self.grid.h)
            except GridAlignmentError:
                raise ConfigError('grid.h = %g must divide %s = %g.' % (self.grid.h, name, value))

        if not aligned_steps(self.grid.horizon, self.grid.h) >= 1:
            raise ConfigError('grid.horizon must be positive.')

    def with_step(self, h):
        """Copy of the configuration on a grid with step h."""

        cfg = replace(self, grid=replace(self.grid, h=float(h)))
        cfg.validate()

        return cfg


def _section_dict(d, name):
    if not isinstance(d, dict):
        raise ConfigError("Section '%s' must be an object." % name)
    return d


def _reject_unknown(d, cls, name):
    unknown = sorted(set(d) - {f.name for f in fields(cls)})
    if unknown:
        raise ConfigError("Unknown key(s) in '%s': %s." % (name, ', '.join(unknown)))


def _is_number(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def _check_types(cfg):
    """Reject values of the wrong JSON type before any arithmetic on them."""

    numeric = (('alpha', cfg.alpha, False),
               ('beta', cfg.beta, False),
               ('grid.h', cfg.grid.h, False),
               ('grid.horizon', cfg.grid.horizon, False),
               ('solver.gamma', cfg.solver.gamma, True),
               ('solver.tolerance', cfg.solver.tolerance, False),
               ('solver.corrector_tol', cfg.solver.corrector_tol, True),
               ('check.tau', cfg.check.tau, False),
               ('check.sigma', cfg.check.sigma, False),
               ('check.window', cfg.check.window, False),
               ('check.tolerance', cfg.check.tolerance, True),
               ('check.slack', cfg.check.slack, False))
    for name, value, optional in numeric:
        if value is None and optional:
            continue
        if not _is_number(value):
            raise ConfigError('%s must be a number, got %r.' % (name, value))

    for name, value in (('solver.max_iter', cfg.solver.max_iter),
                        ('solver.corrector_iterations', cfg.solver.corrector_iterations),
                        ('check.n_max', cfg.check.n_max)):
        if not _is_number(value) or int(value) != value:
            raise ConfigError('%s must be an integer, got %r.' % (name, value))

    for name, value in (('solver.method', cfg.solver.method), ('solver.quadrature', cfg.solver.quadrature)):
        if not isinstance(value, str):
            raise ConfigError('%s must be a string, got %r.' % (name, value))

    x_star = cfg.check.x_star
    if x_star is not None:
        if _is_number(x_star):
            x_star = [x_star]
        if not isinstance(x_star, list) or not all(_is_number(v) for v in x_star):
            raise ConfigError('check.x_star must be a list of numbers, got %r.' % (cfg.check.x_star,))


def _build(cls, d, name):
    d = _section_dict(d, name)
    _reject_unknown(d, cls, name)

    return cls(**d)


def _preset(d, presets, kind, name):
    if 'name' not in _section_dict(d, name):
        raise ConfigError("Section '%s' requires a preset name." % name)
    section = _build(PresetSection, d, name)

    return PresetSection(section.name, preset_params(presets, kind, section.name, section.params))


def read_config(config_file):
    """Read and validate a JSON run configuration."""

    try:
        with open(config_file) as f:
            d = json.load(f)
    except ValueError as e:
        raise ConfigError('Invalid JSON in %s: %s' % (config_file, e))

    return RunConfig.from_dict(d)


def write_config(cfg, output_file):
    with open(output_file, 'w') as fout:
        json.dump(cfg.to_dict(), fout, indent=2, sort_keys=True)
        fout.write('\n')
