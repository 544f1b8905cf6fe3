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

'''Named fields and inputs available to run configurations.'''

import numpy as np

from caputoflow.exceptions import ConfigError
from caputoflow.fde_solver import VectorField
from caputoflow.history_space import GridFunction

# default parameters of each field preset
FIELD_PRESETS = {'zero': {'lipschitz': 1.0},
                 'constant': {'c': 1.0, 'lipschitz': 1.0},
                 'linear': {'lam': -1.0},
                 'logistic': {'lipschitz': 1.0},
                 'linear_forced': {'amplitude': 1.0, 'omega': 1.0}}

# default parameters of each input preset
INPUT_PRESETS = {'constant': {'x0': [1.0]},
                 'polynomial': {'coeffs': [[1.0]]},
                 'sinusoid': {'offset': [0.0], 'amplitude': [1.0], 'omega': [1.0], 'phase': [0.0]}}


def preset_params(presets, kind, name, params=None):
    """Parameters of a preset with defaults filled in.

    Parameters
    ----------
    presets : dict
        FIELD_PRESETS or INPUT_PRESETS.
    kind : str
        'field' or 'input', used in error messages.
    name : str
        Preset name.
    params : dict
        User supplied parameters.

    Returns
    -------
    dict
        Complete parameter set.
    """

    if name not in presets:
        raise ConfigError("Unknown %s preset '%s'; expected one of: %s."
                          % (kind, name, ', '.join(sorted(presets))))

    params = dict(params or {})
    unknown = sorted(set(params) - set(presets[name]))
    if unknown:
        raise ConfigError("Unknown parameter(s) for %s preset '%s': %s."
                          % (kind, name, ', '.join(unknown)))

    merged = dict(presets[name])
    merged.update(params)

    return merged


def make_field(name, params=None):
    """VectorField for a named preset."""

    p = preset_params(FIELD_PRESETS, 'field', name, params)

    try:
        return _field(name, p)
    except (TypeError, ValueError) as e:
        raise ConfigError("Invalid parameters for field preset '%s': %s" % (name, e))


def _field(name, p):
    if name == 'zero':
        return VectorField(lambda x: np.zeros_like(x), p['lipschitz'], name='zero')
    elif name == 'constant':
        c = float(p['c'])
        return VectorField(lambda x: np.full_like(x, c), p['lipschitz'], name='constant(%g)' % c)
    elif name == 'linear':
        lam = float(p['lam'])
        return VectorField(lambda x: lam * x, abs(lam) if lam != 0 else 1.0, name='linear(%g)' % lam)
    elif name == 'logistic':
        # Lipschitz on [0, 1] only
        return VectorField(lambda x: x * (1.0 - x), p['lipschitz'], name='logistic')

    amplitude = float(p['amplitude'])
    omega = float(p['omega'])

    return VectorField(lambda t, x: -x + amplitude * np.sin(omega * t), 1.0,
                       autonomous=False,
                       name='linear_forced(%g, %g)' % (amplitude, omega))


def make_input(name, params, grid):
    """GridFunction for a named preset sampled on grid."""

    p = preset_params(INPUT_PRESETS, 'input', name, params)

    try:
        if name == 'constant':
            return GridFunction.constant(grid, p['x0'])
        elif name == 'polynomial':
            return GridFunction.polynomial(grid, p['coeffs'])

        return GridFunction.sinusoid(grid, p['offset'], p['amplitude'], p['omega'], p['phase'])
    except (TypeError, ValueError) as e:
        raise ConfigError("Invalid parameters for input preset '%s': %s" % (name, e))
