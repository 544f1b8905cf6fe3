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
from dataclasses import dataclass, field

from caputoflow.exceptions import GridAlignmentError


def aligned_steps(tau, h):
    """Number of grid steps spanned by a time shift.

    Parameters
    ----------
    tau : float
        Time shift, must be a nonnegative integer multiple of h.
    h : float
        Grid step.

    Returns
    -------
    int
        Integer m with tau = m*h.
    """

    if tau < 0:
        raise GridAlignmentError('Time shift must be nonnegative: %g' % tau)

    m = int(round(tau / h))
    if abs(tau - m * h) > 1e-9 * max(1.0, abs(tau)):
        raise GridAlignmentError('Time shift %g is not a multiple of the grid step %g.' % (tau, h))

    return m


def refinement_rates(defects):
    """Observed convergence orders log2(d_k / d_{k+1}) of a halving study.

    Parameters
    ----------
    defects : list of float
        Defects measured at steps h, h/2, h/4, ...

    Returns
    -------
    list
        One rate per consecutive pair; None when a defect is zero.
    """

    rates = []
    for coarse, fine in zip(defects[:-1], defects[1:]):
        if coarse > 0 and fine > 0:
            rates.append(math.log2(coarse / fine))
        else:
            rates.append(None)

    return rates


def format_float(x):
    """Fixed 17 significant digit representation used in CSV output."""
    return '%.17g' % x


def write_table(output_file, header, rows):
    """Write rows of numbers as a comma-separated table.

    Parameters
    ----------
    output_file : str
        Desired output file.
    header : list of str
        Column names.
    rows : iterable
        Rows of floats.
    """

    fout = open(output_file, 'w')
    fout.write(','.join(header) + '\n')
    for row in rows:
        fout.write(','.join(format_float(v) for v in row) + '\n')
    fout.close()


@dataclass
class DefectReport:
    """Measured violation of an identity that holds exactly in the continuum."""

    identity: str
    defect: float
    tolerance: float
    h: float
    alpha: float
    horizon_consumed: float = 0.0
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.defect < 0:
            raise ValueError('Defect must be nonnegative: %g' % self.defect)

    @property
    def passed(self):
        return self.defect <= self.tolerance

    def to_dict(self):
        return {'identity': self.identity,
                'defect': self.defect,
                'tolerance': self.tolerance,
                'h': self.h,
                'alpha': self.alpha,
                'horizon_consumed': self.horizon_consumed,
                'pass': self.passed,
                'details': self.details}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)
