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

'''Exceptions raised by caputoflow.'''


class CaputoFlowError(Exception):
    """Base class of all errors raised by the package."""
    pass


class DomainError(CaputoFlowError, ValueError):
    """Argument outside the domain of an operation."""
    pass


class MittagLefflerOverflowError(CaputoFlowError, OverflowError):
    """Result exceeds the largest representable magnitude."""
    pass


class AccuracyLossError(CaputoFlowError):
    """Requested accuracy could not be certified."""
    pass


class GridMismatchError(CaputoFlowError, ValueError):
    """Grid functions or samples live on incompatible grids."""
    pass


class GridAlignmentError(CaputoFlowError, ValueError):
    """Time shift is not an integer multiple of the grid step."""
    pass


class HorizonError(CaputoFlowError, ValueError):
    """Operation needs more horizon than the data carries."""
    pass


class ConvergenceError(CaputoFlowError):
    """Iterative solver failed to reach its tolerance."""
    pass


class ConfigError(CaputoFlowError, ValueError):
    """Run configuration is malformed or violates an invariant."""
    pass
