__author__ = 'caputoflow developers'
__author_email__ = 'caputoflow@users.noreply.github.com'
__description__ = 'Semi-dynamical systems generated by Caputo fractional differential equations.'
__license__ = 'GPL3'
__status__ = 'Development'
__title__ = 'caputoflow'
__version__ = '0.1.0'
