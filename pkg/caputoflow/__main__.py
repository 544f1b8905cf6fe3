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

import argparse
import logging
import ntpath
import os
import sys

from biolib.common import make_sure_path_exists
from biolib.misc.custom_help_formatter import CustomHelpFormatter

from caputoflow import __version__
from caputoflow.config import IDENTITIES
from caputoflow.main import OptionsParser


def print_help():
    """Help menu."""

    print('')
    print('                ...::: caputoflow v' + __version__ + ' :::...''')
    print('''\

  Solvers:
    solve  -> Solve the fractional integral equation for a configured field and input
    ml     -> Evaluate the Mittag-Leffler function E_alpha(t)

  Semi-dynamical system checks:
    check  -> Measure the defect of an identity (semigroup, shift, cocycle, continuity, steady)
    omega  -> Summarize the long-time behaviour of an orbit from a constant history

  Use: caputoflow <command> -h for command specific help.
    ''')


def logger_setup(log_file, silent):
    """Set logging for application.

    Parameters
    ----------
    log_file : str
        Name of log file.
    silent : boolean
        Flag indicating if output to stdout should be suppressed.
    """

    # setup general properties of logger
    logger = logging.getLogger('')
    logger.setLevel(logging.INFO)
    log_format = logging.Formatter(fmt="[%(asctime)s] %(levelname)s: %(message)s",
                                   datefmt="%Y-%m-%d %H:%M:%S")

    # setup logging to console
    if not silent:
        stream_logger = logging.StreamHandler(sys.stdout)
        stream_logger.setFormatter(log_format)
        stream_logger.setLevel(logging.INFO)
        logger.addHandler(stream_logger)

    if log_file:
        file_logger = logging.FileHandler(log_file, 'a')
        file_logger.setFormatter(log_format)
        logger.addHandler(file_logger)

    logger.info('caputoflow v%s' % __version__)
    logger.info(ntpath.basename(sys.argv[0]) + ' ' + ' '.join(sys.argv[1:]))


def add_run_arguments(parser):
    """Options shared by the commands driven by a run configuration."""

    parser.add_argument('--config', help='JSON run configuration', required=True)
    parser.add_argument('--out', help='desired output directory for generated files', default='.')
    parser.add_argument('--h', help='grid step overriding the configuration', type=float, default=None)
    parser.add_argument('--silent', help='suppress console output', action='store_true')


def main(args=None):
    # initialize the options parser
    parser = argparse.ArgumentParser(add_help=False)
    subparsers = parser.add_subparsers(help="--", dest='subparser_name')

    solve_parser = subparsers.add_parser('solve',
                                         formatter_class=CustomHelpFormatter,
                                         description='Solve the fractional integral equation and write the trajectory.')
    add_run_arguments(solve_parser)

    check_parser = subparsers.add_parser('check',
                                         formatter_class=CustomHelpFormatter,
                                         description='Measure the defect of an identity of the semi-dynamical system.')
    check_parser.add_argument('identity', help='identity to verify', choices=IDENTITIES)
    add_run_arguments(check_parser)
    check_parser.add_argument('--refine',
                              help='run with steps h, h/2, ..., h/2^(K-1) and report observed rates',
                              type=int, default=1)

    ml_parser = subparsers.add_parser('ml',
                                      formatter_class=CustomHelpFormatter,
                                      description='Evaluate the Mittag-Leffler function E_alpha(t).')
    ml_parser.add_argument('alpha', help='order in (0, 1]', type=float)
    ml_parser.add_argument('t', help='argument', type=float)

    omega_parser = subparsers.add_parser('omega',
                                         formatter_class=CustomHelpFormatter,
                                         description='Summarize the trailing window of an orbit from a constant history.')
    add_run_arguments(omega_parser)

    # get and check options
    if args is None:
        args = sys.argv[1:]

    if len(args) == 0 or args[0] in {'-h', '--help'}:
        print_help()
        sys.exit(0)
    else:
        args = parser.parse_args(args)

    if args.subparser_name == 'ml':
        logger_setup(None, True)
    else:
        make_sure_path_exists(args.out)
        logger_setup(os.path.join(args.out, 'caputoflow.log'), args.silent)

    # do what we came here to do
    try:
        parser = OptionsParser()
        exit_code = parser.parse_options(args)
    except SystemExit:
        print("\n  Controlled exit resulting from an unrecoverable error or warning.")
        sys.exit(1)
    except:
        print("\nUnexpected error:", sys.exc_info()[0])
        raise

    sys.exit(exit_code)


if __name__ == "__main__":
    main()
