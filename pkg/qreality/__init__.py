import logging
import logging.config
import os

import click

from config import Config

__version__ = '0.1.0'


def configure_logging(config_class=Config):
    if os.path.exists(config_class.LOG_CONFIG):
        logging.config.fileConfig(config_class.LOG_CONFIG, disable_existing_loggers=False)
    else:
        logging.basicConfig(level=config_class.LOG_LEVEL,
                            format='%(levelname)-5.5s [%(name)s] %(message)s')


def _set_log_level(log_level=None):
    if log_level:
        logging.getLogger('qreality').setLevel(log_level.upper())


def create_cli(config_class=Config):
    configure_logging(config_class)

    cli = click.Group(
        'qreality',
        help='Quantum reality filters: coevents, q-measures and their exact tests.',
        params=[click.Option(['--log-level'], default=None,
                             help='Level for the qreality loggers (DEBUG, INFO, ...).')],
        callback=_set_log_level,
        context_settings={'obj': config_class},
    )

    # Registrar comandos
    from qreality.cli import bp as commands_bp
    for name, command in commands_bp.commands.items():
        cli.add_command(command, name)

    return cli
