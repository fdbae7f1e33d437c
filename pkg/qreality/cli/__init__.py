import click

bp = click.Group('commands')

from qreality.cli import commands
