"""
metricdeform CLI module.

Command-line front end for generating, deforming and verifying spaces.
"""

from metricdeform.cli.main import cli

__all__ = ["cli"]
