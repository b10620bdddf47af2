"""
metricdeform main entry point
"""

from metricdeform.cli.main import cli

if __name__ == "__main__":
    cli()
