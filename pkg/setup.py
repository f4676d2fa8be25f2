"""Setup file for fluvius-navem package.

This is maintained for backward compatibility.
The project is primarily configured through pyproject.toml.
"""

from setuptools import setup

# All configuration is in pyproject.toml
setup()
