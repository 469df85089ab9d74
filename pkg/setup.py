"""Setup shim for pip versions without PEP 660 editable installs."""

from setuptools import setup

# Configuration lives in pyproject.toml
setup()
