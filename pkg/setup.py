#!/usr/bin/env python3
"""
Setup shim for pyTISCasimir.

Package metadata, dependencies and the ``tiscasimir`` console script are declared
in pyproject.toml; this file only keeps ``python setup.py develop`` working.
"""

from setuptools import setup

if __name__ == "__main__":
    setup()
