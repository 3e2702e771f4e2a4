#!/usr/bin/env python3
"""
Setup script for creating distribution packages.
"""

from setuptools import setup, find_packages

# Read requirements
def read_requirements():
    with open('requirements.txt', 'r') as f:
        return [line.strip() for line in f if line.strip() and not line.startswith('#')]

# Read README
def read_readme():
    with open('README.md', 'r') as f:
        return f.read()

setup(
    name="algebraic-damping",
    version="0.1.0",
    description="Singularity atlas and exact advection evolution for algebraically damped observables",
    long_description=read_readme(),
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    include_package_data=True,
    install_requires=read_requirements(),
    extras_require={"dev": ["pytest>=7.0"]},
    entry_points={"console_scripts": ["algdamp=algebraic_damping.cli:main"]},
    python_requires=">=3.9",
)
