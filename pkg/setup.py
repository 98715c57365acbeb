#!/usr/bin/env python3
"""
Symatch - Symmetry-matching decoders for bivariate bicycle codes
Setup script for installation and packaging
"""

from setuptools import setup, find_packages

# Read README for long description
def read_readme():
    with open("README.md", "r", encoding="utf-8") as fh:
        return fh.read()

# Read requirements
def read_requirements():
    with open("requirements.txt", "r", encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip() and not line.startswith("#")]

setup(
    name="symatch",
    version="0.3.1",
    author="Symatch Development Team",
    description="Symmetry-matching decoders and benchmarks for bivariate bicycle quantum codes",
    long_description=read_readme(),
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["examples", "examples.*"]),
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.9",
    install_requires=read_requirements(),
    entry_points={
        "console_scripts": [
            "symatch=symatch.main:main",
        ],
    },
    include_package_data=True,
    package_data={
        "symatch": [
            "config/*.yaml",
        ],
    },
    keywords="quantum error correction bivariate bicycle codes decoding matching",
)
