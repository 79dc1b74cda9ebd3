#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""The setup script."""

from setuptools import setup, find_packages

with open("README.md") as readme_file:
    readme = readme_file.read()

requirements = [
    "appdirs",
    "Click>=7.0",
    "numpy>=1.17",
    "scipy>=1.4",
    "sympy>=1.7",
]
setup_requirements = ["pytest-runner"]
test_requirements = [
    "pytest",
    "pytest-cov"]
extras = {
    "test": test_requirements,
}

setup(
    name="lucas_wavelet",
    description="Spectral tau solver for second order ODEs on shifted Lucas wavelets",
    author="Lucas Wavelet developers",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Natural Language :: English",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    entry_points={"console_scripts": ["lucaswave=lucas_wavelet.cli:main"]},
    include_package_data=True,
    install_requires=requirements,
    long_description=readme,
    long_description_content_type='text/markdown',
    keywords="lucaswave spectral tau wavelet Lane-Emden pantograph",
    packages=find_packages(include=["lucas_wavelet"]),
    python_requires=">=3.8",
    setup_requires=setup_requirements,
    test_suite="tests",
    tests_require=test_requirements,
    extras_require=extras,
    version="0.1.0",
    zip_safe=False,
)
