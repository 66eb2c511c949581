#!/usr/bin/env python

"""The setup script."""

import io
from os import path as op
from setuptools import setup, find_packages

with open("README.md") as readme_file:
    readme = readme_file.read()

here = op.abspath(op.dirname(__file__))

# get the dependencies and installs
with io.open(op.join(here, "requirements.txt"), encoding="utf-8") as f:
    all_reqs = f.read().split("\n")

install_requires = [x.strip() for x in all_reqs if x.strip() and "git+" not in x]

setup(
    author="Wentzell Lab Developers",
    author_email="wentzell-lab@users.noreply.github.com",
    python_requires=">=3.8",
    classifiers=[
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Natural Language :: English",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    description="Numerical laboratory for operators with generalized Wentzell boundary conditions",
    entry_points={
        "console_scripts": [
            "wentzell-lab=wentzell.runner:main",
        ],
    },
    install_requires=install_requires,
    license="MIT license",
    long_description=readme,
    long_description_content_type="text/markdown",
    include_package_data=True,
    keywords="wentzell, semigroups, boundary conditions, finite differences",
    name="wentzell-lab",
    packages=find_packages(include=["wentzell", "wentzell.*"]),
    test_suite="tests",
    version="0.1.0",
    zip_safe=False,
)
