# -*- coding:utf-8 -*-
from setuptools import find_packages, setup
from gelfkit import __version__

setup(
    name="gelfkit",
    version=__version__,
    packages=find_packages(exclude=["tests", "tests.*"]),
    description="Exact finite models of Gelfand spaces, sheaves, Čech cohomology and coverings",
    python_requires=">=3.9",
    entry_points={
        "console_scripts": ["gelfkit = gelfkit.cli:main"]
    },
    install_requires=[
        "sympy~=1.14.0",
        "networkx~=3.2",
        "jsonschema~=4.21",
        "mypy~=1.14.1",
    ],
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: BSD License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
