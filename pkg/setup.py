# pylint: disable=missing-module-docstring
from pathlib import Path

from setuptools import find_packages
from setuptools import setup

_SRC = Path("src")
_MODULE_NAME = "spion_mc_testbed"
_DIR_PATH = Path(__file__).parent.joinpath(_SRC).resolve()


setup(
    name="spion-mc-testbed",
    version="0.1.0",
    description="Simulator of a SPION-based molecular communication testbed: codec, channel, receiver and detector",
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.20",
        "scipy",
        "pandas",
        "PyYAML",
    ],
    extras_require={
        "dev": [
            "pytest",
        ],
    },
    packages=find_packages(where=_DIR_PATH.as_posix()),
    package_dir={
        # workaround for develop mode
        # https://github.com/pypa/setuptools/issues/230
        "": _SRC.as_posix(),
        _MODULE_NAME: _SRC.joinpath(_MODULE_NAME).as_posix(),
    },
    entry_points={
        "console_scripts": [
            "spion-mc = spion_mc_testbed.harness.cli:main",
        ],
    },
)
