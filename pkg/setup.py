"""
Setup script for the unimodal DP mixture package.
"""

from setuptools import setup, find_packages
from pathlib import Path

# Read README
this_directory = Path(__file__).parent
long_description = (this_directory / "README.md").read_text(encoding="utf-8")


def read_requirements(name: str):
    path = this_directory / name
    if not path.exists():
        return []
    lines = (line.strip() for line in path.read_text().splitlines())
    return [line for line in lines if line and not line.startswith(("#", "-r"))]


requirements = read_requirements("requirements.txt")

setup(
    name="unimodal-dpm",
    version="0.1.0",
    description="Bayesian nonparametric unimodal and orthounimodal density estimation by MCMC",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
    ],
    python_requires=">=3.10",
    install_requires=requirements,
    extras_require={"dev": read_requirements("requirements-dev.txt")},
    entry_points={
        "console_scripts": [
            "unimodal-dpm=src.main:main",
        ],
    },
    # Config.load_default reads <repo>/config
    data_files=[("config", sorted(str(p.relative_to(this_directory)) for p in (this_directory / "config").glob("*.yaml")))],
)
