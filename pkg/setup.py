"""Setup script for modnet."""
from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

with open("requirements.txt", "r", encoding="utf-8") as fh:
    requirements = [line.strip() for line in fh if line.strip() and not line.startswith("#")]

setup(
    name="modnet",
    version="0.1.0",
    description="Simulator for entanglement-based gate induction between modules of a modular quantum computer",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["examples", "examples.*"]),
    py_modules=[
        "config",
        "logger",
        "error_logger",
        "main",
        "statevec",
        "diagonal",
        "coupling",
        "encoding",
        "cost",
        "scenario",
        "verification",
    ],
    data_files=[("schemas", ["schemas/scenario.schema.json", "schemas/report.schema.json"])],
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.9",
    install_requires=requirements,
    entry_points={
        "console_scripts": [
            "modnet=main:main",
        ],
    },
)
