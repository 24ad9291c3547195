"""Setup script for sumdiff."""

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="sumdiff",
    version="0.1.0",
    author="sumdiff",
    description="Entropy and cardinality counterexamples to sums-differences statements in the plane",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(include=["sumdiff", "sumdiff.*"]),
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
    install_requires=[
        "click>=8.0.0",
        "rich>=13.0.0",
        "numpy>=1.22",
        "scipy>=1.9",
        "sympy>=1.10",
    ],
    extras_require={
        "dev": ["pytest>=7.0"],
    },
    entry_points={
        "console_scripts": [
            "sumdiff=sumdiff.cli:main",
        ],
    },
)
