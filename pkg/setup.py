from setuptools import setup, find_packages

# Read requirements
with open('finitegap/requirements.txt') as f:
    requirements = [line for line in f.read().splitlines() if line and not line.startswith('#')]

setup(
    name="finitegap",
    version="1.0.0",
    description="Finite-gap 2D Schrödinger and Dirac operators from singular rational spectral curves",
    packages=find_packages(exclude=["tests", "tests.*"]),
    include_package_data=True,
    package_data={"finitegap": ["requirements.txt"]},
    install_requires=requirements,
    entry_points={
        'console_scripts': [
            'finitegap=cli.main:main',
        ],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "License :: OSI Approved :: MIT License",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
)
