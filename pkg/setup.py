from setuptools import setup, find_packages

setup(
    name="psmodules",
    version="0.1.0",
    packages=find_packages(exclude=("tests",)),
    python_requires=">=3.9",
    install_requires=[
        "numpy==1.26.4",
        "pandas==2.2.0",
        "sympy>=1.12",
        "python-dotenv==1.0.0",
        "PyYAML>=6.0",
    ],
    entry_points={
        "console_scripts": [
            "ps-check=psmodules.cli:main",
        ],
    },
)
