from setuptools import setup, find_packages

with open("requirements.txt") as f:
    install_requires = [line.strip() for line in f if line.strip() and not line.startswith("#")]

setup(
    name="guarded_owqa",
    version="0.1.0",
    packages=find_packages(exclude=("tests",)),
    include_package_data=True,
    package_data={"guarded_owqa": ["config/*.json"]},
    install_requires=install_requires,
    extras_require={"tests": ["pytest>=7.4"]},
    entry_points={"console_scripts": ["guarded-owqa=guarded_owqa.api.cli:main"]},
    python_requires=">=3.9",
)
