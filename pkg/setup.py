from setuptools import find_packages, setup

setup(
    name="caputo_scheme",
    packages=find_packages(exclude=["caputo_scheme_tests"]),
    package_data={"caputo_scheme": ["data/*.csv"]},
    install_requires=[
        "dagster-pandera",
        "pandera",
        "dagster",
        "pandas",
        "numpy",
        "scipy",
        "pyyaml",
    ],
    extras_require={"dev": ["dagster-webserver", "pytest"]},
    entry_points={"console_scripts": ["caputo-scheme=caputo_scheme.cli:main"]},
)
