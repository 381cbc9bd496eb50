from setuptools import setup, find_packages

from germlab._meta import __version__

setup(
    name="germlab",
    version=__version__,
    description="Exact multiplicities of germs under formal group actions",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    classifiers=[
        "Programming Language :: Python :: 3.9",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    packages=find_packages(exclude=["tests", "docs"]),
    python_requires=">=3.9",
    install_requires=["docstring-parser", "sympy"],
    extras_require={"test": ["pytest"]},
    entry_points={"console_scripts": ["germlab=germlab.cli:main"]},
)
