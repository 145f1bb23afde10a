from setuptools import setup, find_packages

setup(
    name="fblab",
    version="0.1.0",
    packages=find_packages(include=['fblab', 'fblab.*']),
    install_requires=[
        "numpy>=1.24",
        "scipy>=1.12",
        "scikit-image>=0.21",
        "shapely>=2.0",
        "click>=8.0.0",
        "rich>=10.0.0",
        "pyyaml>=5.4.0",
        "python-dotenv>=1.0.0",
        "humanize>=4.0.0",
    ],
    extras_require={
        "test": ["pytest>=7.4", "hypothesis>=6.80"],
    },
    entry_points={
        "console_scripts": [
            "fblab=fblab.main:cli",
        ],
    },
    python_requires=">=3.9",
    description="Numerical laboratory for the exterior p-Laplacian free boundary problem",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3.9",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
