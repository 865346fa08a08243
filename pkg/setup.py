import os
import setuptools

with open("README.md", "r", encoding='utf-8') as fh:
    long_description = fh.read()

with open(os.path.join("pacgreedy", "__about__.py"), encoding='utf-8') as f:
    v_dict = {}
    exec(f.read(), v_dict)
    pacgreedy_version = v_dict['__version__']

setuptools.setup(
    name="pacgreedy",
    version=pacgreedy_version,
    description="Greedy submodular maximization with PAC bounds on noisy objectives",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["test"]),
    include_package_data=True,
    python_requires='>=3.8',
    install_requires=[
        "numpy >= 1.17",
        "scipy >= 1.4",
        "colorama",
        "pyyaml >= 5.1",
    ],
    extras_require={
        "test": ["parameterized"],
    },
    entry_points={
        "console_scripts": [
            "pacgreedy = pacgreedy.cli:main",
        ],
    },
    classifiers=(
        "Development Status :: 4 - Beta",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3 :: Only",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Information Analysis",
    ),
)
