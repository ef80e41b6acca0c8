import setuptools

with open('__init__.py', 'r') as fh:
    lines = fh.readlines()
for line in lines:
    if line.startswith('__version__'):
        delim = '"' if '"' in line else "'"
        version = line.split(delim)[1]

with open('README.md', 'r') as fh:
    long_description = fh.read()

setuptools.setup(
    name='trustlab',
    version=version,
    description='Trust propagation in trust graphs by iterated trust-matrix products',
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=setuptools.find_packages(exclude=['tests', 'tests.*']),
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.8',
        'pandas>=1.5',
        'matplotlib>=3.5',
    ],
    extras_require={
        'test': ['pytest>=7', 'hypothesis>=6'],
    },
    entry_points={
        'console_scripts': ['trustlab = trustlab.cli:run'],
    },
    classifiers=[
        'Programming Language :: Python :: 3',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
    ],
    python_requires='>=3.8',
)
