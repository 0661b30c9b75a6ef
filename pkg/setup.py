#!/usr/bin/env python3
"""
Setup script for the VANET Popular Content Distribution Simulator
"""

import os
import sys
from setuptools import setup, find_packages

# Check Python version
if sys.version_info < (3, 8):
    sys.exit("Python 3.8 or higher is required to run this simulator")

# Get version from package
with open(os.path.join('vanet_pcd', '__init__.py'), 'r') as f:
    for line in f:
        if line.startswith('__version__'):
            version = line.split('=')[1].strip().strip('"\'')
            break
    else:
        version = '1.0.0'  # Default version if not found

# Read README for long description
with open('README.md', 'r', encoding='utf-8') as f:
    long_description = f.read()

# Define base requirements
base_requirements = [
    'numpy>=1.21.0',
    'networkx>=2.6',
    'pandas>=1.5.0',
]

# Optional requirements for development
optional_requirements = {
    'dev': [
        'pytest>=7.0.0',
        'black>=22.1.0',
        'isort>=5.10.1',
    ],
}

# Setup configuration
setup(
    name='vanet-pcd',
    version=version,
    description='Coalition-formation broadcast scheduling for vehicular content distribution',
    long_description=long_description,
    long_description_content_type='text/markdown',
    author='VANET PCD Team',
    packages=find_packages(exclude=['tests', 'tests.*', 'examples', 'examples.*']),
    include_package_data=True,
    install_requires=base_requirements,
    extras_require=optional_requirements,
    entry_points={
        'console_scripts': [
            'vanet-pcd=vanet_pcd.__main__:main',
        ],
    },
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Topic :: Scientific/Engineering',
        'Topic :: System :: Networking',
    ],
    python_requires='>=3.8',
    keywords='vanet, coalition formation, game theory, content distribution, simulation',
)
