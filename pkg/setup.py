#!/usr/bin/env python
# -*- coding: utf-8 -*-


try:
    from setuptools import setup
except ImportError:
    from distutils.core import setup


with open('README.rst') as readme_file:
    readme = readme_file.read()

with open('HISTORY.rst') as history_file:
    history = history_file.read().replace('.. :changelog:', '')

with open('requirements.txt') as requirements_file:
    requirements = requirements_file.read().splitlines()

with open('testing_requirements.txt') as requirements_file:
    testing_requirements = requirements_file.read().splitlines()


setup(
    name='coco-denoiser',
    version='0.1.0',
    description="Co-coercivity based denoising of stochastic gradients",
    long_description=readme + '\n\n' + history,
    long_description_content_type='text/x-rst',
    author="The coco-denoiser Authors",
    packages=[
        'coco_denoiser',
    ],
    package_dir={'coco-denoiser':
                 'coco_denoiser'},
    include_package_data=True,
    install_requires=requirements,
    entry_points={
        'console_scripts': [
            'coco = coco_denoiser.cli:main',
        ],
    },
    license="Apache",
    zip_safe=False,
    keywords='coco-denoiser stochastic-gradient co-coercivity',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    test_suite='tests',
    tests_require=testing_requirements
)
