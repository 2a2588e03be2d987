#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# coco-denoiser documentation build configuration file.

import sys
import os

# Make the package importable from the docs directory.
cwd = os.getcwd()
project_root = os.path.dirname(cwd)
sys.path.insert(0, project_root)

import coco_denoiser  # noqa: E402

# -- General configuration ---------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
    'sphinx.ext.intersphinx',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'COCO Denoiser'
copyright = u'2026, The coco-denoiser Authors'

version = coco_denoiser.__version__
release = coco_denoiser.__version__

exclude_patterns = ['_build']
pygments_style = 'sphinx'

# -- Options for HTML output -------------------------------------------

html_theme = 'default'
htmlhelp_basename = 'coco-denoiserdoc'

# -- Options for other builders ----------------------------------------

latex_documents = [
    ('index', 'coco-denoiser.tex',
     u'COCO Denoiser Documentation',
     u'The coco-denoiser Authors', 'manual'),
]

man_pages = [
    ('index', 'coco-denoiser',
     u'COCO Denoiser Documentation',
     [u'The coco-denoiser Authors'], 1)
]

texinfo_documents = [
    ('index', 'coco-denoiser',
     u'COCO Denoiser Documentation',
     u'The coco-denoiser Authors',
     'coco-denoiser',
     'Denoising of stochastic gradients with co-coercivity.',
     'Miscellaneous'),
]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
}
