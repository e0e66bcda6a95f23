# Configuration file for the Sphinx documentation builder.
#
# This file only contains a selection of the most common options. For a full
# list see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

# -- Project information -----------------------------------------------------
import os
import sys
from pathlib import Path

project = "expmap"
copyright = "2023, expmap developers"
author = "expmap developers"


# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx_rtd_theme",
    "sphinx.ext.autodoc",
]

templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]


# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_static_path = []

# -- Setup django stuff -----------------------------------------------------
sys.path.insert(0, str(Path(__file__).parent.parent.absolute()))
os.environ["DJANGO_SETTINGS_MODULE"] = "expmap.settings"
os.environ["DEBUG"] = "False"

import django

django.setup()
