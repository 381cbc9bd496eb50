import os
import sys

# ┏━━━━━━━━━━━━━━┓
# ┃ Project info ┃
# ┗━━━━━━━━━━━━━━┛
sys.path.insert(0, os.path.abspath(".."))

import germlab  # noqa: E402

project = "germlab"
copyright = "2026, the germlab developers"
author = "the germlab developers"

release = germlab.__version__

# ┏━━━━━━━━━━━━━━━━━━━━━━━┓
# ┃ General configuration ┃
# ┗━━━━━━━━━━━━━━━━━━━━━━━┛
extensions = [
    "sphinx.ext.todo",
    "sphinx.ext.autodoc",
    "sphinx_codeautolink",
    "sphinx.ext.napoleon",
    "sphinx.ext.autosummary",
    "sphinx.ext.autosectionlabel",
    "sphinx.ext.mathjax",
    "sphinx_copybutton",
    "sphinx-prompt",
    "myst_parser",
]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
todo_include_todos = True
myst_enable_extensions = ["dollarmath"]

default_role = "envvar"  # Like :code: role, but the text is black

# ┏━━━━━━┓
# ┃ HTML ┃
# ┗━━━━━━┛
html_theme = "sphinx_rtd_theme"

# ┏━━━━━━━━━━━━┓
# ┃ Python doc ┃
# ┗━━━━━━━━━━━━┛
autodoc_member_order = "bysource"
autodoc_typehints_format = "short"
add_module_names = False
autosummary_generate = True
napoleon_custom_sections = [
    "Constants",
    "Attributes",
    "Returns",
    "Methods",
    "Caveats",
]
highlight_language = "python"

# ┏━━━━━━━━━━━━━━━┓
# ┃ Code autolink ┃
# ┗━━━━━━━━━━━━━━━┛
codeautolink_global_preface = "import germlab; from germlab import *"
