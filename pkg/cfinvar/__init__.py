from cfinvar.config import get_config, load_config, set_config, use_config  # noqa: D104
from cfinvar.easydict import EasyDict
from cfinvar.exceptions import *
from cfinvar.graph import *
from cfinvar.invariance import *
from cfinvar.polytope import *
from cfinvar.response import *
from cfinvar.scm import *
from cfinvar.version import __version__
