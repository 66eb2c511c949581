"""Top-level package for wentzell-lab."""

__author__ = """Wentzell Lab Developers"""
__email__ = "wentzell-lab@users.noreply.github.com"
__version__ = "0.1.0"


from .common import *
from .interval import *
from .decomposition import *
from .probes import *
from .perturbation import *
from .disk import *
from .runner import WentzellLab, emit_report, execute, main
