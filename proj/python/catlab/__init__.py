"""Concept-space backdoor attack laboratory.

Thin Python surface over the C++ core: dataset handling, the trigger-selection
attacks and their evaluation protocol, Beta-posterior machinery, robustness
estimation and the clustering-ensemble defense.
"""

try:
    from ._catlab import *  # noqa: F401,F403  (installed package layout)
    from . import _catlab as _impl
except ImportError:  # in-tree build: the module sits on PYTHONPATH directly
    from _catlab import *  # noqa: F401,F403
    import _catlab as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
__version__ = "0.1.0"
