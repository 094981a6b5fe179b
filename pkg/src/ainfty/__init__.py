"""Exact-arithmetic engine for finite-dimensional A-infinity and cyclic A-infinity algebras.

Submodules: ``graded`` (bases, sparse multilinear maps, Koszul signs),
``algebra`` (structures, morphisms, cyclic data, homotopies), ``splitting``,
``trees``, ``transfer``, ``maurer_cartan``, ``ncgeom``, ``ais`` (file format)
and ``cli``.  The most used names are re-exported here.
"""

from __future__ import annotations

from .algebra import *  # noqa: F401,F403
from .graded import *  # noqa: F401,F403
from .maurer_cartan import *  # noqa: F401,F403
from .ncgeom import *  # noqa: F401,F403
from .poly import *  # noqa: F401,F403
from .scalars import *  # noqa: F401,F403
from .splitting import *  # noqa: F401,F403
from .transfer import *  # noqa: F401,F403
from .trees import *  # noqa: F401,F403
from . import ais, fixtures  # noqa: F401

__version__ = "0.1.0"
