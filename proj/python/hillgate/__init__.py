"""Monte Carlo estimation of transition statistics of the Langevin dynamics
via the Hill relation, with exact boundary-measure sampling and a finite-chain
oracle."""

try:
    from ._hillgate import *  # noqa: F401,F403  (installed package layout)
    from ._hillgate import __version__, oracle  # noqa: F401
except ImportError:  # build-tree layout: extension next to the package
    from _hillgate import *  # noqa: F401,F403
    from _hillgate import __version__, oracle  # noqa: F401
