"""Exact computer algebra for noncommutative deformations of D-modules on
finite covers: cohomology of cover-poset diagrams, Ext^1 of cyclic D-modules
as derivation cokernels, and the order-by-order obstruction calculus that
builds pro-representing hulls.
"""

from .linalg import KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
