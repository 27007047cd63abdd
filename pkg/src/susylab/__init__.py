"""susylab: numerical verification of SWKB/BSWKB quantization for
conventional shape-invariant superpotentials."""

__version__ = "0.1.0"

from .superpotentials import (  # noqa: F401
    ClassTag,
    DomainSpec,
    ParamRecord,
    SuperpotentialInstance,
    catalog,
    catalog_entry,
)
