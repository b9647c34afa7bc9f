"""Exact reconstruction of maps on rank-one idempotents that preserve ``tr PQ``."""

from .algebra import GF, QQ, Field, Matrix
from .census import CensusTask, classify_all, enumerate_preserving_maps, group_order
from .decompose import (Branch, OrthogonalForm, PreserverForm, apply_form, decompose,
                        forms_equal_up_to_scalar, recover_conjugation, recover_orthogonal)
from .extension import (LinearExtension, SymmetryMap, check_trace_preservation, extend_map,
                        verify_consistency)
from .idempotents import (RankOneIdempotent, enumerate_idempotents,
                          enumerate_symmetric_idempotents, make_idempotent, trace_pairing)

__version__ = "0.1.0"
