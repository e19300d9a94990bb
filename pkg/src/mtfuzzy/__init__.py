"""Fuzzy sets and binary fuzzy relations as multi-terminal decision diagrams."""
from .dense import DenseRelation, dense_memory_bytes, dense_mmc, floyd_warshall_closure
from .estimators import FuzzyConnectedness, ImageAffinity, MaxMinClosure
from .exceptions import (CapacityError, DomainError, MTFuzzyError, ParseError,
                         PreconditionError, StructuralOrderError, UsageError)
from .fmtr import Entries, format_fmtr, parse_fmtr, read_fmtr, write_fmtr
from .fuzzyset import FuzzySet, membership, set_from_pairs, set_intersection, set_union
from .image import Image, build_affinity, color_diff, compute_delta, load_image, simil
from .membership import MembershipValue, mv_max, mv_min, mv_to_real, quantize
from .mtbdd import NodeTable
from .relation import (FuzzyRelation, from_entries, identity, mmc, relation_from_matrix,
                       relation_stats, transitive_closure)

__version__ = "0.1.0"
