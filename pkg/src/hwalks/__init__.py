"""Kernels by H-walks in arc-colored digraphs.

A library and CLI covering reachability by H-walks, kernel verification and
solving, recognition of panchromatic patterns, the hardness-reduction gadget
constructions with certificate translation, and exhaustive search for
kernel-free colored digraphs.
"""

from hwalks.digraphs import (
    ColoredDigraph,
    Digraph,
    FormatError,
    Graph,
    GraphError,
    Pattern,
    acyclic_orientation,
    canonical_form,
    induced_subdigraph,
    is_isomorphic,
    parse_colored_digraph,
    parse_digraph,
    parse_graph,
    parse_pattern,
)
from hwalks.reach import ReachSet, reach_by_h_walks, reach_oracle, reachability_closure
from hwalks.kernels import (
    BudgetExhausted,
    KernelCertificate,
    KernelVerdict,
    find_kernel_backtracking,
    find_kernel_bruteforce,
    is_kernel,
    is_kernel_by_h_walks,
)
from hwalks.partitions import (
    M1,
    M2,
    MatrixSpec,
    PartitionCertificate,
    classify_pattern,
    m1_partition,
    m2_partition,
    m_partition_bruteforce,
    minimal_obstruction_family,
    subdivision_roles,
    scan_forbidden,
)
from hwalks.reductions import (
    ReductionArtifact,
    extract_coloring,
    kernel_from_coloring,
    proper_arc_coloring,
    reduce_all_red,
    reduce_edge_coloring,
    reduce_kcoloring,
    reduce_subdivision,
)
from hwalks.search import SearchReport, SearchSpec, enumerate_colored_digraphs, search_kernel_free

__version__ = "0.1.0"
