"""Reconstruct hidden rooted trees from batched relative-distance or path queries."""

from .errors import InvalidArgument, NewickError, OracleInconsistency, ProtocolError, UnsupportedQuery
from .generate import gen_binary_tree, gen_chain, gen_pruefer_tree, gen_spider_tree
from .newick import parse_newick, parse_parent_array, read_tree, write_newick, write_parent_array
from .oracle import Closer, Oracle, Path, QueryLedger, answer_batch, count
from .recon_path import (
    PathTrace,
    SplitConstants,
    brute_force_reconstruct,
    find_parent,
    find_root,
    find_splitting_edge,
    max_finding,
    reconstruct_path,
    reconstruct_rooted_tree,
    verify_splitting_edge,
)
from .recon_relative import link, reconstruct_phylogenetic, reconstruct_relative, split_leaves
from .scheduler import RoundScheduler, ask, spawn
from .tree import Clade, LeafTree, RootedTree, leaf_isomorphic, tree_from_edges, trees_equal_edges

__all__ = [
    "Clade", "Closer", "InvalidArgument", "LeafTree", "NewickError", "Oracle", "OracleInconsistency",
    "Path", "PathTrace", "ProtocolError", "QueryLedger", "RootedTree", "RoundScheduler", "SplitConstants",
    "UnsupportedQuery", "answer_batch", "ask", "brute_force_reconstruct", "count", "find_parent",
    "find_root", "find_splitting_edge", "gen_binary_tree", "gen_chain", "gen_pruefer_tree",
    "gen_spider_tree", "leaf_isomorphic", "link", "max_finding", "parse_newick", "parse_parent_array",
    "read_tree", "reconstruct_path", "reconstruct_phylogenetic", "reconstruct_relative",
    "reconstruct_rooted_tree", "spawn", "split_leaves", "tree_from_edges", "trees_equal_edges",
    "verify_splitting_edge", "write_newick", "write_parent_array",
]
