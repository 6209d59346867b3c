"""Dependency-parser consistency probing under year-numeral substitution."""

__version__ = "0.1.0"

from .analysis import (BatchResult, GroupReport, SegStatus, Stats, SummaryReport, aggregate,
                       analyze_batch, check_segmentation, is_correctly_parsed, summarize,
                       tree_diff)
from .augment import (AugmentedBatch, NumeralMatch, SamplingConfig, augment_treebank,
                      find_year_numerals, sample_eval_numbers, sample_training_numbers,
                      substitute_numeral, substitute_tokens, synthesize_batch)
from .clusters import (ErrorClusterSet, IdentityGraph, bron_kerbosch, cluster_batch,
                       identity_graph)
from .conllu import (ConlluError, DepTree, Sentence, Token, TreeError, Treebank,
                     build_dep_tree, parse_conllu, serialize_conllu)
from .grct import GrctNode, GrctTree, LexMode, NodeKind, grct_equal, parse_bracketed, \
    to_bracketed, to_grct
from .kernel import KernelError, KernelParams, ncptk, ptk, ptk_oracle
from .runner import ParserError, ParserSpec, run_parser
