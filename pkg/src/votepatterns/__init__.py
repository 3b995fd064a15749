"""votepatterns: mining characteristic voting-behavior patterns from
roll-call data via multiplex signed-graph partitioning."""

from .cc import (CCSolution, Partition, SolveLimits, WeightedSignedGraph,
                 brute_force, imbalance, solve_exact, solve_heuristic)
from .characteristic import (CharacteristicPattern, ConsensusGraph, characteristic_pattern,
                             consensus_graph, filter_low_participation, summarize_pattern)
from .clustering import Clustering, SweepReport, k_medoids, silhouette, sweep_k
from .errors import EmptySelectionError, ParseError, VotePatternsError
from .ingest import (DocumentMeta, VoteMatrix, VoteValue, Voter, filter_matrix,
                     parse_vote_table, write_vote_table)
from .metrics import (DissimilarityMatrix, Measure, Pattern, adjusted_rand,
                      dissimilarity_matrix, nmi, purity_harmonic, rand_index,
                      restrict_common)
from .multiplex import (AbstentionPolicy, MultiplexGraph, SignedLayer,
                        extract_layer, extract_multiplex)
from .pipeline import RunConfig, RunReport, compare_measures, run_pipeline
from .synth import GroundTruth, SyntheticSpec, default_planted, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "AbstentionPolicy", "CCSolution", "CharacteristicPattern", "Clustering",
    "ConsensusGraph", "DissimilarityMatrix", "DocumentMeta", "EmptySelectionError",
    "GroundTruth", "Measure", "MultiplexGraph", "ParseError", "Partition", "Pattern",
    "RunConfig", "RunReport", "SignedLayer", "SolveLimits", "SweepReport",
    "SyntheticSpec", "VoteMatrix", "VotePatternsError", "VoteValue", "Voter",
    "WeightedSignedGraph", "adjusted_rand", "brute_force", "characteristic_pattern",
    "compare_measures", "consensus_graph", "default_planted", "dissimilarity_matrix",
    "extract_layer", "extract_multiplex", "filter_low_participation", "filter_matrix",
    "generate_synthetic", "imbalance", "k_medoids", "nmi", "parse_vote_table",
    "purity_harmonic", "rand_index", "restrict_common", "run_pipeline", "silhouette",
    "solve_exact", "solve_heuristic", "sweep_k", "write_vote_table",
]
