"""lddkit: randomized directed low-diameter decompositions.

Two sampling algorithms (truncated-exponential ball carving and random-order
ball cutting with separation marking), exact structural checkers, and a
Monte Carlo harness that verifies their probabilistic guarantees at desk
scale.
"""

from .ball_carving import (CarvingSchedule, CarvingStats, cutting_procedure,
                           decompose_ball_carving)
from .ballsize import BallSizeEstimate, ball_size_one, ball_sizes_all
from .clustering import (MarkVector, OrderedClustering, clustering_from_cuts,
                         cut_edge_pairs, is_cut, split_to_scc_and_reorder)
from .config import DecompositionConfig, RunConfig
from .generators import generate
from .graph import (INF, DistanceMap, GraphError, WeightedDigraph, ball,
                    dijkstra_multi, edges_within, induced_subgraph, reverse,
                    scc_condensation, weak_diameter)
from .randomness import (InternalFaultError, RngStream, TruncExpParams,
                         sample_bernoulli, sample_trunc_exp, sample_trunc_exp_many,
                         sample_uniform_int, shuffle, trunc_exp_pmf)
from .separated import (HeavyLightLabels, RegimeWarning, SeparationSchedule,
                        decompose_separated, label_heavy_light)
from .verify import (IndependenceReport, ProbeReport, ProbeSpec,
                     check_appendix_inequalities, check_separation,
                     check_structure, estimate_event, independence_test,
                     run_decomposition, wilson_interval)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
