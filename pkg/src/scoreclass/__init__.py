"""Sequential test ordering for score classification.

Tests with known costs and success probabilities are queried one at a time
until the class of the total (weighted) score is a foregone conclusion.  The
package implements the exact and approximate ordering strategies for this
problem together with exact oracles that certify their guarantees on
desk-scale instances.
"""

from ._backend import BACKEND, backend_name
from .appendix_a import APPENDIX_A_INSTANCE, run_reproduction
from .errors import (InternalDefectError, OutOfRangeError, ParameterError,
                     ResourceLimitError, ScoreClassError, UnsupportedModeError)
from .goals import (GoalFunction, GoalGreedyStrategy, ThresholdGoal,
                    adaptive_greedy, combined_goal, threshold_goal)
from .harness import (ExperimentConfig, RatioRecord, build_strategy, generate,
                      load_config, parse_config, run_experiment)
from .model import (UNKNOWN, Instance, PartialAssignment, ScoreWindow,
                    ValueVector, classify, dumps_instance, induced_value_vector,
                    is_determined, load_instance, parse_instance, save_instance,
                    score_window, value_vector)
from .oracle import (CostReport, adaptive_table, block_verification_opt,
                     enumeration_cost, min_one_sided_block_cost, MODE_BLOCK,
                     MODE_VALUE, one_sided_block_cost, optimal_adaptive,
                     optimal_nonadaptive, run_on_assignment, strategy_cost,
                     verification_opt)
from .strategies import (KofNStrategy, MODE_ALL, MODE_ANY, Permutation,
                         RepeatedKofN, RoundRobinStrategy, SubStrategy,
                         b_minus_1_adaptive, kofn_strategy,
                         modified_round_robin, nonadaptive_rr, ones_predicate,
                         sigma_orderings, zeros_predicate)
from .unanimous import (GOLDEN_RATIO, RootedUVStrategy, TRR_CONSTANT, TRRPlan,
                        is_unanimous_vote, trr_best, trr_plan,
                        uv_adaptive_exact, uv_permutation_cost, uv_round_robin)

__version__ = "0.1.0"
