"""Recovery algorithms and their post-processing."""
from .greedy import block_partition, bomp, bomp_mmv, ols, omp, omp_mmv
from .lamp import lamp_mmv, lamp_smv, oracle_delta
from .post import (bandlimit_filter, energy_band, findresidue, merge_rows,
                   merge_supports, reconstruct_coeffs)
from .results import (EpsilonMode, GroupRecord, LampConfig, RecoveryResult,
                      StopReason, format_result, parse_result)
