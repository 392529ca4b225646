"""2-coloured matchings in 3-coloured complete 3-uniform hypergraphs.

Library layout:
    model       colex ranking, Colouring/Matching, the n -> bound arithmetic
    structure   sextuple classification: dominated / spread / universal
    generators  layered constructions, sharpness instances, seeded randoms
    oracle      exact branch-and-bound maximum matchings
    extractor   the constructive pipeline with trace + witness escalation
    formats     HCG3 instance text format, JSON matching/trace documents
    report      stress sweeps, CSV and figures
    cli         `hypermatch` command line entry point
"""

from .errors import (FaithfulnessError, FormatError, HypermatchError,
                     WitnessError)
from .extractor import Trace, replay_trace, solve
from .generators import (ConjectureParams, LayerSpec, conjecture_bound,
                         fixture, layered_lowest_colour, layered_upper_bounds,
                         random_colouring, sharpness_instance)
from .model import (COLOURS, Colouring, Matching, VerificationReport, m_bound,
                    n_triples, near_perfect_size, rank_triple, smallest_n_for,
                    unrank_triple, verify_matching)
from .oracle import (OracleResult, largest_mono_matching,
                     max_matching_in_colours, max_two_coloured,
                     perfect_two_coloured_12)
from .structure import (SextupleClass, SpreadInfo, Splitting, Witness,
                        classify_sextuple, find_universal_sextuple,
                        scan_spreads, verify_witness)

__version__ = "0.1.0"

__all__ = [
    "COLOURS", "Colouring", "Matching", "VerificationReport",
    "m_bound", "smallest_n_for", "near_perfect_size", "n_triples",
    "rank_triple", "unrank_triple", "verify_matching",
    "SextupleClass", "SpreadInfo", "Splitting", "Witness",
    "classify_sextuple", "find_universal_sextuple", "scan_spreads",
    "verify_witness",
    "LayerSpec", "ConjectureParams", "layered_lowest_colour",
    "layered_upper_bounds", "sharpness_instance", "random_colouring",
    "conjecture_bound", "fixture",
    "OracleResult", "max_matching_in_colours", "max_two_coloured",
    "largest_mono_matching", "perfect_two_coloured_12",
    "Trace", "solve", "replay_trace",
    "HypermatchError", "FormatError", "WitnessError", "FaithfulnessError",
    "__version__",
]
