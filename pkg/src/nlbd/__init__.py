"""nlbd: simulation and exhaustive search for nonlocal boxes and distillation wirings.

The package is organized as:

* :mod:`nlbd.boxes` - bipartite no-signalling boxes (probability and
  correlator/marginal form), validation, CHSH value, named families.
* :mod:`nlbd.xorboxes` - n-player XOR-game boxes with trivial marginals,
  their value, and the parity-distillation oracle.
* :mod:`nlbd.fourier` - Walsh transforms of +-1 output functions, the
  even-parity probability, values via Fourier coefficients, and the parity
  upper bound for non-adaptive distillation.
* :mod:`nlbd.wirings` - applying non-adaptive and adaptive two-copy
  protocols by exact outcome enumeration; named protocols (parity, OR);
  closed-form protocol values for symmetric boxes.
* :mod:`nlbd.search` - exhaustive protocol searches, parameter-region scans,
  and reproduction of the reference value tables.
* :mod:`nlbd.equivalence` - interpolation of adaptive-protocol output
  polynomials, affine factorization, and construction of nonidentical boxes
  whose parity wiring simulates an adaptive protocol.
* :mod:`nlbd.fileio` - the box/xor file formats and protocol serialization.
* :mod:`nlbd.cli` - the ``nlbd`` command-line front end.
"""

from .boxes import (
    BipartiteBox,
    CorrelatorForm,
    ValidationReport,
    box_from_correlators,
    chsh_value,
    chsh_value_of_box,
    correlators_from_box,
    make_named_box,
    validate_box,
)
from .equivalence import (
    AffineFactor,
    AffineFactorization,
    DeltaPolynomial,
    EquivalenceCertificate,
    EquivalenceResult,
    EquivalentBox,
    affine_factorize,
    build_equivalent_boxes,
    factor_affine_target,
    interpolate_qxy,
)
from .errors import (
    ArityMismatch,
    BudgetExceeded,
    FormatError,
    InvalidBox,
    InvalidConstructedBox,
    NlbdError,
    NoRealFactorization,
    RangeInfeasible,
    UnknownKind,
)
from .fileio import (
    format_box_correlators,
    format_box_matrix,
    format_protocol,
    format_xor_box,
    parse_box_text,
    parse_protocol,
    read_box_file,
    write_box_file,
)
from .fourier import (
    FourierSpectrum,
    ParityBound,
    PmOutputFunction,
    even_parity_prob,
    nonadaptive_value_fourier,
    parity_bound,
    walsh_transform,
    weight_table,
)
from .search import (
    CC_COLLAPSE_THRESHOLD,
    RegionRow,
    RegionScanResult,
    SearchResult,
    TableReport,
    adaptive_search_max,
    enumerate_nonadaptive_max,
    format_table_report,
    region_scan,
    reproduce_tables,
)
from .wirings import (
    AdaptiveTwoCopyProtocol,
    AllcockParams,
    NonAdaptiveProtocol,
    apply_adaptive,
    apply_nonadaptive,
    apply_nonadaptive_xor,
    bs_output_box,
    bs_wiring,
    closed_form_values,
    identity_wiring,
    or_protocol,
    parity_protocol,
    symmetric_box,
)
from .xorboxes import (
    MultipartiteXorBox,
    XorGame,
    parity_distill_value,
    simulate_parity,
    xor_value,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveTwoCopyProtocol",
    "AffineFactor",
    "AffineFactorization",
    "AllcockParams",
    "ArityMismatch",
    "BipartiteBox",
    "BudgetExceeded",
    "CC_COLLAPSE_THRESHOLD",
    "CorrelatorForm",
    "DeltaPolynomial",
    "EquivalenceCertificate",
    "EquivalenceResult",
    "EquivalentBox",
    "FormatError",
    "FourierSpectrum",
    "InvalidBox",
    "InvalidConstructedBox",
    "MultipartiteXorBox",
    "NlbdError",
    "NoRealFactorization",
    "NonAdaptiveProtocol",
    "ParityBound",
    "PmOutputFunction",
    "RangeInfeasible",
    "RegionRow",
    "RegionScanResult",
    "SearchResult",
    "TableReport",
    "UnknownKind",
    "ValidationReport",
    "XorGame",
    "adaptive_search_max",
    "affine_factorize",
    "apply_adaptive",
    "apply_nonadaptive",
    "apply_nonadaptive_xor",
    "box_from_correlators",
    "bs_output_box",
    "bs_wiring",
    "build_equivalent_boxes",
    "chsh_value",
    "chsh_value_of_box",
    "closed_form_values",
    "correlators_from_box",
    "enumerate_nonadaptive_max",
    "even_parity_prob",
    "factor_affine_target",
    "format_box_correlators",
    "format_box_matrix",
    "format_protocol",
    "format_table_report",
    "format_xor_box",
    "identity_wiring",
    "interpolate_qxy",
    "make_named_box",
    "nonadaptive_value_fourier",
    "or_protocol",
    "parity_bound",
    "parity_distill_value",
    "parity_protocol",
    "parse_box_text",
    "parse_protocol",
    "read_box_file",
    "region_scan",
    "reproduce_tables",
    "simulate_parity",
    "symmetric_box",
    "validate_box",
    "walsh_transform",
    "weight_table",
    "write_box_file",
    "xor_value",
]
