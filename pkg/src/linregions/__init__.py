"""linregions: bounds, constructions, and exact counting of linear regions
of piecewise-linear (ReLU / rank-k maxout) networks."""

from ._backend import BACKEND
from .bounds import (
    NetConfig,
    arora_lower,
    asymptotic_cap,
    exp_lower_large_input,
    maxout_upper_thm5,
    montufar2014_lower,
    montufar2017_upper,
    naive_upper,
    relu_upper_thm1,
    thm3_lower,
    two_layer_closed_form,
    zaslavsky,
)
from .constructions import ZigzagSpec, deep_1d, multi_dim, zigzag_layer
from .counter import (
    CounterOptions,
    CountResult,
    RegionCapExceeded,
    RegionWitness,
    brute_force_count,
    count_regions,
    count_regions_maxout,
    count_regions_relu,
    dimension_profile,
    grid_sample_count,
)
from .feasibility import (
    FeasibilityQuery,
    Verdict,
    exact_max_margin,
    feasible_nonstrict,
    max_margin,
)
from .milp import BigM, MilpModel, compute_bigM, export_milp, render_lp, write_milp
from .network import (
    ActivationPattern,
    AffineMap,
    Box,
    LinearOutput,
    MaxoutLayer,
    Network,
    NetworkFormatError,
    ReluLayer,
    Unrestricted,
    compose_region_map,
    forward,
    read_network,
    region_image_dimension,
    validate,
    write_network,
)

__version__ = "0.1.0"
