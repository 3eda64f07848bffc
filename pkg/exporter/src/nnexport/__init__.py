"""nnexport: trained-model export to network JSON plus a desk-scale training harness."""

from .export import ExportError, build_document, export_model
from .harness import (
    bound_via_cli,
    count_regions_via_cli,
    export_trained,
    run_experiment,
)
from .train import TrainedModel, load_digit_data, train_small

__version__ = "0.1.0"
