from .elementary import ElementaryDifferentialTable, elementary_differential
from .series import (
    SeriesStepConfig, series_terms, bseries_autonomous, partial_sums, bseries_driven_step,
    coefficient_paths, coefficient_defects, convergence_radius, local_order_study,
)
