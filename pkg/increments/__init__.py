from .grid import Grid
from .increment import (
    Increment2, Increment3, coboundary1, coboundary2, exterior_product, circle_product, unit,
)
from .norms import (
    HolderReport, holder_norm2, holder_norm3, holder_norm3_split, lag_profile, measured_order,
    lag_profile3, measured_order3, holder_precheck,
)
from .sewing import SewResult, sew, sew_closed, reconstruct_path, sew_refinement
