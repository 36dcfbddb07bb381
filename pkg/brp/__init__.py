from .path import BranchedRoughPath, truncation_order
from .lift import lift_smooth
from .ito import ito_level2
from .extension import extend
from .correction import correct_almost, correction_report, defects
from .checks import (
    check_multiplicativity, distance, check_holder_budget, search_budget_constant,
    word_expansion, shuffle_defect,
)
from .storage import save_brp, load_brp
