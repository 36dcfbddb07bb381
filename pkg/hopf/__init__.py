from .coproduct import (
    TensorSeries, primitive, coproduct, coproduct_by_cuts, reduced_coproduct,
    reduced_coproduct_recursive, count_c_prime, count_c_tilde, counit_left, counit_right,
    coassociativity_defect, coproduct_table,
)
from .words import (
    Word, shuffle, chen_tree, is_chen, word_of, geometric_reduce, geometric_reduce_forest,
)
from .bounds import (
    tree_binomial_terms, tree_binomial_check, q_gamma, q_gamma_full, conjecture_ratio,
    neoclassical_ratio, neoclassical_tree_ratio, neoclassical_sweep, sweep_summary,
)
