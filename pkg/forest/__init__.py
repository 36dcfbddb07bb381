from .trees import (
    Tree, Forest, UNIT, as_forest, leaf, graft, ungraft, canonicalize, relabel, ladder,
    degree, labels, tree_factorial, forest_factorial, tuple_multiplicity,
    symmetry_factor, symmetry_factor_by_multiplicity, forest_symmetry,
    tree_to_json, tree_from_json, forest_to_json, forest_from_json,
)
from .enumeration import (
    count_trees, count_forests, enumerate_trees, trees_of_degree, enumerate_forests,
    weighted_tree_sum,
)
from .series import ForestSeries
