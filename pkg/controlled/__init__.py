from .fields import VectorfieldFamily, contract
from .path import ControlledPath, controlled_distance, controlled_norm, lemma_defect, check_remainders
from .compose import compose_smooth, ordered_factorizations
from .integrate import integration_germ, rough_integrate
from .rde import picard_map, solve_rde
from .lift import lift_controlled
