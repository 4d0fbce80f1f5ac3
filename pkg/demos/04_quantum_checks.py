"""Dense-matrix checks of the two quantum inequalities used in the security argument."""

import numpy as np

from algoqkd.lincode import CodeRequirement, construct_code
from algoqkd.listing import build_synthetic_instance, verify_listing_bound
from algoqkd.qsim import random_density, random_projector, verify_projection_perturbation

rng = np.random.default_rng(1)

# |tr(rho Q) - tr(rho P Q P)| <= 3 sqrt(1 - tr(rho P)) for projectors P, Q
for dim in (2, 4, 8):
    rho = random_density(dim, rng)
    p = random_projector(dim, dim - 1, rng)
    q = random_projector(dim, dim // 2, rng)
    c = verify_projection_perturbation(rho, p, q)
    print(f"dim {dim}: lhs {c.lhs:.4f} <= rhs {c.rhs:.4f}  ({c.holds})")

# a synthetic tripartite state where Eve lists candidate keys with programs
code = construct_code(CodeRequirement(4, 1, 2), seed=5)
for family in ("generic", "product", "bell"):
    inst = build_synthetic_instance(code, seed=2, program_count=2, family=family)
    c = verify_listing_bound(inst, radius_fraction=0.25)
    print(f"{family:8s} guess prob {c.lhs:.4f} <= {c.rhs:.4f}, "
          f"classical identity residue {c.classical_residue:.1e}")
