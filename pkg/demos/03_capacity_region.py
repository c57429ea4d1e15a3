"""Which block lengths can a given access structure support?"""

from dmupf import AccessStructure, inner_bounds, outer_bounds
from dmupf.dmuss import param_sample
from dmupf.errors import ParamSearchFailed
from dmupf.field import GF

structures = {
    "overlap in one server": AccessStructure(5, ((1, 2, 3), (3, 4, 5))),
    "chain": AccessStructure(6, ((1, 2, 3), (3, 4), (4, 5, 6))),
    "triangle": AccessStructure(3, ((1, 2), (2, 3), (1, 3))),
}

for name, acc in structures.items():
    print(f"== {name}: {acc.sets}")
    for c in outer_bounds(acc):
        print("  ", c.describe())
    region = inner_bounds(acc, T=2, q=7, m=1)
    print("   feasible:", region.feasible)
    print("   maximal: ", region.maximal)
    # the bounds are necessary; try to actually build each maximal tuple
    for R in region.maximal:
        try:
            param_sample(acc, R, GF(7), 0)
            print(f"   R={R}: parameters found")
        except ParamSearchFailed as exc:
            print(f"   R={R}: no parameters ({exc.report.failing_check})")
