"""Linear codes over GF(2) and the privacy-amplification map they induce."""

import numpy as np

from algoqkd.gf2 import BitString
from algoqkd.lincode import CodeRequirement, character_sum, construct_code, dual_coset
from algoqkd.lincode import privacy_amplify, write_code

# a [16, 4] code whose minimum distance exceeds 2 * 16 * (p + eps) for p=0.05, eps=0.1
req = CodeRequirement.for_protocol(16, 4, 0.05, 0.1)
code = construct_code(req, seed=1)
print(f"need d > {req.distance_floor}, got d = {code.min_distance}")
print(write_code(code))

# the final key is the syndrome-like map f(x) = (x.v_1, ..., x.v_4)
rng = np.random.default_rng(0)
x = BitString.random(16, rng)
y = privacy_amplify(code, x)
print("x    =", x)
print("f(x) =", y)

# every key value has exactly 2^(n-m) preimages, forming a coset of the dual code
fibre = dual_coset(code, y)
print("preimages of f(x):", len(fibre), "contains x:", x in fibre)

# character sums over a fibre vanish unless the two light patterns coincide
r = (code.min_distance - 1) // 2
s = BitString([1] * r + [0] * (16 - r))
t = BitString([0] * (16 - r) + [1] * r)
print("sum with s == s:", character_sum(code, y, s, s))
print("sum with s != t:", character_sum(code, y, s, t))
