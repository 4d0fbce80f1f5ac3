"""Description lengths from a computable self-delimiting code."""

import numpy as np

from algoqkd.algoinfo import CAVEAT, LZ78Model, chain_rule_audit, counting_check, length_profile
from algoqkd.algoinfo import otp_experiment
from algoqkd.gf2 import BitString

model = LZ78Model()
rng = np.random.default_rng(0)

zeros = BitString.zeros(256)
noise = BitString.random(256, rng)
print("dl(0^256)     =", model.dl(zeros))
print("dl(random)    =", model.dl(noise))
print("dl(random|it) =", model.dl(noise, noise))

code = model.encode(noise)
assert model.decode(code) == noise

# no more than 2^(l+1) - 1 strings can have descriptions of length <= l
shortest = int(length_profile(model, 12).min())
for threshold in range(shortest, shortest + 12, 3):
    c = counting_check(model, 12, threshold)
    print(f"m=12, dl <= {threshold}: {c.count} strings, bound {c.bound}")

# one-time pad: few x have a short description given x xor k
r = otp_experiment(model, 12, 0.25, key_seed=3)
print(f"|B_delta| = {r.b_delta_size} <= {r.bound:.0f}")
print(chain_rule_audit(model, 100, 12, seed=0).to_dict())
print(CAVEAT)
