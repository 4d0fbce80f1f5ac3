"""Running BB84 sessions, with and without an intercept-resend eavesdropper."""

from dataclasses import replace

import numpy as np

from algoqkd import AttackStrategy, KeyPool, ProtocolConfig, run_session
from algoqkd.algoinfo import LZ78Model
from algoqkd.analysis import aggregate_sessions
from algoqkd.lincode import CodeRequirement, construct_code
from algoqkd.protocol import session_seed

n, p, eps = 512, 0.02, 0.05
code = construct_code(CodeRequirement.for_protocol(n, 12, p, eps), seed=3)
config = ProtocolConfig(n=n, p=p, epsilon=eps, delta=0.05, code=code, seed=0)
pool = KeyPool(100_000)

# an honest channel: no test errors, identical keys, and a debit for reconciliation
t = run_session(config, AttackStrategy.none(), pool)
print("errors:", t.observed_error_count, "aborted:", t.aborted)
print("alice key:", t.final_key, " bob key:", t.final_key_bob)
print("pool debit:", t.pool_debit, "bits, remaining:", pool.remaining_bits)

# intercept-resend in a random basis flips a quarter of the test bits
attack = AttackStrategy.intercept_resend("random_per_qubit")
runs = [run_session(replace(config, seed=session_seed(7, i)), attack, pool) for i in range(20)]
rates = [r.observed_error_count / n for r in runs]
print(f"attacked: mean test error {np.mean(rates):.3f}, aborted {sum(r.aborted for r in runs)}/20")

# aggregate honest sessions against the finite-size bound (proxy only)
honest = [run_session(replace(config, seed=session_seed(9, i)), AttackStrategy.none(), pool)
          for i in range(50)]
report = aggregate_sessions(honest, LZ78Model(), delta=0.05)
print(f"bad frequency {report.empirical_bad_frequency} vs bound {report.bound:.3g}")
print(report.caveat)
