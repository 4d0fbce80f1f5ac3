"""How often does a random test set hide a high error rate in the info half?"""

from algoqkd.analysis import sampling_tail_mc

# small N, where the bad event actually happens
small = sampling_tail_mc(60, 0.05, 0.1, trials=50_000, seed=0)
print(f"N=60:  worst frequency {small.joint_frequency:.4f} at weight {small.worst_weight}, "
      f"Hoeffding {small.hoeffding_bound:.4f}")

# the largest frequencies sit in the band where both halves straddle the thresholds
for row in small.sweep:
    if row["hits"]:
        print(f"  weight {row['weight']:3d}: {row['frequency']:.4f} +- {row['standard_error']:.4f}")

large = sampling_tail_mc(500, 0.05, 0.1, trials=100_000, seed=0)
print(f"N=500: worst frequency {large.joint_frequency:.5f}, Hoeffding {large.hoeffding_bound:.5f}")
