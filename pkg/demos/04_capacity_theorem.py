"""Can a K-way cache mimic a smaller fully associative one?

If you give a K-way cache twice the slots (C' >= 2C), the probability that
some set overflows when storing any fixed C items is union-bounded by
(C'/k) * exp(-k/6).  The Monte-Carlo trials below hash C fresh random keys
into C'/k sets and check that no set receives more than k of them; the
empirical failure rate sits far below the closed-form bound, which itself
collapses as associativity grows.
"""
from kwaycache import balls_in_bins, theorem_failure_bound

print("C' = 2C with C'/k sets; 300 trials per row")
print(f"{'k':>4} {'C_prime':>9} {'C':>8} {'bound':>12} {'empirical fail':>15}")
for k in (16, 32, 64, 128):
    c_prime = 3125 * k            # keep the set count constant at 3125
    c = c_prime // 2
    bound = theorem_failure_bound(c_prime, c, k)
    frac = balls_in_bins(c_prime, k, c, trials=300, seed=k)
    print(f"{k:>4} {c_prime:>9} {c:>8} {bound:>12.6f} {1 - frac:>15.6f}")

print()
print("headline instantiations:")
f1 = balls_in_bins(200_000, 64, 100_000, trials=1000, seed=1)
print(f"  64-way, 200k slots, any 100k items: success {f1:.4f} (over 99%)")
f2 = balls_in_bins(2**21, 128, 2**20, trials=100, seed=2)
print(f"  128-way, 2M slots, any 1M items:    success {f2:.4f} (over 99.999%)")
