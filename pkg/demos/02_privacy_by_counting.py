"""Checking privacy by brute force.

On a field with three elements everything is small enough to enumerate:
all point functions of both users and all randomness of the encoder. The
verifier counts how often each (secret, observed shares) pair shows up and
tests whether the table factorizes.
"""

from dmupf import AccessStructure, GF, adversarial_params, exhaustive_privacy, param_sample
from dmupf.dmuss import param_validate

ctx = GF(3)
acc = AccessStructure(3, ((1, 2), (2, 3)))
T = 2

good = param_sample(acc, (1, 1), ctx, 0)
rep = exhaustive_privacy(good, T)
for p in rep.pairs:
    print(f"user {p.k + 1} seen by user {p.observer + 1}: "
          f"{p.states} states, MI = {0 if p.independent else p.mi_bits}")

# Now ask for more than the bounds allow: user 1 wants 2 symbols but only
# owns one server the other user cannot see. Any decodable choice of points
# leaks.
bad = adversarial_params(acc, (2, 1), ctx)
print(param_validate(acc, (2, 1), bad).to_dict())
for p in exhaustive_privacy(bad, T).pairs:
    print(f"user {p.k + 1} seen by user {p.observer + 1}: MI = {p.mi_bits:.4f} bits")
