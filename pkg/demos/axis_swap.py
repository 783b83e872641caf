"""
Swapping two eigenvalue axes of a 3x3 density-like matrix
=========================================================

With three distinct eigenvalues there is more than one way to exchange two
eigenvector axes by a rotation.  A half turn about the bisector of the two
axes swaps them while fixing the third axis pointwise -- the "obvious" move,
with generator norm pi * sqrt(2) -- but a quarter turn through the third
axis also realizes the swap, at the smaller norm pi / sqrt(2).  The cheaper
branch flips the sign of the third axis, which is invisible at the level of
the matrix because eigenvector signs are not observable.

This script checks both rotations against the solver on

  rho0 = diag(1, 2, 3)   ->   rho1 = diag(2, 1, 3) (axes 1 and 2 swapped)

at a large epsilon so the spectrum is held fixed.
"""

import numpy as np

from denflow import expm_skew, sample_path, solve_geodesic

rho0 = np.diag([1.0, 2.0, 3.0]).astype(complex)
rho1 = np.diag([2.0, 1.0, 3.0]).astype(complex)

# ----------------------------------------------------------------------------
# Candidate 1: the half turn about (e1 + e2)/sqrt(2).  Its generator is
#     X = a * [[0, 0, 1], [0, 0, -1], [-1, 1, 0]]   with a = pi / sqrt(2),
# which exponentiates to the permutation-like reflection swapping e1 and e2.
# Norm: ||X|| = a * 2 = pi * sqrt(2).
# ----------------------------------------------------------------------------
a = np.pi / np.sqrt(2.0)
X_half = a * np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [-1.0, 1.0, 0.0]], dtype=complex)
U = expm_skew(X_half)
swapped = U @ rho0 @ U.conj().T
print("half-turn candidate:")
print("  ||X||               =", np.linalg.norm(X_half), " (pi*sqrt(2) =", np.pi * np.sqrt(2), ")")
print("  ||U rho0 U* - rho1|| =", np.linalg.norm(swapped - rho1))

# ----------------------------------------------------------------------------
# Candidate 2: a quarter turn.  Rotating by 90 degrees in the (e1, e2) plane
# sends e1 -> e2 and e2 -> -e1; the sign on -e1 cancels in U rho0 U*.  Its
# generator is
#     X = (pi/2) * [[0, -1, 0], [1, 0, 0], [0, 0, 0]],   ||X|| = pi/sqrt(2).
# Same endpoint, half the norm.
# ----------------------------------------------------------------------------
X_quarter = (np.pi / 2.0) * np.array(
    [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]], dtype=complex
)
U = expm_skew(X_quarter)
swapped = U @ rho0 @ U.conj().T
print("\nquarter-turn candidate:")
print("  ||X||               =", np.linalg.norm(X_quarter), " (pi/sqrt(2) =", np.pi / np.sqrt(2), ")")
print("  ||U rho0 U* - rho1|| =", np.linalg.norm(swapped - rho1))

# ----------------------------------------------------------------------------
# The solver finds the cheaper branch.  At epsilon = 50 any eigenvalue drift
# is prohibitively expensive, so the answer is a pure rotation and its cost
# equals ||X||.
# ----------------------------------------------------------------------------
sol = solve_geodesic(rho0, rho1, epsilon=50.0)
print("\nsolver at epsilon = 50:")
print("  ||X|| =", np.linalg.norm(sol.X))
print("  ||Z|| =", np.linalg.norm(sol.Z))
print("  cost  =", sol.cost_total)

# The interpolated path keeps the spectrum {1, 2, 3} at every instant.
ts = np.linspace(0.0, 1.0, 5)
for t, state in zip(ts, sample_path(sol, rho0, ts)):
    print("  t = %.2f  eigenvalues = %s" % (t, np.round(np.linalg.eigvalsh(state), 9).tolist()))
