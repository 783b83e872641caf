"""
Two-state interpolation: scaling regime, rotation regime, and the crossover
===========================================================================

A positive-semidefinite Hermitian matrix can be carried from one endpoint to
another by a combination of eigenvector rotation (a skew-Hermitian generator
X) and eigenvalue drift (a commuting Hermitian rate Z).  The cost of a
constant-control path is ||X|| + epsilon * ||Z||, so the weight epsilon
decides which mechanism is cheaper.

This script walks the 2x2 example whose optimum switches abruptly:

  rho0 = diag(1, 0)   ->   rho1 = diag(0, 1)

* cheap scaling (small epsilon): keep the frame fixed and fade the
  eigenvalues through each other (Z = diag(-1, 1), X = 0),
* cheap rotation (large epsilon): keep the spectrum fixed and rotate the
  eigenvectors by a quarter turn (||X|| = pi/sqrt(2), Z = 0),
* the two costs tie at epsilon = pi/2, where the optimizer jumps from one
  branch to the other.
"""

import numpy as np

from denflow import sample_path, solve_geodesic

rho0 = np.diag([1.0, 0.0]).astype(complex)
rho1 = np.diag([0.0, 1.0]).astype(complex)

# ----------------------------------------------------------------------------
# Small epsilon: eigenvalue drift is nearly free, so the solver fades the
# spectrum and leaves the eigenvectors alone.
# ----------------------------------------------------------------------------
sol = solve_geodesic(rho0, rho1, epsilon=0.1)
print("epsilon = 0.1 (scaling regime)")
print("  ||X|| =", np.linalg.norm(sol.X))
print("  Z     =", np.round(sol.Z.real, 12).tolist())
print("  cost  =", sol.cost_total)

# Along the fade the state stays diagonal and the eigenvalues move linearly:
# lambda(t) = (1 - t, t).  At t = 1/2 the matrix passes through I/2.
mid = sample_path(sol, rho0, np.array([0.5]))[0]
print("  state at t = 1/2 ->", np.round(mid.real, 12).tolist())

# ----------------------------------------------------------------------------
# Large epsilon: drift is expensive, so the solver swaps the eigenvectors by
# rotating a quarter turn instead.  The spectrum {0, 1} never changes, which
# keeps the path on the PSD boundary (min eigenvalue identically 0).
# ----------------------------------------------------------------------------
sol = solve_geodesic(rho0, rho1, epsilon=10.0)
print("\nepsilon = 10 (rotation regime)")
print("  ||X||      =", np.linalg.norm(sol.X), " (pi/sqrt(2) =", np.pi / np.sqrt(2), ")")
print("  ||Z||      =", np.linalg.norm(sol.Z))
print("  cost       =", sol.cost_total)

ts = np.linspace(0.0, 1.0, 11)
path = sample_path(sol, rho0, ts)
min_eigs = [np.linalg.eigvalsh(state).min() for state in path]
print("  min eigenvalue along the path:", np.round(min_eigs, 12).tolist())

# ----------------------------------------------------------------------------
# The crossover: scan epsilon and watch the optimizer switch branches.  The
# fade costs epsilon * ||diag(-1, 1)|| = epsilon * sqrt(2); the quarter turn
# costs pi/sqrt(2).  They tie at epsilon = pi/2 ~ 1.5708.
# ----------------------------------------------------------------------------
print("\nepsilon scan (branch switch at pi/2 = %.6f):" % (np.pi / 2))
print("  %8s  %10s  %10s  %10s" % ("epsilon", "||X||", "||Z||", "cost"))
for eps in [1.0, 1.4, 1.5, 1.55, 1.6, 1.7, 2.0]:
    sol = solve_geodesic(rho0, rho1, epsilon=eps)
    print(
        "  %8.3f  %10.6f  %10.6f  %10.6f"
        % (eps, np.linalg.norm(sol.X), np.linalg.norm(sol.Z), sol.cost_total)
    )
