"""Run the Sod shock tube full-order model and look at the wave structure.

The desk-scale setup uses 200 cells on [-0.5, 0.5] with WENO5/Rusanov and
RK4 at CFL 0.25.  By the final time t = 0.25 the classic three-wave
pattern has formed: a left rarefaction, a contact, and a right shock.
"""

import numpy as np

from eulerrom import problems

cfg = problems.sod_desk()
print(f"Sod shock tube: {cfg.cells} cells, {cfg.n_steps} steps, dt = {cfg.dt:.2e}")

snapshots = problems.run_fom(cfg)
mesh = cfg.mesh()
x = mesh.centers(0)
rho = snapshots.matrix[: mesh.n_cells, -1]

print(f"collected {snapshots.n_snapshots} snapshots")
print(f"final density range: [{rho.min():.4f}, {rho.max():.4f}]")

# crude wave locations from the density gradient
jumps = np.argsort(np.abs(np.diff(rho)))[-3:]
print("strongest density gradients near x =", np.round(np.sort(x[jumps]), 3))

# a 60-column terminal sketch of the final density profile
levels = ((rho - rho.min()) / (rho.max() - rho.min()) * 20).astype(int)
for row in range(20, -1, -2):
    line = "".join("#" if lv >= row else " " for lv in levels[::4])
    print(f"{rho.min() + row / 20 * (rho.max() - rho.min()):5.2f} |{line}")
print("      " + "-" * (len(levels[::4]) + 1))
