"""Compare POD bases built in the four weighted inner products.

For each product the per-variable projection error of the training set is
reported as a function of the basis dimension, on both the non-dimensional
and the dimensional Sod configuration.  The punchline: the plain L2
product gives different bases on the two configurations (it adds
quantities with different units), while the non-dimensional and
entropy-based products give identical error curves on both.
"""

import numpy as np

from eulerrom import inner_products as ip, pod, problems

K_SWEEP = (5, 10, 20, 30)


def error_table(cfg, snapshots):
    mesh = cfg.mesh()
    table = {}
    for kind in ip.KINDS:
        spec = ip.spec_for_config(kind, cfg, snapshots)
        weight = ip.build_weight(spec, mesh)
        variables = ip.VARIABLES_FOR_KIND[kind]
        data = pod.snapshots_in_variables(snapshots.matrix, variables, cfg.gas(), mesh.ncomp)
        basis = pod.compute_pod(data, weight, max(K_SWEEP), variables)
        table[kind] = {
            k: pod.projection_error_by_variable(
                snapshots.matrix, pod.truncate(basis, k), weight, mesh.ncomp
            )
            for k in K_SWEEP
        }
    return table


results = {}
for dimensional in (False, True):
    cfg = problems.sod_desk(dimensional)
    label = "dimensional" if dimensional else "non-dimensional"
    print(f"running {label} Sod FOM ...")
    results[dimensional] = error_table(cfg, problems.run_fom(cfg))

print("\ndensity projection error by basis dimension")
print(f"{'product':<16}" + "".join(f"K={k:<11}" for k in K_SWEEP))
for kind in ip.KINDS:
    row = results[False][kind]
    print(f"{kind:<16}" + "".join(f"{row[k][0]:<12.3e}" for k in K_SWEEP))

print("\nmax relative difference between configurations (all variables, K=20):")
for kind in ip.KINDS:
    nd = results[False][kind][20]
    dim = results[True][kind][20]
    rel = np.abs(nd - dim).max() / np.abs(nd).max()
    tag = "dimensionally consistent" if rel < 1e-9 else "NOT consistent"
    print(f"  {kind:<16} {rel:.2e}   ({tag})")
