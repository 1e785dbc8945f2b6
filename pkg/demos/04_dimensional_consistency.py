"""Deploy the same ROM formulations on a dimensional configuration
(sea-level air, p ~ 1e5) and its non-dimensional twin, then compare.

A dimensionally-consistent formulation produces the same trajectory on
both once the dimensional one is rescaled by (rho, rho*a, rho*a^2)_inf.
The plain-L2 Galerkin ROM is the classic counterexample.
"""

import numpy as np

from eulerrom import inner_products as ip, metrics, pod, problems, rom

K = 15
runs = {}
for dimensional in (False, True):
    cfg = problems.sod_desk(dimensional)
    print(f"FOM on the {'dimensional' if dimensional else 'non-dimensional'} configuration")
    snapshots = problems.run_fom(cfg)
    ic = problems.initial_field(cfg)
    for name in ("gal_cons_l2", "gal_cons_l2star", "gal_ent_l2"):
        fmt = rom.FORMULATIONS[name]
        spec_ip = ip.spec_for_config(fmt.basis_ip, cfg, snapshots)
        weight = ip.build_weight(spec_ip, cfg.mesh())
        variables = ip.VARIABLES_FOR_KIND[fmt.basis_ip]
        data = pod.snapshots_in_variables(snapshots.matrix, variables, cfg.gas(), 3)
        basis = pod.compute_pod(data, weight, K, variables)
        spec = rom.build_rom_spec(name, basis, cfg, snapshots)
        runs.setdefault(name, {})[dimensional] = (
            rom.run_galerkin(spec, ic, cfg.n_steps), cfg
        )

print(f"\n{'formulation':<18} {'discrepancy':<12} verdict")
for name, pair in runs.items():
    traj_dim, cfg_dim = pair[True]
    traj_nd, _ = pair[False]
    disc = metrics.consistency_check(traj_dim, traj_nd, cfg_dim)
    verdict = "dimensionally consistent" if disc < 1e-6 else "NOT consistent"
    print(f"{name:<18} {disc:<12.2e} {verdict}")
