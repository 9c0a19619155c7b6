"""Time the hot kernels under the numba and numpy backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs once per backend as warm-up (this is where numba
compiles), then ``--repeat`` timed runs; the best time is reported.
Results of the two backends are cross-checked before timing.
"""
import argparse
import time

import numpy as np

from apptemp import kernels
from apptemp._accel import USE_NUMBA
from apptemp.dynamics import (CollisionSpec, _level_phases, _propagators, _schedule, _vec,
                              collision_kraus, dicke_liouvillian)
from apptemp.experiments import DEFAULTS, collisional_specs
from apptemp.models import bosonic_mode, phaseonium


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    """(name, callable(backend)) pairs at the sizes the experiments use."""
    # RK4 on the N = 4 collective generator (256 x 256 superoperator)
    L = dicke_liouvillian(4, 1.0, 1.0, 0.5, mode="collective")
    M = np.ascontiguousarray(L.superoperator)
    v0 = np.zeros(M.shape[0], complex)
    v0[0] = 1
    yield "rk4_integrate N=4, 2000 steps", lambda b: kernels.rk4_integrate(M, v0, 1e-3, 2000, 100, backend=b)

    # per-collision maps of the qubit verification suite
    p = DEFAULTS["collisional-verify"]
    make, thermal, _ = collisional_specs(p, 0)
    spec = make(thermal, True, 0)
    rng = np.random.default_rng(0)
    starts, taus, phases = _schedule(spec, 10_000, rng)
    U = _propagators(spec.total_hamiltonian(), taus)
    eS, vS = spec.H_S.eigh()
    pre = np.einsum("ij,nj,kj->nik", vS, np.exp(-1j * np.outer(starts, eS)), vS.conj())
    post = np.einsum("ij,nj,kj->nik", vS, np.exp(1j * np.outer(starts + taus, eS)), vS.conj())
    ups = _level_phases(spec.H_R, phases)
    anc = ups @ spec.rho_R.data @ ups.conj().transpose(0, 2, 1)
    yield "collision_superops 1e4 qubit collisions", \
        lambda b: kernels.collision_superops(U, anc, pre, post, 2, 2, backend=b)

    M4 = kernels.collision_superops(U, anc, pre, post, 2, 2, backend="numpy")
    yield "superop_sweep 1e4 maps", lambda b: kernels.superop_sweep(M4, _vec(np.eye(2) / 2), backend=b)

    # cavity pumped by Lambda atoms, n_fock = 30
    ph = DEFAULTS["phaseonium-equilibration"]
    lam_model, rho_R = phaseonium(ph["rho_aa"], ph["rho_bb"], ph["rho_cc"], 0.0)
    mode = bosonic_mode(1.0, 30)
    tau = ph["omega_tau"]
    cs = CollisionSpec(mode.H, lam_model.H, mode.couplings[0], lam_model.couplings[0],
                       ph["lam_tau"] / tau, tau, 1 / (2 * tau), rho_R, phase_randomization=False)
    K = collision_kraus(cs)
    rho0 = np.zeros((30, 30), complex)
    rho0[0, 0] = 1
    yield "kraus_sweep n_fock=30, 6000 collisions", lambda b: kernels.kraus_sweep(K, rho0, 6000, 100, backend=b)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    # the env flag limits the run to numpy; explicit backend requests would bypass it
    names = kernels.backends() if USE_NUMBA else ("numpy",)
    print(f"backends: {', '.join(names)}")
    print(f"{'kernel':42s}" + "".join(f"{b:>12s}" for b in names) + ("     speedup" if len(names) > 1 else ""))
    for name, fn in cases():
        outs = {b: fn(b) for b in names}          # warm-up and cross-check
        if len(names) > 1:
            a, b = (np.asarray(o) for o in outs.values())
            err = float(np.max(np.abs(a - b)))
            if err > 1e-9:
                raise SystemExit(f"{name}: backends disagree by {err:.3e}")
        times = {b: _best(lambda: fn(b), args.repeat) for b in names}
        line = f"{name:42s}" + "".join(f"{times[b] * 1e3:10.2f}ms" for b in names)
        if len(names) > 1:
            line += f"{times['numpy'] / times['numba']:11.2f}x"
        print(line)


if __name__ == "__main__":
    main()
