"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``CRITERION n: PASS|FAIL`` line (visible under
``pytest -v -s`` and in the captured output of failures) before asserting.
"""

import json
import math
import time

import numpy as np
import pytest
from scipy import integrate, stats

from femtoflow import RadioParams, SystemParams, cli, efficiency, markov, mcsim, phy, solve, traffic
from femtoflow.mcsim import SimConfig

from _oracle import erlang_b_sum

LAMBDA_T = np.linspace(0.65, 1.5, 12)
MS = (4, 6, 8)


def report(capsys, n, ok, detail):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    with capsys.disabled():
        print("\n" + line)
    return line


@pytest.fixture(scope="module")
def blocking_sweep():
    out = {}
    for M in MS:
        out[M] = [solve(SystemParams.baseline(M=M, lambda_T=float(lt))) for lt in LAMBDA_T]
    return out


def test_criterion_01_product_form(capsys):
    rng = np.random.default_rng(20240101)
    start = time.perf_counter()
    worst = 0.0
    for n_f in range(0, 9):
        for n_f_o in range(0, n_f + 1):
            for _ in range(20):
                rates = 10.0 ** rng.uniform(-2, 2, 4)
                a = markov.stationary_product_form(*rates, n_f, n_f_o)
                b = markov.stationary_direct_solve(*rates, n_f, n_f_o)
                worst = max(worst, float(np.max(np.abs(a.probabilities - b.probabilities))))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and elapsed < 10
    line = report(capsys, 1, ok, f"max abs error {worst:.2e}, {elapsed:.2f} s")
    assert ok, line


def test_criterion_02_erlang_b(capsys):
    worst = 0.0
    for t in np.geomspace(0.1, 100, 60):
        for n in range(0, 201):
            a, b = traffic.erlang_b(float(t), n), erlang_b_sum(float(t), n)
            # Both sides underflow to exactly 0.0 deep in the tail.
            worst = max(worst, 0.0 if a == b else abs(a - b) / b)
    edges = all(traffic.erlang_b(0.0, n) == 0.0 for n in range(1, 201)) and all(
        traffic.erlang_b(float(t), 0) == 1.0 for t in np.geomspace(0.1, 100, 20)
    )
    ok = worst < 1e-12 and edges
    line = report(capsys, 2, ok, f"max relative error {worst:.2e}, boundary identities {edges}")
    assert ok, line


def test_criterion_03_fixed_point(capsys, blocking_sweep):
    sols = [s for M in MS for s in blocking_sweep[M]]
    worst_res = max(s.residual for s in sols)
    worst_it = max(s.iterations for s in sols)
    ok = worst_res < 1e-10 and worst_it < 1000 and len(LAMBDA_T) >= 10
    line = report(capsys, 3, ok, f"{len(sols)} points, max residual {worst_res:.1e}, max iterations {worst_it}")
    assert ok, line


def test_criterion_04_blocking_trends(capsys, blocking_sweep):
    arr = {M: np.array([s.blocking.as_tuple() for s in blocking_sweep[M]]) for M in MS}
    checks = {}
    for k, name in enumerate(("P_FU_F", "P_MU_F", "P_U_M")):
        checks[f"{name} increasing in lambda_T"] = all(np.all(np.diff(arr[M][:, k]) > 0) for M in MS)
    checks["P_U_M decreasing in M"] = all(np.all(arr[a][:, 2] > arr[b][:, 2]) for a, b in zip(MS, MS[1:]))
    checks["P_FU_F increasing in M"] = all(np.all(arr[a][:, 0] < arr[b][:, 0]) for a, b in zip(MS, MS[1:]))
    checks["P_MU_F increasing in M"] = all(np.all(arr[a][:, 1] < arr[b][:, 1]) for a, b in zip(MS, MS[1:]))
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    line = report(capsys, 4, ok, f"{len(checks)} direction checks" + (f", failed: {failed}" if failed else ""))
    assert ok, line


def test_criterion_05_chain_simulation(capsys):
    start = time.perf_counter()
    rates = solve(SystemParams.baseline(M=4, lambda_T=1.0)).rates
    args = (rates.lambda_1, rates.lambda_2, rates.mu_1, rates.mu_2)
    details, ok = [], True
    for split in [(3, 1), (6, 3)]:
        sim = mcsim.simulate_chain(*args, *split, SimConfig(horizon=100_000, replications=10, seed=5))
        exact = markov.stationary_product_form(*args, *split)
        tv = 0.5 * float(np.abs(sim.dist.probabilities - exact.probabilities).sum())
        p_fu, p_mu = markov.blocking_femto_user(exact), markov.blocking_macro_user_in_femto(exact)
        good = tv < 0.01 and sim.p_fu_f.covers(p_fu) and sim.p_mu_f.covers(p_mu)
        ok &= good
        details.append(f"{split}: TV {tv:.4f}, FU {sim.p_fu_f.point:.2e}~{p_fu:.2e}, MU {sim.p_mu_f.point:.2e}~{p_mu:.2e}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    line = report(capsys, 5, ok, "; ".join(details) + f"; {elapsed:.1f} s")
    assert ok, line


def test_criterion_06_system_simulation(capsys):
    start = time.perf_counter()
    p = SystemParams.baseline(M=4, lambda_T=1.0)
    sol = solve(p)
    est = mcsim.simulate_system(p, SimConfig(horizon=100_000, unit="seconds", replications=20, seed=6), sol)
    names = ("P_FU_F", "P_MU_F", "P_U_M")
    flags = [mcsim.agrees(e, a) for e, a in zip(est, sol.blocking.as_tuple())]
    elapsed = time.perf_counter() - start
    ok = all(flags) and elapsed < 300
    detail = ", ".join(
        f"{n} {e.point:.4f}+-{e.ci_half_width:.4f} vs {a:.4f}"
        for n, e, a in zip(names, est, sol.blocking.as_tuple())
    )
    line = report(capsys, 6, ok, f"{detail}; {elapsed:.1f} s")
    assert ok, line


def test_criterion_07_capacity_cross_oracle(capsys):
    radio = RadioParams()
    p = SystemParams.baseline(M=4, lambda_T=1.0, N=25, N_F=6, N_F_O=3)
    sol = solve(p)
    rep = efficiency(p, radio, sol, mc=20_000, seed=7)
    sim = mcsim.simulate_capacity(p, radio, sol, SimConfig(horizon=100_000, replications=10, seed=7), 4096)
    half = 1.96 * rep.capacity.std_error
    lo, hi = sim.c_total.interval
    overlap = lo <= rep.capacity.c_total + half and rep.capacity.c_total - half <= hi

    # Interference-free single cell against quadrature.
    q = SystemParams.baseline(N=1, N_F=6, N_F_O=3)
    r0 = radio.replace(sigma_dB=0.0)
    z = 10 ** (r0.Z_shadowing_dB / 10)
    p_c, p_o = 0.25, 0.05

    def channel(p_occ):
        f = lambda L: r0.B_W * math.log2(1 + p_occ * r0.PW_v * z / (r0.n_0 * L * L)) * 2 * L / (q.R_F**2 - r0.R_p**2)
        return integrate.quad(f, r0.R_p, q.R_F)[0]

    exact = 3 * channel(p_c) + 3 * channel(p_o)
    est = phy.estimate_capacity(q, r0, p_c, p_o, samples=20_000, seed=7)
    quad_ok = abs(est.c_total - exact) < 3 * est.std_error
    ok = overlap and quad_ok
    line = report(
        capsys, 7, ok,
        f"phy {rep.capacity.c_total:.4e}+-{half:.2e} vs sim {sim.c_total.point:.4e}+-{sim.c_total.ci_half_width:.2e}; "
        f"quadrature gap {abs(est.c_total - exact) / est.std_error:.2f} SE",
    )
    assert ok, line


def _pipeline(**kw):
    radio = RadioParams()
    base = dict(M=4, lambda_T=1.0, N=25, N_F=6, N_F_O=3)
    base.update(kw)
    p = SystemParams.baseline(**base)
    rep = efficiency(p, radio, solve(p), mc=20_000, seed=8)  # same seed: common random numbers
    return rep.capacity.c_total, rep.bits_per_joule


def _increasing(x):
    return bool(np.all(np.diff(x) > 0))


def _decreasing(x):
    return bool(np.all(np.diff(x) < 0))


def test_criterion_08_efficiency_trends(capsys):
    Ms, Ns = (2, 4, 6, 8), (25, 30)
    grid = {(M, N): _pipeline(M=M, N=N) for M in Ms for N in Ns}
    cap = {N: [grid[(M, N)][0] for M in Ms] for N in Ns}
    bpj = {N: [grid[(M, N)][1] for M in Ms] for N in Ns}
    closed = {N: [_pipeline(N=N, N_F=3 + c) for c in range(1, 6)] for N in Ns}
    opened = [_pipeline(N=25, N_F=2 + o, N_F_O=o) for o in range(1, 7)]

    checks = {
        "capacity increasing in M": all(_increasing(cap[N]) for N in Ns),
        "capacity decreasing in N": all(cap[25][k] > cap[30][k] for k in range(len(Ms))),
        "bits_per_joule increasing in M": all(_increasing(bpj[N]) for N in Ns),
        "bits_per_joule increasing in N": all(bpj[25][k] < bpj[30][k] for k in range(len(Ms))),
        "capacity increasing in closed channels": all(_increasing([c for c, _ in closed[N]]) for N in Ns),
        "bits_per_joule decreasing in closed channels": all(_decreasing([b for _, b in closed[N]]) for N in Ns),
        "capacity increasing in open channels": _increasing([c for c, _ in opened]),
        "bits_per_joule decreasing in open channels": _decreasing([b for _, b in opened]),
    }
    with capsys.disabled():
        for name, good in checks.items():
            print(f"\n  8/{name}: {'pass' if good else 'FAIL'}")
    failed = [k for k, v in checks.items() if not v]
    ok = not failed
    line = report(capsys, 8, ok, f"{len(checks) - len(failed)}/{len(checks)} directions hold"
                  + (f"; failed: {failed}" if failed else ""))
    assert ok, line


def test_criterion_09_determinism(capsys, tmp_path):
    cfg = {
        "seed": 1234,
        "mc": {"capacity_samples": 4000, "replications": 4, "system_horizon_s": 20_000, "chain_events": 20_000},
        "system": {"femto_channels": 6, "open_channels": 3, "n_femtocells": 25},
        "sweep": {"axis": "M", "values": [2, 4, 6], "mc": True},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg), encoding="utf-8")
    outputs = {}
    for cmd in ("sweep", "simulate"):
        for run in (1, 2):
            out = tmp_path / f"{cmd}{run}.out"
            assert cli.main([cmd, "--config", str(path), "--out", str(out)]) == 0
            outputs[(cmd, run)] = out.read_bytes()
    same = {cmd: outputs[(cmd, 1)] == outputs[(cmd, 2)] for cmd in ("sweep", "simulate")}
    ok = all(same.values())
    line = report(capsys, 9, ok, f"byte-identical: {same}")
    assert ok, line


def test_criterion_10_sampler_ks(capsys):
    R_M, R_p, R_F = 1000.0, 5.0, 20.0
    rng = np.random.default_rng(10)
    grid = np.linspace(0, 2 * R_M, 4001)
    table = np.concatenate([[0.0], np.cumsum([
        integrate.quad(lambda l: phy.pdf_inter_bs(l, R_M), a, b)[0] for a, b in zip(grid[:-1], grid[1:])
    ])])
    p_inter = stats.kstest(phy.sample_inter_bs(rng, R_M, 100_000), lambda x: np.interp(x, grid, table)).pvalue
    user_cdf = lambda x: (np.clip(x, R_p, R_F) ** 2 - R_p**2) / (R_F**2 - R_p**2)
    p_user = stats.kstest(phy.sample_user_distance(rng, R_p, R_F, 100_000), user_cdf).pvalue
    ok = p_inter > 0.01 and p_user > 0.01
    line = report(capsys, 10, ok, f"KS p-values: inter-BS {p_inter:.3f}, user distance {p_user:.3f}")
    assert ok, line
