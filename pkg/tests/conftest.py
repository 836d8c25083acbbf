"""Shared helpers plus the acceptance summary printed after a run."""

import numpy as np
from scipy.optimize import linprog

ACCEPTANCE_FILE = "test_acceptance.py"

CRITERION_TITLES = {
    "test_criterion_1_table_values": "criterion 1: closed-form table reproduction",
    "test_criterion_2_ordering_reversal": "criterion 2: divergence/transport ordering reversal",
    "test_criterion_3_cluster_recovery": "criterion 3: benchmark cluster recovery over 20 seeds",
    "test_criterion_4_boundary_behavior": "criterion 4: comonotone boundary behavior",
    "test_criterion_5_emd_exactness": "criterion 5: emd matches the LP oracle",
    "test_criterion_6_property_suites": "criterion 6: randomized property suites",
    "test_criterion_7_cli_determinism": "criterion 7: cli byte determinism",
}


def random_correlation(rng, dim, ridge=0.5):
    """Random strictly positive definite correlation matrix."""
    a = rng.normal(size=(dim, dim))
    cov = a @ a.T + ridge * dim * np.eye(dim)
    scale = np.sqrt(np.diag(cov))
    corr = cov / np.outer(scale, scale)
    corr = (corr + corr.T) / 2.0
    np.fill_diagonal(corr, 1.0)
    return corr


def random_spd(rng, dim, log_cond=2.0):
    """Random SPD matrix with eigenvalues spread over ~10**log_cond."""
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    eigs = 10.0 ** rng.uniform(-log_cond / 2, log_cond / 2, size=dim)
    mat = (q * eigs) @ q.T
    return (mat + mat.T) / 2.0


def random_histogram(rng, bins, dim):
    """Random histogram on a bins**dim grid; some cells are exactly zero."""
    mass = rng.random(bins**dim)
    mass[rng.random(mass.shape) < 0.3] = 0.0
    if mass.sum() == 0.0:
        mass[0] = 1.0
    return mass / mass.sum()


def lp_emd_reference(h1, h2, ground="euclidean"):
    """Earth mover's distance by linear programming, for cross-checking.

    Solves the transport problem over the support cells of the two
    histograms with scipy's HiGHS backend. Deliberately shares no code
    with the flow solver under test beyond the histogram accessors.
    """
    shape = (h1.bins_per_axis,) * h1.dim
    src = np.flatnonzero(h1.mass > 0.0)
    dst = np.flatnonzero(h2.mass > 0.0)
    pa = (np.stack(np.unravel_index(src, shape), axis=-1) + 0.5) / h1.bins_per_axis
    pb = (np.stack(np.unravel_index(dst, shape), axis=-1) + 0.5) / h2.bins_per_axis
    diff = pa[:, None, :] - pb[None, :, :]
    if ground == "euclidean":
        cost = np.sqrt((diff**2).sum(axis=2))
    else:
        cost = np.abs(diff).sum(axis=2)
    m, n = cost.shape
    a_eq = np.zeros((m + n, m * n))
    for i in range(m):
        a_eq[i, i * n : (i + 1) * n] = 1.0
    for j in range(n):
        a_eq[m + j, j::n] = 1.0
    b_eq = np.concatenate([h1.mass[src], h2.mass[dst]])
    result = linprog(cost.ravel(), A_eq=a_eq, b_eq=b_eq, method="highs")
    assert result.status == 0, result.message
    return float(result.fun)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion."""
    outcomes = {}
    for status, ok in (("passed", True), ("failed", False), ("error", False)):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if ACCEPTANCE_FILE not in nodeid:
                continue
            base = nodeid.split("::")[-1].split("[")[0]
            outcomes[base] = outcomes.get(base, True) and ok
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for base in sorted(outcomes):
        title = CRITERION_TITLES.get(base, base)
        verdict = "PASS" if outcomes[base] else "FAIL"
        terminalreporter.write_line(f"{verdict}  {title}")
