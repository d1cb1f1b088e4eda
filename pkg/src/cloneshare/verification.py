"""Self-checks run by ``cloneshare verify``: every closed form against its oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import entanglement as ent
from .cloning import (
    CloningParams,
    CoefficientSet,
    NamedPair,
    coefficient_set,
    brute_force_reduced,
    global_output_state,
    perturbed,
    reduced_state,
    verify_reduced_against_global,
)
from .protocol import (
    alice_measure,
    discrimination_operators,
    expected_conditional,
    shared_state,
    shared_state_brute_force,
    success_probability,
    success_probability_traces,
    unconditioned_marginals,
)
from .states import SchmidtSpectrum, concurrence_pure, werner_decompose

# the brute-force reduced state at lambda = (1/2, 1/2), c^2 = 2/3
WERNER_POINT = np.array(
    [
        [13 / 36, 0, 0, 4 / 18],
        [0, 5 / 36, 0, 0],
        [0, 0, 5 / 36, 0],
        [4 / 18, 0, 0, 13 / 36],
    ]
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_residual: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"{status}  {self.name:<26} max_residual={self.max_residual:.3e}{extra}"


CoefficientHook = Callable[[CloningParams], CoefficientSet]


def random_points(k: int, n: int, rng: np.random.Generator):
    for _ in range(n):
        lam = rng.dirichlet(np.ones(k))
        c2 = rng.uniform(0.02, 1.0)
        yield SchmidtSpectrum(lam), CloningParams.from_c_squared(c2, k)


def check_werner_point(tol: float, coeffs: CoefficientHook) -> CheckResult:
    s = SchmidtSpectrum((0.5, 0.5))
    p = CloningParams.universal()
    brute = brute_force_reduced(global_output_state(s, p), 2, NamedPair.NONLOCAL_14)
    closed = shared_state(0, p).rho
    closed_hooked = reduced_state(s, p, NamedPair.NONLOCAL_14, coeffs(p))
    res = max(
        np.max(np.abs(brute - WERNER_POINT)),
        np.max(np.abs(closed - WERNER_POINT)),
        np.max(np.abs(closed_hooked - WERNER_POINT)),
    )
    fit = werner_decompose(brute, tol)
    ok = res <= tol and fit.visibility is not None and abs(fit.visibility - 4 / 9) <= tol
    return CheckResult("werner_point", bool(ok), float(res), f"p={fit.best_p:.12g}")


def check_oracle(k: int, n: int, tol: float, coeffs: CoefficientHook, seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for s, p in random_points(k, n, rng):
        for pair in NamedPair:
            r = verify_reduced_against_global(s, p, pair, tol, coeffs(p))
            worst = max(worst, r.max_residual)
    return CheckResult(f"closed_form_oracle_k{k}", worst <= tol, worst, f"points={n} pairs=4")


def check_witness_identity(n: int, tol: float, coeffs: CoefficientHook, seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for s, p in random_points(2, n, rng):
        rho = reduced_state(s, p, NamedPair.NONLOCAL_14, coeffs(p))
        worst = max(worst, abs(ent.witness_value(ent.W1, rho) - ent.witness_closed_form(s, p)))
    return CheckResult("witness_identity", worst <= tol, worst, f"points={n}")


def threshold_grid(n_c: int = 50, n_lambda: int = 50):
    """``c`` on ``(1/sqrt3, 1]`` and ``lambda1`` on ``(0, 1)``, both excluding the open ends."""
    c_lo = 1.0 / np.sqrt(3.0)
    cs = c_lo + (1.0 - c_lo) * np.arange(1, n_c + 1) / n_c
    lams = np.arange(1, n_lambda + 1) / (n_lambda + 1)
    return cs, lams


def threshold_disagreements(coeffs: CoefficientHook | None = None, n: int = 50):
    """Count (disagreements, boundary points, total) for the PPT-vs-threshold check."""
    cs, lams = threshold_grid(n, n)
    bad = boundary = 0
    for c in cs:
        p = CloningParams.from_c(c)
        crit = ent.critical_concurrence(c).critical_concurrence
        for lam in lams:
            s = SchmidtSpectrum.qubits(lam)
            rho = reduced_state(s, p, NamedPair.NONLOCAL_14, coeffs(p) if coeffs else None)
            verdict = ent.classify(rho)
            if verdict is ent.Verdict.BOUNDARY:
                boundary += 1
                continue
            if (verdict is ent.Verdict.ENTANGLED) != (concurrence_pure(s) > crit):
                bad += 1
    return bad, boundary, len(cs) * len(lams)


def check_threshold(coeffs: CoefficientHook) -> CheckResult:
    bad, boundary, total = threshold_disagreements(coeffs)
    return CheckResult(
        "critical_concurrence", bad == 0, float(bad), f"grid={total} boundary={boundary} disagreements={bad}"
    )


def check_success_probability(tol: float, hermitized: bool) -> CheckResult:
    worst = 0.0
    for c2 in np.linspace(0.0, 1.0, 41)[1:]:
        p = CloningParams.from_c_squared(c2)
        worst = max(worst, abs(success_probability(p) - success_probability_traces(p, hermitized)))
        worst = max(worst, abs(success_probability(p) - coefficient_set(p).Q))
    endpoints = abs(success_probability(CloningParams.universal()) - 4 / 9)
    endpoints = max(endpoints, success_probability(CloningParams.wootters_zurek()))
    res = max(worst, endpoints)
    return CheckResult("success_probability", res <= tol, res)


def check_trace_table(tol: float, hermitized: bool) -> CheckResult:
    worst = 0.0
    for c2 in np.linspace(0.0, 1.0, 21)[1:]:
        p = CloningParams.from_c_squared(c2)
        Q = coefficient_set(p).Q
        ops = discrimination_operators(Q, hermitized)
        for alice_bit in (0, 1):
            _, plus = alice_measure(shared_state(0, p), outcome=alice_bit)
            _, minus = alice_measure(shared_state(1, p), outcome=alice_bit)
            sgn = 1 - 2 * alice_bit
            worst = max(worst, np.max(np.abs(plus.rho - expected_conditional(Q, sgn))))
            worst = max(worst, np.max(np.abs(minus.rho - expected_conditional(Q, -sgn))))
            # E1 fires on the (I + Q sigma_x)/2 branch only
            hit, miss = (plus, minus) if alice_bit == 0 else (minus, plus)
            w_hit, w_miss = ops.weights(hit.rho), ops.weights(miss.rho)
            worst = max(worst, abs(w_hit[0] - Q), abs(w_hit[1]), abs(w_miss[0]), abs(w_miss[1] - Q))
    return CheckResult("discrimination_traces", worst <= tol, float(worst))


def check_sign_propagation(tol: float) -> CheckResult:
    worst = 0.0
    for c2 in np.linspace(0.0, 1.0, 21)[1:]:
        p = CloningParams.from_c_squared(c2)
        for bit in (0, 1):
            for pair in (NamedPair.NONLOCAL_14, NamedPair.NONLOCAL_23):
                brute = shared_state_brute_force(bit, p, pair)
                worst = max(worst, np.max(np.abs(brute - shared_state(bit, p).rho)))
    return CheckResult("shared_state_sign", worst <= tol, float(worst))


def check_unreadability(tol: float) -> CheckResult:
    worst = 0.0
    half = np.eye(2) / 2
    for c2 in np.linspace(0.0, 1.0, 21)[1:]:
        p = CloningParams.from_c_squared(c2)
        for bit in (0, 1):
            a, b = unconditioned_marginals(shared_state(bit, p))
            worst = max(worst, np.max(np.abs(a - half)), np.max(np.abs(b - half)))
    return CheckResult("unreadability", worst <= tol, float(worst))


def run_all(
    tol: float = 1e-10,
    k: int | None = None,
    hermitized: bool = False,
    inject_fault: bool = False,
    seed: int = 20240611,
) -> list[CheckResult]:
    """Run the full suite. ``inject_fault`` shifts ``Q`` by 1e-3 in every closed form under test."""
    if inject_fault:
        coeffs: CoefficientHook = lambda p: perturbed(coefficient_set(p), "Q", 1e-3)  # noqa: E731
    else:
        coeffs = coefficient_set
    results = [
        check_werner_point(tol, coeffs),
        check_oracle(2, 50, tol, coeffs, seed),
    ]
    if k is not None and k != 2:
        results.append(check_oracle(k, 10, tol, coeffs, seed + 1))
    results += [
        check_witness_identity(100, tol, coeffs, seed + 2),
        check_threshold(coeffs),
        check_success_probability(max(tol, 1e-12), hermitized),
        check_trace_table(tol, hermitized),
        check_sign_propagation(tol),
        check_unreadability(min(tol, 1e-12)),
    ]
    return results
