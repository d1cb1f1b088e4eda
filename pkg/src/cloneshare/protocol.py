"""
The controlled secret-sharing round.

Charlie encodes a bit in ``|phi+->``, Cliff clones both qubits and forwards
qubits 1 and 4, Alice measures in the Hadamard basis and announces the
result, and Bob applies the three-outcome discrimination rule.

The discrimination operators in their literal form are neither Hermitian nor
positive, so no physical measurement realizes them. They are used here as
trace functionals: ``Tr(E rho)`` gives the outcome weights of a decision
rule. ``DiscriminationOperators.positivity`` reports the gap.
"""

from __future__ import annotations

import enum
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cloning import CloningParams, NamedPair, clone_both, coefficient_set, reduced_from_pure
from .linalg import I2, SIGMA_X, hermitian_eigenvalues, is_hermitian, partial_trace
from .states import _bit, bell_encode

PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
MINUS = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)
HADAMARD_BASIS = (PLUS, MINUS)

BLOCK_SIZE = 8192
Q_TOL = 1e-12


class Sign(enum.Enum):
    PLUS = "+"
    MINUS = "-"


class BobVerdict(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SharedState:
    sign: Sign
    rho: np.ndarray


@dataclass(frozen=True)
class ConditionalState:
    """Bob's normalized state given the encoding sign and Alice's announced bit."""

    sign: Sign
    alice_bit: int
    rho: np.ndarray

    @property
    def label(self) -> str:
        return f"{self.sign.value}{self.alice_bit}"


def _require_qubits(p: CloningParams) -> None:
    if p.k != 2:
        raise ValueError(f"the protocol is defined for qubits (k=2), got k={p.k}")


def shared_state(bit: int, p: CloningParams) -> SharedState:
    """
    Closed-form state of qubits (1, 4) after cloning ``bell_encode(bit)``.

    Diagonal ``((P+S)/2, R, R, (P+S)/2)``; corners ``+Q/2`` for bit 0 and
    ``-Q/2`` for bit 1.
    """
    _require_qubits(p)
    bit = _bit(bit)
    cs = coefficient_set(p)
    a = (cs.P + cs.S) / 2
    corner = (1 - 2 * bit) * cs.Q / 2
    rho = np.array(
        [
            [a, 0, 0, corner],
            [0, cs.R, 0, 0],
            [0, 0, cs.R, 0],
            [corner, 0, 0, a],
        ],
        dtype=complex,
    )
    return SharedState(Sign.PLUS if bit == 0 else Sign.MINUS, rho)


def shared_state_brute_force(bit: int, p: CloningParams, pair=NamedPair.NONLOCAL_14) -> np.ndarray:
    """Clone the Bell encoding through the full isometry and trace down to ``pair``."""
    _require_qubits(p)
    return reduced_from_pure(clone_both(bell_encode(bit), p), 2, pair)


def _project_first(rho: np.ndarray, v: np.ndarray) -> np.ndarray:
    proj = np.kron(np.outer(v, v.conj()), I2)
    return partial_trace(proj @ rho @ proj, [2, 2], [1])


def conditional_branches(state: SharedState) -> list[tuple[float, ConditionalState]]:
    """Alice's two outcome probabilities with Bob's normalized conditionals."""
    branches = []
    for alice_bit, v in enumerate(HADAMARD_BASIS):
        unnorm = _project_first(state.rho, v)
        prob = float(np.real(np.trace(unnorm)))
        rho_b = unnorm / prob if prob > 0 else np.full((2, 2), np.nan, dtype=complex)
        branches.append((prob, ConditionalState(state.sign, alice_bit, rho_b)))
    return branches


def alice_measure(state: SharedState, rng=None, outcome: int | None = None):
    """
    Hadamard-basis measurement of Alice's qubit.

    Pass ``outcome`` to force the result, or ``rng`` (a numpy Generator)
    to sample it. Returns ``(alice_bit, ConditionalState)``.
    """
    branches = conditional_branches(state)
    if outcome is None:
        if rng is None:
            raise ValueError("alice_measure needs either rng or a forced outcome")
        outcome = int(rng.random() >= branches[0][0])
    outcome = _bit(outcome)
    prob, cond = branches[outcome]
    if prob <= 0:
        raise ValueError(f"outcome {outcome} has zero probability")
    return outcome, cond


def expected_conditional(Q: float, sign: int) -> np.ndarray:
    """``(I + sign * Q * sigma_x) / 2``."""
    return (I2 + sign * Q * SIGMA_X) / 2


@dataclass(frozen=True)
class PositivityReport:
    hermitian: bool
    eigenvalues: tuple[float, float]
    positive: bool


@dataclass(frozen=True)
class DiscriminationOperators:
    E1: np.ndarray
    E2: np.ndarray
    E3: np.ndarray
    hermitized: bool

    @property
    def completion_operator(self) -> np.ndarray:
        """``I - E1 - E2``."""
        return self.E3

    def positivity(self) -> dict[str, PositivityReport]:
        """
        Eigenvalues of each operator's Hermitian part.

        An operator counts as positive only when it is Hermitian and its
        smallest eigenvalue is non-negative (within 1e-12).
        """
        out = {}
        for name, e in (("E1", self.E1), ("E2", self.E2), ("completion_operator", self.E3)):
            herm = is_hermitian(e, 1e-12)
            vals = hermitian_eigenvalues((e + e.conj().T) / 2)
            out[name] = PositivityReport(
                herm, (float(vals[0]), float(vals[1])), bool(herm and vals[0] >= -1e-12)
            )
        return out

    def weights(self, rho) -> np.ndarray:
        return np.array([np.real(np.trace(e @ rho)) for e in (self.E1, self.E2, self.E3)])


def discrimination_operators(Q: float, hermitized: bool = False) -> DiscriminationOperators:
    """
    Three-outcome discrimination operators for Bob.

    With ``hermitized=False`` these are the literal upper-triangular
    matrices ``[[Q/2, +-1], [0, Q/2]]``. With ``hermitized=True`` the
    off-diagonal pair ``(1, 0)`` becomes ``(1/2, 1/2)``, which leaves every
    trace against a real symmetric state unchanged.
    """
    Q = float(Q)
    if not (-Q_TOL <= Q <= 0.5 + Q_TOL):
        raise ValueError(f"Q must lie in [0, 1/2], got {Q!r}")
    hi, lo = (0.5, 0.5) if hermitized else (1.0, 0.0)
    e1 = np.array([[Q / 2, hi], [lo, Q / 2]], dtype=complex)
    e2 = np.array([[Q / 2, -hi], [-lo, Q / 2]], dtype=complex)
    e3 = I2 - e1 - e2
    return DiscriminationOperators(e1, e2, e3, hermitized)


def decision_weights(ops: DiscriminationOperators, rho) -> np.ndarray:
    """Outcome weights ``Tr(E_i rho)`` clamped at 0 and renormalized."""
    w = np.clip(ops.weights(rho), 0.0, None)
    total = w.sum()
    if total <= 0:
        raise ValueError("all discrimination weights vanish")
    return w / total


def decode(alice_bit: int, outcome_index: int) -> BobVerdict:
    """
    Map Bob's outcome to a verdict on the encoded bit.

    E1 fires on ``(I + Q sigma_x)/2``, which is Bob's state for encoded bit
    ``alice_bit``; E2 fires on the other one.
    """
    if outcome_index == 2:
        return BobVerdict.INCONCLUSIVE
    bit = alice_bit ^ outcome_index
    return BobVerdict.PLUS if bit == 0 else BobVerdict.MINUS


def success_probability(p: CloningParams) -> float:
    """``4 c**2 d**2``, the ``Q`` coefficient."""
    _require_qubits(p)
    return 4.0 * p.c**2 * p.d**2


def success_probability_traces(p: CloningParams, hermitized: bool = False) -> float:
    """``Tr(rho_B^{+0} E1)/2 + Tr(rho_B^{-0} E2)/2`` evaluated from the simulated states."""
    _require_qubits(p)
    ops = discrimination_operators(coefficient_set(p).Q, hermitized)
    _, plus0 = alice_measure(shared_state(0, p), outcome=0)
    _, minus0 = alice_measure(shared_state(1, p), outcome=0)
    return float(0.5 * np.real(np.trace(plus0.rho @ ops.E1)) + 0.5 * np.real(np.trace(minus0.rho @ ops.E2)))


@dataclass(frozen=True)
class ProtocolOutcome:
    encoded_bit: int
    alice_bit: int
    bob_verdict: BobVerdict

    @property
    def success(self) -> bool:
        if self.bob_verdict is BobVerdict.INCONCLUSIVE:
            return False
        return (self.bob_verdict is BobVerdict.MINUS) == bool(self.encoded_bit)

    @property
    def conclusive_wrong(self) -> bool:
        return self.bob_verdict is not BobVerdict.INCONCLUSIVE and not self.success


def play_round(p: CloningParams, rng: np.random.Generator, hermitized: bool = False) -> ProtocolOutcome:
    """One full round: coin toss, cloning, Alice's measurement, Bob's decision."""
    bit = int(rng.integers(0, 2))
    state = shared_state(bit, p)
    alice_bit, cond = alice_measure(state, rng)
    ops = discrimination_operators(coefficient_set(p).Q, hermitized)
    idx = int(rng.choice(3, p=decision_weights(ops, cond.rho)))
    return ProtocolOutcome(bit, alice_bit, decode(alice_bit, idx))


@dataclass(frozen=True)
class TrialTables:
    """Per-(bit, alice_bit) probabilities shared by every trial of a run."""

    alice_p0: np.ndarray  # [bit]
    bob: np.ndarray  # [bit, alice_bit, outcome]


def trial_tables(p: CloningParams, hermitized: bool = False) -> TrialTables:
    _require_qubits(p)
    ops = discrimination_operators(coefficient_set(p).Q, hermitized)
    alice_p0 = np.zeros(2)
    bob = np.zeros((2, 2, 3))
    for bit in (0, 1):
        branches = conditional_branches(shared_state(bit, p))
        alice_p0[bit] = branches[0][0]
        for a, (prob, cond) in enumerate(branches):
            if prob > 0:
                bob[bit, a] = decision_weights(ops, cond.rho)
    return TrialTables(alice_p0, bob)


@dataclass
class TrialStats:
    n: int
    successes: int
    verdicts: Counter = field(default_factory=Counter)
    per_step: dict = field(default_factory=dict)
    conclusive_wrong: int = 0
    outcomes: np.ndarray | None = None  # columns: encoded_bit, alice_bit, outcome_index

    @property
    def rate(self) -> float:
        return self.successes / self.n

    def standard_error(self, p_true: float) -> float:
        return float(np.sqrt(p_true * (1.0 - p_true) / self.n))

    def records(self):
        """Iterate the per-trial outcomes as ``ProtocolOutcome`` values."""
        if self.outcomes is None:
            raise ValueError("run_trials was called with keep_outcomes=False")
        for bit, a, idx in self.outcomes:
            yield ProtocolOutcome(int(bit), int(a), decode(int(a), int(idx)))


def _run_block(tables: TrialTables, n: int, seed_seq: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed_seq))
    bits = rng.integers(0, 2, size=n)
    alice = (rng.random(n) >= tables.alice_p0[bits]).astype(np.int64)
    cdf = np.cumsum(tables.bob[bits, alice], axis=1)
    u = rng.random(n)[:, None]
    idx = np.minimum((u >= cdf).sum(axis=1), 2)
    return np.stack([bits, alice, idx], axis=1)


def run_trials(
    p: CloningParams,
    n: int,
    seed: int = 0,
    hermitized: bool = False,
    workers: int = 1,
    keep_outcomes: bool = False,
) -> TrialStats:
    """
    Monte Carlo estimate of the success probability.

    Trials are split into fixed blocks of ``BLOCK_SIZE``; block ``i`` draws
    from its own Philox stream spawned from ``SeedSequence(seed)``. Results
    therefore do not depend on ``workers``.
    """
    _require_qubits(p)
    if int(n) != n or n < 1:
        raise ValueError(f"trial count must be a positive integer, got {n!r}")
    n = int(n)
    tables = trial_tables(p, hermitized)
    sizes = [BLOCK_SIZE] * (n // BLOCK_SIZE)
    if n % BLOCK_SIZE:
        sizes.append(n % BLOCK_SIZE)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(lambda a: _run_block(tables, *a), zip(sizes, seqs)))
    else:
        blocks = [_run_block(tables, m, s) for m, s in zip(sizes, seqs)]
    out = np.concatenate(blocks)

    bits, alice, idx = out[:, 0], out[:, 1], out[:, 2]
    conclusive = idx < 2
    decoded = alice ^ idx
    correct = conclusive & (decoded == bits)
    wrong = conclusive & (decoded != bits)
    plus = conclusive & (decoded == 0)
    verdicts = Counter(
        {
            BobVerdict.PLUS.value: int(plus.sum()),
            BobVerdict.MINUS.value: int((conclusive & ~plus).sum()),
            BobVerdict.INCONCLUSIVE.value: int((~conclusive).sum()),
        }
    )
    per_step = {
        "encoded_0": int((bits == 0).sum()),
        "encoded_1": int((bits == 1).sum()),
        "alice_0": int((alice == 0).sum()),
        "alice_1": int((alice == 1).sum()),
        "bob_E1": int((idx == 0).sum()),
        "bob_E2": int((idx == 1).sum()),
        "bob_E3": int((idx == 2).sum()),
    }
    return TrialStats(
        n=n,
        successes=int(correct.sum()),
        verdicts=verdicts,
        per_step=per_step,
        conclusive_wrong=int(wrong.sum()),
        outcomes=out if keep_outcomes else None,
    )


def unconditioned_marginals(state: SharedState) -> tuple[np.ndarray, np.ndarray]:
    """Alice's and Bob's single-qubit states before any announcement."""
    return partial_trace(state.rho, [2, 2], [0]), partial_trace(state.rho, [2, 2], [1])
