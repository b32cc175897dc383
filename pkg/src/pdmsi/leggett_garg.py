"""Three-time Leggett-Garg evaluation and its comparison with SI detection.

Correlators are computed exactly through the two-time PDM trace identity:
C_12 measures at t1 and t2 around the first leg, C_23 lets the state evolve
unmeasured through the first leg before measuring around the second, and
C_13 evolves through both legs with no intermediate measurement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel
from .exceptions import DimensionMismatch
from .linalg import kron
from .observables import PAULI_1Q
from .pdm import Pdm, Witness, pdm_closed_form, si_measure, synthesize_witness
from .sampling import sample_two_time
from .states import check_density_matrix

LG_SLACK = 1e-9
SI_DETECT_ATOL = 1e-9


def check_dichotomic(q, atol: float = 1e-10) -> np.ndarray:
    """Validate a +/-1 observable: Hermitian with q^2 = I."""
    q = np.asarray(q, dtype=complex)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise DimensionMismatch("observable must be a square matrix")
    if float(np.max(np.abs(q - q.conj().T))) > atol:
        raise ValueError("dichotomic observable must be Hermitian")
    if float(np.max(np.abs(q @ q - np.eye(q.shape[0])))) > atol:
        raise ValueError("dichotomic observable must square to the identity")
    return q


@dataclass
class LgScenario:
    initial: np.ndarray
    ch12: KrausChannel
    ch23: KrausChannel
    q: np.ndarray

    def __post_init__(self):
        self.initial = check_density_matrix(self.initial)
        self.q = check_dichotomic(self.q)
        d = self.initial.shape[0]
        if (self.ch12.in_dim, self.ch12.out_dim) != (d, d) or \
           (self.ch23.in_dim, self.ch23.out_dim) != (d, d):
            raise DimensionMismatch("LG legs must map the system dimension to itself")
        if self.q.shape[0] != d:
            raise DimensionMismatch("observable dimension must match the state")


@dataclass
class LgResult:
    c12: float
    c23: float
    c13: float
    k: float

    def to_dict(self) -> dict:
        return {"c12": self.c12, "c23": self.c23, "c13": self.c13, "k": self.k}


def _correlator(rho, ch: KrausChannel, q) -> float:
    r = pdm_closed_form(rho, ch)
    return float(np.trace(r.mat @ kron(q, q)).real)


def lg_evaluate(scenario: LgScenario, shots: int | None = None, seed: int | None = None) -> LgResult:
    """LG correlators and K = C12 + C23 - C13.

    Exact by default; with ``shots`` each correlator is Monte Carlo sampled
    through the same measure-evolve-measure procedure as the simulator.
    """
    rho, q = scenario.initial, scenario.q
    rho2 = scenario.ch12(rho)
    ch13 = scenario.ch23.compose(scenario.ch12)
    if shots is None:
        c12 = _correlator(rho, scenario.ch12, q)
        c23 = _correlator(rho2, scenario.ch23, q)
        c13 = _correlator(rho, ch13, q)
    else:
        if seed is None:
            raise ValueError("Monte Carlo LG evaluation needs a seed")
        c12 = sample_two_time(rho, scenario.ch12, q, q, shots, np.random.SeedSequence((seed, 12))).mean
        c23 = sample_two_time(rho2, scenario.ch23, q, q, shots, np.random.SeedSequence((seed, 23))).mean
        c13 = sample_two_time(rho, ch13, q, q, shots, np.random.SeedSequence((seed, 13))).mean
    return LgResult(c12=c12, c23=c23, c13=c13, k=c12 + c23 - c13)


@dataclass
class SpatialBound:
    max_k: float
    min_k: float

    def to_dict(self) -> dict:
        return {"max_k": self.max_k, "min_k": self.min_k}


def lg_operator(q1, q2, q3) -> np.ndarray:
    """B = q1 q2 I + I q2 q3 - q1 I q3 as a tripartite tensor operator."""
    q1 = check_dichotomic(q1)
    q2 = check_dichotomic(q2)
    q3 = check_dichotomic(q3)
    i1 = np.eye(q1.shape[0])
    i2 = np.eye(q2.shape[0])
    i3 = np.eye(q3.shape[0])
    return kron(kron(q1, q2), i3) + kron(kron(i1, q2), q3) - kron(kron(q1, i2), q3)


def spatial_lg_bound(q1, q2, q3) -> SpatialBound:
    """Extreme eigenvalues of the LG combination over tripartite states.

    For observables with both +1 and -1 eigenvalues these are always
    (max, min) = (1, -3): no spatial statistics can push K above 1.
    """
    w = np.linalg.eigvalsh(lg_operator(q1, q2, q3))
    return SpatialBound(max_k=float(w[-1]), min_k=float(w[0]))


@dataclass
class LgVsSi:
    lg_violated: bool
    max_k: float
    si_detected: bool
    best_negativity: float
    witness: Witness | None

    def to_dict(self) -> dict:
        return {
            "lg_violated": self.lg_violated,
            "max_k": self.max_k,
            "si_detected": self.si_detected,
            "best_negativity": self.best_negativity,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def lg_vs_si(ch: KrausChannel, states, q_list=None, ch23: KrausChannel | None = None) -> LgVsSi:
    """Scan states: can the LG test or an SI witness expose temporal correlations?

    Both LG legs default to the same channel.  Intended for incoherent input
    states (the regime where the two tests differ); q_list defaults to Pauli Z
    for qubits.
    """
    if ch.in_dim != ch.out_dim:
        raise DimensionMismatch("lg_vs_si needs equal input and output dimensions")
    if q_list is None:
        if ch.in_dim != 2:
            raise ValueError("q_list has a default only for qubits; pass observables explicitly")
        q_list = [PAULI_1Q["Z"]]
    second = ch if ch23 is None else ch23

    max_k = -np.inf
    for rho in states:
        for q in q_list:
            res = lg_evaluate(LgScenario(initial=rho, ch12=ch, ch23=second, q=q))
            max_k = max(max_k, res.k)

    best_negativity = 0.0
    best_pdm: Pdm | None = None
    for rho in states:
        r = pdm_closed_form(rho, ch)
        value = si_measure(r, 1.0).value
        if value > best_negativity:
            best_negativity = value
            best_pdm = r

    si_detected = best_negativity > SI_DETECT_ATOL
    witness = synthesize_witness(best_pdm) if si_detected and best_pdm is not None else None
    return LgVsSi(
        lg_violated=bool(max_k > 1.0 + LG_SLACK),
        max_k=float(max_k),
        si_detected=bool(si_detected),
        best_negativity=float(best_negativity),
        witness=witness,
    )
