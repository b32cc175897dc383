"""Channel classification in the coherence hierarchy and block-positivity tests.

Classes are defined by exact composition identities with the fully
decohering map Delta, checked on all matrix units:

    OI (off-diagonal independent):  ch = ch . Delta
    CE (coherence erasing):         ch = Delta . ch
    CI (creation incoherent):       ch . Delta = Delta . ch . Delta
    DI (detection incoherent):      Delta . ch = Delta . ch . Delta

NCGD (non-coherence-generating-and-detecting) is a statement about a whole
dynamics family; on a finite (t, tau) grid it can only be refuted, never
proven, so the report carries the probing mode alongside the boolean.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel, dephasing_superoperator
from .exceptions import DimensionMismatch, NoAsymmetricColumn
from .linalg import pseudo_inverse, superop_exp
from .states import ketbra

CLASS_ATOL = 1e-9
NCGD_GRID = np.logspace(-2.0, 1.0, 10)


@dataclass
class CoherenceClassReport:
    is_oi: bool
    is_ce: bool
    is_ci: bool
    is_di: bool
    is_ncgd: bool
    residuals: dict
    ncgd_mode: str

    def to_dict(self) -> dict:
        return {
            "is_oi": self.is_oi,
            "is_ce": self.is_ce,
            "is_ci": self.is_ci,
            "is_di": self.is_di,
            "is_ncgd": self.is_ncgd,
            "ncgd_mode": self.ncgd_mode,
            "residuals": dict(sorted(self.residuals.items())),
        }


def _max_unit_deviation(s_left: np.ndarray, s_right: np.ndarray) -> float:
    """Max Frobenius distance of the two maps' outputs over all matrix units.

    Superoperator columns are exactly the vectorized outputs on matrix units,
    so this is the max column 2-norm of the difference.
    """
    diff = s_left - s_right
    return float(np.max(np.linalg.norm(diff, axis=0))) if diff.size else 0.0


def _ncgd_residual(family, delta: np.ndarray) -> float:
    worst = 0.0
    for t in NCGD_GRID:
        for tau in NCGD_GRID:
            lhs = delta @ family(t) @ delta @ family(tau) @ delta
            rhs = delta @ family(t + tau) @ delta
            worst = max(worst, _max_unit_deviation(lhs, rhs))
    return worst


def classify_channel(ch: KrausChannel, ncgd_probe=None, atol: float = CLASS_ATOL) -> CoherenceClassReport:
    """Test the defining identity of each coherence class on all matrix units.

    ``ncgd_probe`` may be a Liouvillian generator matrix (d^2 x d^2, the
    dynamics is exp(L t)) or a callable t -> superoperator/KrausChannel.
    Without a probe the channel itself doubles as both legs (single-channel
    surrogate).  A grid pass means "not refuted on the grid".
    """
    if ch.in_dim != ch.out_dim:
        raise DimensionMismatch("coherence classification needs equal input and output dims")
    s = ch.superoperator()
    delta = dephasing_superoperator(ch.in_dim)

    residuals = {
        "oi": _max_unit_deviation(s, s @ delta),
        "ce": _max_unit_deviation(s, delta @ s),
        "ci": _max_unit_deviation(s @ delta, delta @ s @ delta),
        "di": _max_unit_deviation(delta @ s, delta @ s @ delta),
    }

    if ncgd_probe is None:
        mode = "single-channel surrogate"
        lhs = delta @ s @ delta @ s @ delta
        rhs = delta @ s @ s @ delta
        residuals["ncgd"] = _max_unit_deviation(lhs, rhs)
    else:
        if callable(ncgd_probe):
            mode = "family grid (not refuted is not a proof)"

            def family(t):
                out = ncgd_probe(t)
                return out.superoperator() if isinstance(out, KrausChannel) else np.asarray(out)

        else:
            mode = "liouvillian grid (not refuted is not a proof)"
            gen = np.asarray(ncgd_probe, dtype=complex)
            if gen.shape != (ch.in_dim**2, ch.in_dim**2):
                raise DimensionMismatch("Liouvillian generator must be d^2 x d^2")

            def family(t):
                return superop_exp(gen, t)

        residuals["ncgd"] = _ncgd_residual(family, delta)

    return CoherenceClassReport(
        is_oi=residuals["oi"] <= atol,
        is_ce=residuals["ce"] <= atol,
        is_ci=residuals["ci"] <= atol,
        is_di=residuals["di"] <= atol,
        is_ncgd=residuals["ncgd"] <= atol,
        residuals=residuals,
        ncgd_mode=mode,
    )


@dataclass
class BlockDecomposition:
    """PDM blocks R_ij = ((p_i + p_j)/2) ch(|j><i|) for a diagonal input state."""

    probs: np.ndarray
    blocks: dict


def check_probability_vector(probs, atol: float = 1e-12) -> np.ndarray:
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or np.any(probs < -atol) or abs(probs.sum() - 1.0) > atol:
        raise ValueError("probs must be a probability vector")
    return np.clip(probs, 0.0, None)


def pdm_blocks(probs, ch: KrausChannel) -> BlockDecomposition:
    probs = check_probability_vector(probs)
    d = ch.in_dim
    if len(probs) != d:
        raise DimensionMismatch("probability vector length must match channel input dim")
    blocks = {}
    for i in range(d):
        for j in range(d):
            blocks[(i, j)] = ((probs[i] + probs[j]) / 2.0) * ch(ketbra(j, i, d))
    return BlockDecomposition(probs=probs, blocks=blocks)


@dataclass
class BlockPositivityResult:
    compatible: bool
    failing_pair: tuple[int, int] | None
    failure_kind: str | None

    def to_dict(self) -> dict:
        return {
            "compatible": self.compatible,
            "failing_pair": list(self.failing_pair) if self.failing_pair else None,
            "failure_kind": self.failure_kind,
        }


def block_positivity_test(probs, ch: KrausChannel, atol: float = CLASS_ATOL,
                          rank_tol: float = 1e-10) -> BlockPositivityResult:
    """Schur-complement test for positivity of the PDM of (diag(probs), ch).

    The PDM is positive semidefinite iff for every pair i != j the block
    R_ij lies in the support of R_ii and R_jj - R_ji R_ii^+ R_ij >= 0.
    """
    dec = pdm_blocks(probs, ch)
    d = ch.in_dim
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            a = dec.blocks[(i, i)]
            b = dec.blocks[(i, j)]
            c = dec.blocks[(j, j)]
            a_pinv = pseudo_inverse(a, rank_tol=rank_tol)
            support_defect = float(np.linalg.norm((np.eye(ch.out_dim) - a @ a_pinv) @ b))
            if support_defect > atol:
                return BlockPositivityResult(False, (i, j), "support")
            schur = c - b.conj().T @ a_pinv @ b
            schur = (schur + schur.conj().T) / 2.0
            if float(np.linalg.eigvalsh(schur)[0]) < -atol:
                return BlockPositivityResult(False, (i, j), "schur")
    return BlockPositivityResult(True, None, None)


def check_stochastic_matrix(a, atol: float = 1e-12) -> np.ndarray:
    """Validate a column-stochastic matrix (a_ki >= 0, columns sum to 1)."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch("stochastic matrix must be square")
    if np.any(a < -atol):
        raise ValueError("stochastic matrix entries must be nonnegative")
    sums = a.sum(axis=0)
    if np.any(np.abs(sums - 1.0) > atol):
        raise ValueError(f"columns must sum to 1, got {sums}")
    return np.clip(a, 0.0, None)


def build_ce_oi_channel(a) -> KrausChannel:
    """Channel with Kraus set {sqrt(a_ki) |k><i|}: erases coherence and
    ignores off-diagonals, acting on populations by the stochastic matrix."""
    a = check_stochastic_matrix(a)
    d = a.shape[0]
    ops = [np.sqrt(a[k, i]) * ketbra(k, i, d) for k in range(d) for i in range(d) if a[k, i] > 0]
    return KrausChannel(ops)


@dataclass
class AdversarialState:
    state: np.ndarray
    block_det: float


def adversarial_coherent_state(a, i: int, j: int, k: int, p: float) -> AdversarialState:
    """Coherent input exposing SI of the CE+OI channel built from ``a``.

    Returns |psi><psi| with psi = sqrt(p)|i> + sqrt(1-p)|j> and the analytic
    determinant of the k-th 2x2 PDM block restricted to span{|i>, |j>},
    -p(1-p)(a_ki - a_kj)^2 / 4, which is negative whenever a_ki != a_kj.
    """
    a = check_stochastic_matrix(a)
    d = a.shape[0]
    if not (0 <= i < d and 0 <= j < d and 0 <= k < d) or i == j:
        raise ValueError("need distinct valid indices i, j and a valid k")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    if float(np.max(np.abs(a[:, i] - a[:, j]))) <= 1e-12:
        raise NoAsymmetricColumn(
            f"columns {i} and {j} coincide; the PDM stays positive semidefinite for every state"
        )
    if abs(a[k, i] - a[k, j]) <= 1e-12:
        raise ValueError(f"rows with a_ki != a_kj exist, but not k={k}; pick another k")
    psi = np.zeros(d, dtype=complex)
    psi[i] = np.sqrt(p)
    psi[j] = np.sqrt(1.0 - p)
    block_det = -p * (1.0 - p) * (a[k, i] - a[k, j]) ** 2 / 4.0
    return AdversarialState(state=np.outer(psi, psi.conj()), block_det=float(block_det))
