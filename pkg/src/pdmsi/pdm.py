"""Pseudo-density matrices for two-time processes and their spatial incompatibility.

A PDM is the unit-trace Hermitian operator on ``H_1 (x) H_2`` reconstructed
from two-time correlators; unlike a density matrix it may carry negative
eigenvalues.  The distance from the density-matrix set (in Schatten-p norm)
quantifies how far the recorded statistics are from anything a bipartite
quantum state could produce, and any negative eigenvalue yields a positive
semidefinite witness observable whose two-time expectation goes negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .channels import KrausChannel, identity_channel
from .exceptions import (
    DimensionMismatch,
    IncompleteTable,
    InvalidP,
    NotSpatiallyIncompatible,
)
from .linalg import anticommutator, check_hermitian, eig_hermitian, kron, project_simplex
from .observables import ObservableBasis
from .states import check_density_matrix, ket

NEGATIVITY_ATOL = 1e-10


class Pdm:
    """Unit-trace Hermitian operator over two time-labelled factors."""

    def __init__(self, mat, dims: tuple[int, int], atol: float = 1e-10):
        mat = check_hermitian(mat, atol=atol)
        d1, d2 = dims
        if mat.shape[0] != d1 * d2:
            raise DimensionMismatch(f"matrix of dim {mat.shape[0]} does not factor as {d1}x{d2}")
        tr = float(np.trace(mat).real)
        if abs(tr - 1.0) > atol:
            raise ValueError(f"PDM must have unit trace, got {tr!r}")
        self.mat = mat
        self.dims = (int(d1), int(d2))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)

    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues()[0])

    def is_density_matrix(self, atol: float = NEGATIVITY_ATOL) -> bool:
        return self.min_eigenvalue() >= -atol

    def __repr__(self):
        return f"Pdm(dims={self.dims}, min_eig={self.min_eigenvalue():.4g})"


def pdm_closed_form(rho, ch: KrausChannel) -> Pdm:
    """PDM of a state evolving through a channel: (1/2){rho (x) I, M_channel}.

    Valid for the projective measurement scheme that projects each observable
    onto its +/-lambda eigenspaces at both times.
    """
    rho = check_density_matrix(rho)
    if rho.shape[0] != ch.in_dim:
        raise DimensionMismatch(
            f"state dim {rho.shape[0]} does not match channel input dim {ch.in_dim}"
        )
    m = ch.jamiolkowski()
    r = 0.5 * anticommutator(kron(rho, np.eye(ch.out_dim)), m)
    return Pdm(r, (ch.in_dim, ch.out_dim))


class CorrelatorTable:
    """Two-time expectation values keyed by observable-label pairs."""

    def __init__(self, basis1: ObservableBasis, basis2: ObservableBasis,
                 entries: dict, shot_counts: dict | None = None):
        self.basis1 = basis1
        self.basis2 = basis2
        self.entries = {k: float(v) for k, v in entries.items()}
        self.shot_counts = None if shot_counts is None else dict(shot_counts)
        for l1, l2 in self.entries:
            if l1 not in basis1 or l2 not in basis2:
                raise KeyError(f"entry ({l1},{l2}) not in the declared bases")

    @property
    def basis(self) -> ObservableBasis:
        if self.basis1 is not self.basis2 and self.basis1.descriptor != self.basis2.descriptor:
            raise ValueError("table uses distinct bases; access basis1/basis2 directly")
        return self.basis1

    def value(self, label1: str, label2: str) -> float:
        return self.entries[(label1, label2)]

    def missing_pairs(self) -> list[tuple[str, str]]:
        return [
            (a, b)
            for a in self.basis1.labels
            for b in self.basis2.labels
            if (a, b) not in self.entries
        ]

    def to_csv(self) -> str:
        lines = ["label1,label2,value,shots"]
        for a in self.basis1.labels:
            for b in self.basis2.labels:
                if (a, b) not in self.entries:
                    continue
                shots = "" if self.shot_counts is None else str(self.shot_counts.get((a, b), ""))
                lines.append(f"{a},{b},{format(self.entries[(a, b)], '.17g')},{shots}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, basis1: ObservableBasis,
                 basis2: ObservableBasis | None = None) -> "CorrelatorTable":
        basis2 = basis1 if basis2 is None else basis2
        entries, shots = {}, {}
        rows = [line for line in text.strip().splitlines() if line.strip()]
        if not rows or rows[0].strip() != "label1,label2,value,shots":
            raise ValueError("expected CSV header 'label1,label2,value,shots'")
        for line in rows[1:]:
            a, b, value, n = (cell.strip() for cell in line.split(","))
            entries[(a, b)] = float(value)
            if n:
                shots[(a, b)] = int(n)
        return cls(basis1, basis2, entries, shots or None)

    def __repr__(self):
        return (
            f"CorrelatorTable({self.basis1.descriptor}/{self.basis2.descriptor}, "
            f"{len(self.entries)} entries)"
        )


def _pair_grid(basis1: ObservableBasis, basis2: ObservableBasis):
    for a in basis1.labels:
        for b in basis2.labels:
            yield a, b, kron(basis1.matrix(a), basis2.matrix(b))


def _resolve_bases(basis, dims) -> tuple[ObservableBasis, ObservableBasis]:
    if basis is None:
        return (ObservableBasis.default_for_dim(dims[0]), ObservableBasis.default_for_dim(dims[1]))
    if isinstance(basis, str):
        b = ObservableBasis.from_descriptor(basis)
        return (b, b)
    if isinstance(basis, ObservableBasis):
        return (basis, basis)
    b1, b2 = basis
    return (b1, b2)


def exact_correlators(r: Pdm, basis=None) -> CorrelatorTable:
    """Analytic table entry(a, b) = Tr[R (A (x) B)] over the full basis grid."""
    b1, b2 = _resolve_bases(basis, r.dims)
    if b1.dim != r.dims[0] or b2.dim != r.dims[1]:
        raise DimensionMismatch("basis dimensions do not match the PDM factors")
    entries = {}
    for a, b, mat in _pair_grid(b1, b2):
        val = complex(np.trace(r.mat @ mat))
        if abs(val.imag) > 1e-10:
            raise ValueError(f"correlator ({a},{b}) has imaginary part {val.imag:.3e}")
        entries[(a, b)] = val.real
    return CorrelatorTable(b1, b2, entries)


def pdm_from_correlators(table: CorrelatorTable) -> Pdm:
    """Reconstruct the PDM from a complete correlator table.

    Orthogonal (Pauli) bases use the direct expansion
    ``R = sum <{A,B}> A (x) B / (d1 d2)``; light-touch bases solve the Gram
    system of the (generally non-orthogonal) pair family instead.
    """
    b1, b2 = table.basis1, table.basis2
    missing = table.missing_pairs()
    if missing:
        raise IncompleteTable(missing)
    d1, d2 = b1.dim, b2.dim
    if b1.is_orthogonal and b2.is_orthogonal:
        r = np.zeros((d1 * d2, d1 * d2), dtype=complex)
        for a, b, mat in _pair_grid(b1, b2):
            r += table.entries[(a, b)] * mat
        r /= d1 * d2
    else:
        pairs = list(_pair_grid(b1, b2))
        vecs = np.stack([mat.reshape(-1) for _, _, mat in pairs])
        gram = np.real(vecs.conj() @ vecs.T)
        e = np.array([table.entries[(a, b)] for a, b, _ in pairs])
        coeffs = np.linalg.solve(gram, e)
        r = np.tensordot(coeffs, np.stack([mat for _, _, mat in pairs]), axes=1)
    r = (r + r.conj().T) / 2.0
    return Pdm(r, (d1, d2))


@dataclass
class SiReport:
    """Result of minimizing ||R - rho||_p over density matrices."""

    p: float
    value: float
    minimizer: np.ndarray
    negative_eigenpairs: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "value": self.value,
            "minimizer": _matrix_to_pairs(self.minimizer),
            "negative_eigenvalues": [lam for lam, _ in self.negative_eigenpairs],
        }


def _matrix_to_pairs(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def _t1_closed_form(lam: np.ndarray) -> float:
    return float(2.0 * np.sum(np.abs(lam[lam < -NEGATIVITY_ATOL])))


def _t1_simplex_lp(lam: np.ndarray) -> tuple[float, np.ndarray]:
    """min ||lam - q||_1 over the simplex via an LP (independent of the closed form)."""
    n = len(lam)
    c = np.concatenate([np.zeros(n), np.ones(n)])
    a_ub = np.block([[np.eye(n), -np.eye(n)], [-np.eye(n), -np.eye(n)]])
    b_ub = np.concatenate([lam, -lam])
    a_eq = np.concatenate([np.ones(n), np.zeros(n)])[None, :]
    res = scipy.optimize.linprog(
        c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
        bounds=[(0, None)] * n + [(None, None)] * n, method="highs",
    )
    if not res.success:
        raise RuntimeError(f"simplex LP failed: {res.message}")
    return float(res.fun), res.x[:n]


def _subgradient_simplex(lam: np.ndarray, p: float, iters: int = 10_000,
                         tol: float = 1e-7) -> tuple[float, np.ndarray]:
    """Projected subgradient for min ||lam - q||_p over the simplex."""

    def f(q):
        return float(np.sum(np.abs(lam - q) ** p) ** (1.0 / p))

    q = project_simplex(lam)
    best_q, best_f = q.copy(), f(q)
    stall = 0
    for k in range(1, iters + 1):
        diff = lam - q
        norm = f(q)
        if norm < 1e-15:
            break
        # (|d_i| / ||d||_p)^(p-1) <= 1, so large p cannot overflow.
        grad = -np.sign(diff) * (np.abs(diff) / norm) ** (p - 1.0)
        q = project_simplex(q - grad / math.sqrt(k))
        fq = f(q)
        if fq < best_f - tol:
            best_f, best_q, stall = fq, q.copy(), 0
        else:
            stall += 1
            if stall > 500:
                break
    return best_f, best_q


def si_measure(r, p: float = 1.0, method: str = "auto") -> SiReport:
    """Degree of spatial incompatibility T_p(R) with the achieving density matrix.

    ``method="auto"`` uses the trace-norm closed form 2*sum|negative eigs| at
    p = 1 and the eigenbasis reduction otherwise; ``method="numeric"`` forces
    the simplex optimization even at p = 1 (useful as a cross-check).
    """
    if not (np.isreal(p) and np.isfinite(p) and p >= 1.0):
        raise InvalidP(f"norm order must be a finite real >= 1, got {p!r}")
    p = float(p)
    mat = r.mat if isinstance(r, Pdm) else check_hermitian(r, atol=1e-9)
    eig = eig_hermitian(mat, atol=1e-9)
    lam, v = eig.eigenvalues, eig.eigenvectors
    negatives = [
        (float(lam[k]), v[:, k]) for k in range(len(lam)) if lam[k] < -NEGATIVITY_ATOL
    ]

    if p == 1.0 and method in ("auto", "closed"):
        value = _t1_closed_form(lam)
        pos = np.clip(lam, 0.0, None)
        q = pos / np.sum(pos)
    elif p == 2.0:
        q = project_simplex(lam)
        value = float(np.linalg.norm(lam - q))
    elif p == 1.0:
        value, q = _t1_simplex_lp(lam)
    else:
        value, q = _subgradient_simplex(lam, p)

    if not negatives:
        value = 0.0
        q = np.clip(lam, 0.0, None)
        q = q / np.sum(q)
    minimizer = (v * q) @ v.conj().T
    minimizer = (minimizer + minimizer.conj().T) / 2.0
    return SiReport(p=p, value=max(value, 0.0), minimizer=minimizer,
                    negative_eigenpairs=negatives)


class Witness:
    """Positive semidefinite observable with a local-in-time decomposition.

    The expectation over any density matrix is nonnegative, so a negative
    two-time expectation certifies that the statistics cannot come from a
    bipartite quantum state.
    """

    def __init__(self, mat, coeffs: dict, basis1: ObservableBasis, basis2: ObservableBasis):
        mat = check_hermitian(mat, atol=1e-10)
        lo = float(np.linalg.eigvalsh(mat)[0])
        if lo < -NEGATIVITY_ATOL:
            raise ValueError(f"witness must be positive semidefinite, min eigenvalue {lo:.3e}")
        self.mat = mat
        self.coeffs = {k: float(c) for k, c in coeffs.items()}
        self.basis1 = basis1
        self.basis2 = basis2

    def expectation(self, r: Pdm) -> float:
        return float(np.trace(self.mat @ r.mat).real)

    def to_dict(self) -> dict:
        return {
            "matrix": _matrix_to_pairs(self.mat),
            "coefficients": {f"{a}|{b}": c for (a, b), c in sorted(self.coeffs.items())},
            "basis": [self.basis1.descriptor, self.basis2.descriptor],
        }

    def __repr__(self):
        return f"Witness(dim={self.mat.shape[0]}, {len(self.coeffs)} coefficients)"


def _pair_coefficients(mat, b1: ObservableBasis, b2: ObservableBasis) -> dict:
    d1d2 = b1.dim * b2.dim
    if b1.is_orthogonal and b2.is_orthogonal:
        return {
            (a, b): float(np.trace(mat @ pair).real) / d1d2
            for a, b, pair in _pair_grid(b1, b2)
        }
    pairs = list(_pair_grid(b1, b2))
    vecs = np.stack([m.reshape(-1) for _, _, m in pairs])
    gram = np.real(vecs.conj() @ vecs.T)
    e = np.array([float(np.trace(mat @ m).real) for _, _, m in pairs])
    coeffs = np.linalg.solve(gram, e)
    return {(a, b): float(c) for (a, b, _), c in zip(pairs, coeffs)}


def synthesize_witness(r: Pdm, policy: str = "negative_eigenspace", custom=None) -> Witness:
    """Build an SI witness for a PDM with at least one negative eigenvalue.

    Policies: ``negative_eigenspace`` projects onto the span of all
    negative-eigenvalue eigenvectors (default), ``most_negative`` onto the
    single most negative one, and ``custom`` validates a user-supplied PSD
    matrix against the defining conditions.
    """
    eig = eig_hermitian(r.mat, atol=1e-9)
    lam, v = eig.eigenvalues, eig.eigenvectors
    neg = np.nonzero(lam < -NEGATIVITY_ATOL)[0]
    if len(neg) == 0:
        raise NotSpatiallyIncompatible(
            f"min eigenvalue {lam[0]:.3e} >= -{NEGATIVITY_ATOL}; no witness exists"
        )

    if policy == "negative_eigenspace":
        w = sum(np.outer(v[:, k], v[:, k].conj()) for k in neg)
    elif policy == "most_negative":
        k = int(np.argmin(lam))
        w = np.outer(v[:, k], v[:, k].conj())
    elif policy == "custom":
        if custom is None:
            raise ValueError("policy 'custom' requires a matrix")
        w = check_hermitian(custom, atol=1e-10)
        if float(np.linalg.eigvalsh(w)[0]) < -NEGATIVITY_ATOL:
            raise ValueError("custom witness must be positive semidefinite")
        if float(np.trace(w @ r.mat).real) >= 0.0:
            raise ValueError("custom witness has nonnegative expectation on this PDM")
    else:
        raise ValueError(f"unknown witness policy {policy!r}")

    b1 = ObservableBasis.default_for_dim(r.dims[0])
    b2 = ObservableBasis.default_for_dim(r.dims[1])
    return Witness(w, _pair_coefficients(w, b1, b2), b1, b2)


def evaluate_witness(w: Witness, table: CorrelatorTable, coeff_atol: float = 1e-12) -> float:
    """Two-time expectation <W>_t = sum a_ab <{A, B}> from a correlator table."""
    needed = {k: c for k, c in w.coeffs.items() if abs(c) > coeff_atol}
    missing = [k for k in needed if k not in table.entries]
    if missing:
        raise IncompleteTable(missing)
    return float(sum(c * table.entries[k] for k, c in needed.items()))


_BOUND_REFERENCE_CACHE: dict[int, float] = {}


def _reference_t1(d: int) -> float:
    """T_1 of the extremal PDM: pure basis state through the identity channel."""
    if d not in _BOUND_REFERENCE_CACHE:
        rho = np.outer(ket(0, d), ket(0, d).conj())
        r = pdm_closed_form(rho, identity_channel(d))
        _BOUND_REFERENCE_CACHE[d] = si_measure(r, 1.0).value
    return _BOUND_REFERENCE_CACHE[d]


@dataclass
class BoundCheck:
    t1: float
    reference: float
    bound_ok: bool

    def to_dict(self) -> dict:
        return {"t1": self.t1, "reference": self.reference, "bound_ok": self.bound_ok}


def check_bound(rho, ch: KrausChannel, slack: float = 1e-9) -> BoundCheck:
    """Check T_1(R(rho, ch)) against the pure-state/identity-channel extremal value.

    For qubit-to-qubit channels the reference equals 1 exactly.
    """
    if ch.in_dim != ch.out_dim:
        raise DimensionMismatch("the SI bound is stated for equal input and output dimensions")
    t1 = si_measure(pdm_closed_form(rho, ch), 1.0).value
    ref = _reference_t1(ch.in_dim)
    return BoundCheck(t1=t1, reference=ref, bound_ok=bool(t1 <= ref + slack))
