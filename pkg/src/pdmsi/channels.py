"""CPTP maps as Kraus-operator lists, with Jamiolkowski and superoperator forms."""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionMismatch
from .linalg import check_hermitian
from .states import ket

TRACE_PRESERVING_ATOL = 1e-10


class KrausChannel:
    """Trace-preserving completely positive map given by Kraus operators.

    Kraus operators are ``out_dim x in_dim`` complex matrices satisfying
    ``sum_l K_l^dag K_l = I`` on the input space.
    """

    def __init__(self, kraus_ops, atol: float = TRACE_PRESERVING_ATOL):
        ops = [np.asarray(k, dtype=complex) for k in kraus_ops]
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or any(k.shape != shape for k in ops):
            raise DimensionMismatch("all Kraus operators must share one 2-D shape")
        self.out_dim, self.in_dim = shape
        total = sum(k.conj().T @ k for k in ops)
        defect = float(np.max(np.abs(total - np.eye(self.in_dim))))
        if defect > atol:
            raise ValueError(f"Kraus operators are not trace preserving: defect {defect:.3e}")
        self.kraus_ops = tuple(ops)

    def __call__(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=complex)
        if m.shape != (self.in_dim, self.in_dim):
            raise DimensionMismatch(
                f"channel expects a {self.in_dim}x{self.in_dim} operand, got {m.shape}"
            )
        return sum(k @ m @ k.conj().T for k in self.kraus_ops)

    def jamiolkowski(self) -> np.ndarray:
        """M = sum_ij |i><j| (x) channel(|j><i|); Hermitian with trace in_dim."""
        d, n = self.in_dim, self.out_dim
        m = np.zeros((d * n, d * n), dtype=complex)
        for k in self.kraus_ops:
            for i in range(d):
                for j in range(d):
                    block = np.outer(k[:, j], k[:, i].conj())
                    m[i * n : (i + 1) * n, j * n : (j + 1) * n] += block
        return check_hermitian(m, atol=1e-9)

    def superoperator(self) -> np.ndarray:
        """Matrix acting on row-major vectorized operators: sum_l K_l (x) conj(K_l)."""
        return sum(np.kron(k, k.conj()) for k in self.kraus_ops)

    def compose(self, inner: "KrausChannel") -> "KrausChannel":
        """self after inner: (self . inner)(m) = self(inner(m))."""
        if inner.out_dim != self.in_dim:
            raise DimensionMismatch(
                f"cannot compose: inner produces dim {inner.out_dim}, outer expects {self.in_dim}"
            )
        return KrausChannel([a @ b for a in self.kraus_ops for b in inner.kraus_ops])

    def __repr__(self):
        return f"KrausChannel({len(self.kraus_ops)} ops, {self.in_dim}->{self.out_dim})"


def apply_channel(ch: KrausChannel, m) -> np.ndarray:
    return ch(m)


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    return outer.compose(inner)


def channels_equal(a: KrausChannel, b: KrausChannel, atol: float = 1e-9) -> bool:
    """Action equality (Kraus lists are gauge dependent, so compare Jamiolkowski forms)."""
    if (a.in_dim, a.out_dim) != (b.in_dim, b.out_dim):
        return False
    return float(np.max(np.abs(a.jamiolkowski() - b.jamiolkowski()))) <= atol


def dephase(m) -> np.ndarray:
    """Delete all off-diagonal entries in the computational basis."""
    m = np.asarray(m, dtype=complex)
    return np.diag(np.diag(m))


def identity_channel(d: int = 2) -> KrausChannel:
    return KrausChannel([np.eye(d, dtype=complex)])


def dephasing_channel(d: int = 2) -> KrausChannel:
    """The fully decohering map Delta, Kraus set {|i><i|}."""
    return KrausChannel([np.outer(ket(i, d), ket(i, d).conj()) for i in range(d)])


def unitary_channel(u) -> KrausChannel:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatch("unitary must be square")
    if float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) > 1e-10:
        raise ValueError("matrix is not unitary")
    return KrausChannel([u])


def amplitude_damping_channel(gamma: float) -> KrausChannel:
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return KrausChannel([k0, k1])


def depolarizing_channel(p: float, d: int = 2) -> KrausChannel:
    """rho -> (1 - p) rho + p I/d for any dimension d."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    ops = [np.sqrt(1.0 - p) * np.eye(d, dtype=complex)]
    if p > 0.0:
        for i in range(d):
            for j in range(d):
                ops.append(np.sqrt(p / d) * np.outer(ket(i, d), ket(j, d).conj()))
    return KrausChannel(ops)


def dephasing_superoperator(d: int) -> np.ndarray:
    """Superoperator of Delta in the row-major vectorization."""
    diag = np.zeros(d * d)
    diag[:: d + 1] = 1.0
    return np.diag(diag)
