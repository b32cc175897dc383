"""Measurement-observable bases: Pauli strings and light-touch sets.

A light-touch observable is Hermitian with spectrum {lam} or {+lam, -lam};
Pauli strings are the qubit special case (lam = 1).  Each basis is a
tomographically complete family used both to define correlator tables and
to reconstruct operators from them.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .exceptions import DimensionMismatch

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PAULI_LETTERS = "IXYZ"


class PauliString:
    """Tensor product of single-qubit Paulis, e.g. "XZ" on two qubits."""

    def __init__(self, letters):
        letters = tuple(letters)
        if not letters or any(c not in PAULI_LETTERS for c in letters):
            raise ValueError(f"invalid Pauli letters {letters!r}")
        self.letters = letters
        self.label = "".join(letters)
        self.n_qubits = len(letters)
        mat = PAULI_1Q[letters[0]]
        for c in letters[1:]:
            mat = np.kron(mat, PAULI_1Q[c])
        self.matrix = mat

    @property
    def lam(self) -> float:
        return 1.0

    @property
    def is_identity(self) -> bool:
        return all(c == "I" for c in self.letters)

    def __repr__(self):
        return f"PauliString({self.label!r})"


def pauli_basis(n: int) -> list[PauliString]:
    """All 4**n Pauli strings in lexicographic order (I < X < Y < Z per site)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return [PauliString(p) for p in product(PAULI_LETTERS, repeat=n)]


class LightTouchObservable:
    """Hermitian observable whose spectrum is {lam} or {+lam, -lam}."""

    def __init__(self, matrix, label: str, atol: float = 1e-10):
        matrix = np.asarray(matrix, dtype=complex)
        w = np.linalg.eigvalsh(matrix)
        lam = float(np.max(np.abs(w)))
        if lam <= atol:
            raise ValueError("light-touch observable must be nonzero")
        onlyplus = np.all(np.abs(w - lam) <= atol)
        plusminus = np.all(np.minimum(np.abs(w - lam), np.abs(w + lam)) <= atol)
        if onlyplus:
            kind = "single"
        elif plusminus:
            kind = "pm"
        else:
            raise ValueError(f"spectrum {w} is neither {{lam}} nor {{+/-lam}}")
        self.matrix = matrix
        self.label = label
        self.lam = lam
        self.kind = kind

    @property
    def is_identity(self) -> bool:
        return self.kind == "single" and self.lam == 1.0

    def __repr__(self):
        return f"LightTouchObservable({self.label!r}, lam={self.lam}, kind={self.kind!r})"


def _sign_rows(d: int) -> np.ndarray:
    """Full-rank d x d matrix with +/-1 entries, first row all ones."""
    if d & (d - 1) == 0:  # power of two: Sylvester-Hadamard
        h = np.array([[1.0]])
        while h.shape[0] < d:
            h = np.block([[h, h], [h, -h]])
        return h
    rows = np.ones((d, d))
    for k in range(1, d):
        rows[k, k] = -1.0
    return rows


def light_touch_basis(d: int) -> list[LightTouchObservable]:
    """Tomographically complete set of d**2 light-touch observables.

    For d = 2 this is the Pauli set {I, X, Y, Z}.  For larger d it combines
    d diagonal +/-1 observables (rows of a full-rank sign matrix) with X- and
    Y-type pair observables completed by the projector onto the untouched
    subspace, each of which has spectrum {+/-1}.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if d == 2:
        return [LightTouchObservable(PAULI_1Q[c], c) for c in PAULI_LETTERS]

    obs = []
    signs = _sign_rows(d)
    for k in range(d):
        obs.append(LightTouchObservable(np.diag(signs[k].astype(complex)), f"D{k}"))
    eye = np.eye(d, dtype=complex)
    for i in range(d):
        for j in range(i + 1, d):
            rest = eye.copy()
            rest[i, i] = 0.0
            rest[j, j] = 0.0
            x = rest.copy()
            x[i, j] = 1.0
            x[j, i] = 1.0
            obs.append(LightTouchObservable(x, f"X{i}.{j}"))
            y = rest.copy()
            y[i, j] = -1j
            y[j, i] = 1j
            obs.append(LightTouchObservable(y, f"Y{i}.{j}"))

    vecs = np.stack([o.matrix.reshape(-1) for o in obs])
    rank = np.linalg.matrix_rank(vecs, tol=1e-10)
    if rank != d * d:
        raise ValueError(f"light-touch set for d={d} is not complete (rank {rank} < {d * d})")
    return obs


class ObservableBasis:
    """Labelled observable family for one time slot of a correlator table."""

    def __init__(self, observables, descriptor: str):
        self.observables = list(observables)
        self.descriptor = descriptor
        self.labels = [o.label for o in self.observables]
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("observable labels must be unique")
        self._by_label = {o.label: o for o in self.observables}
        self.dim = int(self.observables[0].matrix.shape[0])
        for o in self.observables:
            if o.matrix.shape[0] != self.dim:
                raise DimensionMismatch("all observables in a basis must share one dimension")

    @classmethod
    def pauli(cls, n: int) -> "ObservableBasis":
        return cls(pauli_basis(n), f"pauli:{n}")

    @classmethod
    def light_touch(cls, d: int) -> "ObservableBasis":
        return cls(light_touch_basis(d), f"light_touch:{d}")

    @classmethod
    def from_descriptor(cls, descriptor: str) -> "ObservableBasis":
        kind, _, arg = descriptor.partition(":")
        if kind == "pauli":
            return cls.pauli(int(arg))
        if kind == "light_touch":
            return cls.light_touch(int(arg))
        raise ValueError(f"unknown basis descriptor {descriptor!r}")

    @classmethod
    def default_for_dim(cls, d: int) -> "ObservableBasis":
        if d >= 2 and d & (d - 1) == 0:
            return cls.pauli(d.bit_length() - 1)
        return cls.light_touch(d)

    def observable(self, label: str):
        return self._by_label[label]

    def matrix(self, label: str) -> np.ndarray:
        return self._by_label[label].matrix

    @property
    def identity_label(self) -> str:
        for o in self.observables:
            if o.is_identity:
                return o.label
        raise ValueError("basis has no identity observable")

    @property
    def is_orthogonal(self) -> bool:
        return self.descriptor.startswith("pauli:")

    def __contains__(self, label: str) -> bool:
        return label in self._by_label

    def __len__(self):
        return len(self.observables)

    def __repr__(self):
        return f"ObservableBasis({self.descriptor!r}, {len(self)} observables)"
