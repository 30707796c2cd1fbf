"""Kets, density matrices and the discordant two-qubit state used by the strategy."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import linalg

KET_NORM_TOL = 1e-12
TRACE_TOL = 1e-10


class StateParseError(ValueError):
    """A state document could not be parsed into a matrix."""


class StateValidationError(ValueError):
    """A matrix failed the density-matrix checks."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("invalid density matrix: " + "; ".join(report.failures))


@dataclass(frozen=True)
class Ket:
    """Normalized state vector with the global phase fixed.

    The first nonzero amplitude is rotated onto the positive real axis so
    that equal states always serialize identically.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1).copy()
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > KET_NORM_TOL:
            raise ValueError(f"ket is not normalized (norm {norm!r})")
        nz = np.flatnonzero(np.abs(amps) > 1e-15)
        if nz.size:
            lead = amps[nz[0]]
            amps = amps * (abs(lead) / lead)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def inner(self, other: "Ket") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


_S = 1 / np.sqrt(2)
_BASIS_AMPLITUDES = {
    "zero": (1.0, 0.0),
    "one": (0.0, 1.0),
    "plus": (_S, _S),
    "minus": (_S, -_S),
}


def basis_ket(label: str) -> Ket:
    """One of ``zero``, ``one``, ``plus``, ``minus``."""
    try:
        return Ket(np.array(_BASIS_AMPLITUDES[label], dtype=complex))
    except KeyError:
        raise ValueError(f"unknown basis ket {label!r}") from None


@dataclass(frozen=True)
class ValidationReport:
    hermiticity_residual: float
    trace_residual: float
    min_eigenvalue: float
    failures: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Immutable wrapper around a validated square complex matrix.

    ``ensemble`` optionally carries a product-state decomposition
    ``[(p_i, rho_A_i, rho_B_i), ...]`` that reproduces the matrix.
    """

    matrix: np.ndarray
    ensemble: tuple = field(default=(), repr=False)

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix).copy()
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        report = validate(m)
        if not report.passed:
            raise StateValidationError(report)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @classmethod
    def from_ket(cls, ket: Ket) -> "DensityMatrix":
        return cls(ket.projector())

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
        }

    @classmethod
    def from_json(cls, doc) -> "DensityMatrix":
        return cls(parse_state_json(doc))


def validate(rho) -> ValidationReport:
    """Check Hermiticity, unit trace and positivity of ``rho``.

    Never raises for a square matrix; failures are listed in the report.
    """
    m = linalg.as_matrix(rho)
    herm = linalg.hermiticity_residual(m)
    tr_resid = abs(complex(np.trace(m)) - 1.0)
    # eigenvalues of the Hermitian part, so a non-Hermitian input still gets a number
    min_eig = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())
    failures = []
    if herm > linalg.HERMITIAN_TOL:
        failures.append(f"not Hermitian (residual {herm:.3e})")
    if tr_resid > TRACE_TOL:
        failures.append(f"trace differs from 1 by {tr_resid:.3e}")
    if min_eig < -linalg.NEGATIVE_EIG_TOL:
        failures.append(f"negative eigenvalue {min_eig:.3e}")
    return ValidationReport(herm, tr_resid, min_eig, tuple(failures))


def make_separable_decomposition() -> list[tuple[float, DensityMatrix, DensityMatrix]]:
    """The two-term product ensemble ``{(1/2, |0><0|, |+><+|), (1/2, |1><1|, |-><-|)}``."""
    return [
        (0.5, DensityMatrix.from_ket(basis_ket("zero")), DensityMatrix.from_ket(basis_ket("plus"))),
        (0.5, DensityMatrix.from_ket(basis_ket("one")), DensityMatrix.from_ket(basis_ket("minus"))),
    ]


def recombine(ensemble) -> np.ndarray:
    """``sum_i p_i kron(rho_A_i, rho_B_i)``."""
    return sum(p * linalg.kron(a, b) for p, a, b in ensemble)


def make_paper_state() -> DensityMatrix:
    """Equal mixture of ``|0>|+>`` and ``|1>|->``.

    Explicitly ``1/4 * [[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, -1], [0, 0, -1, 1]]``.
    """
    ens = make_separable_decomposition()
    return DensityMatrix(recombine(ens), ensemble=tuple(ens))


def product_state(rho_a, rho_b) -> DensityMatrix:
    return DensityMatrix(linalg.kron(rho_a, rho_b))


def maximally_mixed(dim: int = 4) -> DensityMatrix:
    return DensityMatrix(np.eye(dim, dtype=complex) / dim)


def bell_state() -> DensityMatrix:
    """``|Phi+><Phi+|`` with ``|Phi+> = (|00> + |11>)/sqrt(2)``."""
    return DensityMatrix.from_ket(Ket(np.array([_S, 0, 0, _S], dtype=complex)))


def parse_state_json(doc) -> np.ndarray:
    """Turn a ``{"dim", "re", "im"}`` document (dict or JSON text) into a matrix.

    Only structural problems raise :class:`StateParseError`; physical validity
    is checked separately.
    """
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise StateParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise StateParseError("state document must be a JSON object")
    try:
        dim = doc["dim"]
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise StateParseError(f"malformed state document: {exc!r}") from exc
    if not isinstance(dim, int) or dim < 1:
        raise StateParseError(f"'dim' must be a positive integer, got {dim!r}")
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise StateParseError(f"'re' and 'im' must both be {dim}x{dim}")
    return re + 1j * im


def load_state(path) -> DensityMatrix:
    """Read and validate a state file.

    Raises :class:`StateParseError` or :class:`StateValidationError`.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise StateParseError(f"cannot read {path}: {exc}") from exc
    return DensityMatrix(parse_state_json(text))
