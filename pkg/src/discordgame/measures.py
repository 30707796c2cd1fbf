"""Correlation measures for two-qubit states.

Conventions: entropies are in bits, subsystem A is the high-order qubit, and a
measurement "on A" yields the one-way quantities J(B|A) and D(B|A).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .qstate import basis_ket

PROJECTOR_TOL = 1e-12
ZERO_PROB = 1e-12
DISCORD_SLACK = 1e-9
TIE_TOL = 1e-12

DEFAULT_THETA_POINTS = 37
DEFAULT_PHI_POINTS = 72
REFINE_STEP = 1e-4
MAX_MOVES = 64

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_I2 = np.eye(2, dtype=complex)


def other(subsystem: str) -> str:
    if subsystem not in linalg.SUBSYSTEMS:
        raise ValueError(f"unknown subsystem {subsystem!r}")
    return "B" if subsystem == "A" else "A"


def direction_label(measured: str) -> str:
    """``"B|A"`` for a measurement on A."""
    return f"{other(measured)}|{measured}"


@dataclass(frozen=True)
class BlochAngles:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        if not 0.0 <= self.phi < 2 * math.pi:
            raise ValueError(f"phi={self.phi} outside [0, 2pi)")


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Rank-1 projective measurement on one qubit of a two-qubit system."""

    subsystem: str
    projectors: tuple
    labels: tuple = ("0", "1")

    def __post_init__(self):
        other(self.subsystem)
        projs = []
        for p in self.projectors:
            p = linalg.as_matrix(p).copy()
            if p.shape != (2, 2):
                raise ValueError("projectors must be 2x2")
            if np.max(np.abs(p @ p - p)) > PROJECTOR_TOL or linalg.hermiticity_residual(p) > PROJECTOR_TOL:
                raise ValueError("not an orthogonal projector")
            if abs(np.trace(p) - 1.0) > PROJECTOR_TOL:
                raise ValueError("projectors must be rank 1")
            p.setflags(write=False)
            projs.append(p)
        if len(projs) != 2 or len(self.labels) != 2:
            raise ValueError("a qubit measurement has exactly two outcomes")
        if np.max(np.abs(projs[0] + projs[1] - _I2)) > PROJECTOR_TOL:
            raise ValueError("projectors do not sum to the identity")
        object.__setattr__(self, "projectors", tuple(projs))
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_kets(cls, subsystem, kets, labels) -> "ProjectiveMeasurement":
        return cls(subsystem, tuple(k.projector() for k in kets), tuple(labels))

    def embedded(self, index: int) -> np.ndarray:
        """The outcome projector lifted to the 4x4 space."""
        p = self.projectors[index]
        return linalg.kron(p, _I2) if self.subsystem == "A" else linalg.kron(_I2, p)


def computational(subsystem: str) -> ProjectiveMeasurement:
    return ProjectiveMeasurement.from_kets(subsystem, (basis_ket("zero"), basis_ket("one")), ("0", "1"))


def x_basis(subsystem: str) -> ProjectiveMeasurement:
    return ProjectiveMeasurement.from_kets(subsystem, (basis_ket("plus"), basis_ket("minus")), ("+", "-"))


def _angle_projectors(theta, phi) -> np.ndarray:
    """Stack of projectors onto cos(t/2)|0> + e^{i phi} sin(t/2)|1>, shape (..., 2, 2)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    psi = np.stack(
        np.broadcast_arrays(np.cos(theta / 2) + 0j, np.exp(1j * phi) * np.sin(theta / 2)), axis=-1
    )
    return psi[..., :, None] * psi[..., None, :].conj()


def measurement_from_angles(subsystem: str, angles: BlochAngles) -> ProjectiveMeasurement:
    p = _angle_projectors(angles.theta, angles.phi)
    return ProjectiveMeasurement(subsystem, (p, _I2 - p), ("n+", "n-"))


def mutual_information(rho) -> float:
    """``S(rho_A) + S(rho_B) - S(rho_AB)``."""
    s_a = linalg.von_neumann_entropy(linalg.partial_trace(rho, "A"))
    s_b = linalg.von_neumann_entropy(linalg.partial_trace(rho, "B"))
    return s_a + s_b - linalg.von_neumann_entropy(rho)


def conditional_states(rho, m: ProjectiveMeasurement) -> list[tuple[float, np.ndarray | None]]:
    """Outcome probabilities and post-measurement states of the unmeasured qubit.

    Outcomes with probability below ``1e-12`` are returned as ``(0.0, None)``.
    """
    rho = linalg.as_matrix(rho)
    keep = other(m.subsystem)
    out = []
    for i in range(2):
        proj = m.embedded(i)
        collapsed = proj @ rho @ proj
        p = float(np.real(np.trace(collapsed)))
        if p < ZERO_PROB:
            out.append((0.0, None))
        else:
            out.append((p, linalg.partial_trace(collapsed, keep) / p))
    return out


def classical_correlation_fixed(rho, m: ProjectiveMeasurement) -> float:
    """``S(rho_unmeasured) - sum_i p_i S(rho_unmeasured|i)`` for a fixed measurement."""
    s_unmeasured = linalg.von_neumann_entropy(linalg.partial_trace(rho, other(m.subsystem)))
    cond = sum(p * linalg.von_neumann_entropy(s) for p, s in conditional_states(rho, m) if s is not None)
    return s_unmeasured - cond


def _clamp_discord(d: float) -> float:
    return 0.0 if -DISCORD_SLACK <= d < 0.0 else d


def discord_fixed(rho, m: ProjectiveMeasurement) -> float:
    return _clamp_discord(mutual_information(rho) - classical_correlation_fixed(rho, m))


def classical_correlation_grid(rho, subsystem: str, theta, phi) -> np.ndarray:
    """Vectorized J for every (theta, phi) pair after broadcasting.

    Same quantity as :func:`classical_correlation_fixed` with
    :func:`measurement_from_angles`, evaluated in one batch.
    """
    rho = linalg.as_matrix(rho)
    t = rho.reshape(2, 2, 2, 2)
    p0 = _angle_projectors(theta, phi)
    shape = p0.shape[:-2]
    projs = np.stack([p0, _I2 - p0], axis=-3).reshape(-1, 2, 2)
    # unnormalized conditional state of the unmeasured qubit: Tr_measured[(P (x) I) rho]
    if subsystem == "A":
        cond = np.einsum("nxy,ybxc->nbc", projs, t)
    elif subsystem == "B":
        cond = np.einsum("nxy,ayzx->naz", projs, t)
    else:
        raise ValueError(f"unknown subsystem {subsystem!r}")
    probs = np.real(np.einsum("nii->n", cond))
    safe = np.where(probs < ZERO_PROB, 1.0, probs)
    cond = cond / safe[:, None, None]
    cond = 0.5 * (cond + np.conj(np.swapaxes(cond, -1, -2)))
    evals = np.clip(np.linalg.eigvalsh(cond), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.sum(np.where(evals > 0, evals * np.log2(evals), 0.0), axis=-1)
    h = np.where(probs < ZERO_PROB, 0.0, h)
    cond_entropy = (np.where(probs < ZERO_PROB, 0.0, probs) * h).reshape(shape + (2,)).sum(axis=-1)
    s_unmeasured = linalg.von_neumann_entropy(linalg.partial_trace(rho, other(subsystem)))
    return s_unmeasured - cond_entropy


def _bloch_vector(theta: float, phi: float) -> np.ndarray:
    return np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])


def _vector_angles(vecs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Angles of unit vectors, with phi in [0, 2pi) and phi = 0 exactly at the poles."""
    theta = np.arccos(np.clip(vecs[:, 2], -1.0, 1.0))
    at_pole = np.hypot(vecs[:, 0], vecs[:, 1]) < 1e-15
    phi = np.where(at_pole, 0.0, np.mod(np.arctan2(vecs[:, 1], vecs[:, 0]), 2 * math.pi))
    phi = np.where(phi >= 2 * math.pi, 0.0, phi)
    return theta, phi


def _tangent_basis(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ref = np.array([0.0, 0.0, 1.0]) if abs(n[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    u = np.cross(ref, n)
    u /= np.linalg.norm(u)
    return u, np.cross(n, u)


def _pick(thetas, phis, values) -> int:
    """Index of the maximal value; near-ties go to the lexicographically smallest angles."""
    best = np.max(values)
    tied = np.flatnonzero(values >= best - TIE_TOL)
    return int(min(tied, key=lambda k: (thetas[k], phis[k])))


def discord_optimized(
    rho,
    subsystem: str,
    theta_points: int = DEFAULT_THETA_POINTS,
    phi_points: int = DEFAULT_PHI_POINTS,
    step_tol: float = REFINE_STEP,
) -> tuple[float, BlochAngles]:
    """Discord minimized over projective measurements on ``subsystem``.

    A coarse ``theta_points x phi_points`` grid over the Bloch sphere is
    followed by a compass search: the incumbent Bloch vector moves across a
    3x3 stencil in its tangent plane until no neighbour improves J, then the
    step is halved, until it falls below ``step_tol`` radians. The
    reduction is order independent: J values within ``1e-12`` of the maximum
    count as ties and go to the lexicographically smallest ``(theta, phi)``.

    Returns
    -------
    (float, BlochAngles)
        Optimized discord in bits and the measurement direction attaining it.
    """
    if theta_points < 2 or phi_points < 1:
        raise ValueError("grid needs theta_points >= 2 and phi_points >= 1")
    rho = linalg.as_matrix(rho)
    info = mutual_information(rho)

    th = np.linspace(0.0, math.pi, theta_points)
    ph = np.arange(phi_points) * (2 * math.pi / phi_points)
    tg, pg = (a.ravel() for a in np.meshgrid(th, ph, indexing="ij"))
    jg = classical_correlation_grid(rho, subsystem, tg, pg)
    k = _pick(tg, pg, jg)
    theta, phi, best_j = float(tg[k]), float(pg[k]), float(jg[k])

    # compass search in the tangent plane of the Bloch sphere; (theta, phi)
    # steps would stall at the poles where phi is degenerate
    h = math.pi / (theta_points - 1)
    offs = np.array([(a, b) for a in (-1.0, 0.0, 1.0) for b in (-1.0, 0.0, 1.0)])
    while h >= step_tol:
        h /= 2
        for _ in range(MAX_MOVES):
            n = _bloch_vector(theta, phi)
            u, v = _tangent_basis(n)
            cand = n + h * (offs[:, :1] * u + offs[:, 1:] * v)
            ct, cp = _vector_angles(cand / np.linalg.norm(cand, axis=1, keepdims=True))
            cj = classical_correlation_grid(rho, subsystem, ct, cp)
            # the incumbent competes with its previous value so J never decreases
            ct = np.append(ct, theta)
            cp = np.append(cp, phi)
            cj = np.append(cj, best_j)
            k = _pick(ct, cp, cj)
            if cj[k] <= best_j + TIE_TOL:
                break
            theta, phi, best_j = float(ct[k]), float(cp[k]), float(cj[k])

    if phi >= 2 * math.pi:
        phi = 0.0
    return _clamp_discord(info - best_j), BlochAngles(theta, phi)


def partial_transpose(rho) -> np.ndarray:
    """Partial transpose over B."""
    t = linalg.as_matrix(rho).reshape(2, 2, 2, 2)
    return np.einsum("ijkl->ilkj", t).reshape(4, 4)


def negativity(rho) -> float:
    """Sum of the magnitudes of the negative eigenvalues of the partial transpose."""
    evals = linalg.hermitian_eigenvalues(partial_transpose(rho))
    return float(-np.sum(evals[evals < 0.0])) + 0.0


def correlation_matrix(rho) -> np.ndarray:
    """``T[i, j] = Tr[rho (sigma_i (x) sigma_j)]`` over x, y, z."""
    rho = linalg.as_matrix(rho)
    paulis = [PAULI[k] for k in "xyz"]
    return np.array([[np.real(np.trace(rho @ linalg.kron(si, sj))) for sj in paulis] for si in paulis])


def chsh_max(rho) -> float:
    """Maximal CHSH value over local settings (Horodecki): ``2 sqrt(m1 + m2)``."""
    t = correlation_matrix(rho)
    evals = np.sort(np.linalg.eigvalsh(t.T @ t))[::-1]
    return 2.0 * math.sqrt(max(evals[0] + evals[1], 0.0))


@dataclass(frozen=True)
class FixedCorrelation:
    measured: str
    basis: str
    J: float
    D: float


@dataclass(frozen=True)
class OptimizedCorrelation:
    measured: str
    J: float
    D: float
    angles: BlochAngles


@dataclass(frozen=True)
class CorrelationReport:
    S_A: float
    S_B: float
    S_AB: float
    I: float
    fixed: dict = field(default_factory=dict)
    optimized: dict = field(default_factory=dict)
    negativity: float = 0.0
    chsh_max: float = 0.0

    def to_dict(self) -> dict:
        return {
            "S_A": self.S_A,
            "S_B": self.S_B,
            "S_AB": self.S_AB,
            "I": self.I,
            "fixed": [
                {"direction": direction_label(f.measured), "measured": f.measured, "basis": f.basis, "J": f.J, "D": f.D}
                for f in self.fixed.values()
            ],
            "optimized": [
                {
                    "direction": direction_label(o.measured),
                    "measured": o.measured,
                    "J": o.J,
                    "D": o.D,
                    "theta": o.angles.theta,
                    "phi": o.angles.phi,
                }
                for o in self.optimized.values()
            ],
            "negativity": self.negativity,
            "chsh_max": self.chsh_max,
        }


def correlation_report(
    rho,
    bases: dict | None = None,
    theta_points: int = DEFAULT_THETA_POINTS,
    phi_points: int = DEFAULT_PHI_POINTS,
    subsystems=linalg.SUBSYSTEMS,
) -> CorrelationReport:
    """Every measure for one state.

    ``bases`` maps a basis name to a factory ``subsystem -> ProjectiveMeasurement``;
    by default the computational and X bases are used on each subsystem.
    """
    rho = linalg.as_matrix(rho)
    if bases is None:
        bases = {"comp": computational, "x": x_basis}
    s_a = linalg.von_neumann_entropy(linalg.partial_trace(rho, "A"))
    s_b = linalg.von_neumann_entropy(linalg.partial_trace(rho, "B"))
    s_ab = linalg.von_neumann_entropy(rho)
    info = s_a + s_b - s_ab

    fixed = {}
    optimized = {}
    for sub in subsystems:
        for name, factory in bases.items():
            m = factory(sub)
            j = classical_correlation_fixed(rho, m)
            fixed[(sub, name)] = FixedCorrelation(sub, name, j, _clamp_discord(info - j))
        d_opt, angles = discord_optimized(rho, sub, theta_points, phi_points)
        optimized[sub] = OptimizedCorrelation(sub, info - d_opt, d_opt, angles)

    return CorrelationReport(
        S_A=s_a,
        S_B=s_b,
        S_AB=s_ab,
        I=info,
        fixed=fixed,
        optimized=optimized,
        negativity=negativity(rho),
        chsh_max=chsh_max(rho),
    )
