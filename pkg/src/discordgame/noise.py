"""Local Pauli noise and a robustness sweep over noise strength.

The sweep is this package's own operationalization of robustness: it reports
how the quantum strategy's payoff and every correlation measure respond
to depolarizing or dephasing noise applied to individual qubits.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import linalg, measures, qstate
from .games import make_paper_game
from .qstrategy import expected_quantum_payoff, make_paper_scheme

KRAUS_TOL = 1e-12
CSV_HEADER = ("strength", "payoff", "I", "D_BA_fixed", "D_AB_fixed", "D_BA_opt", "D_AB_opt", "negativity", "chsh")
_I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True, eq=False)
class NoiseChannel:
    kind: str
    strength: float
    kraus: tuple

    def __post_init__(self):
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError(f"strength {self.strength} outside [0, 1]")
        total = sum(k.conj().T @ k for k in self.kraus)
        if np.max(np.abs(total - _I2)) > KRAUS_TOL:
            raise ValueError(f"Kraus operators of {self.kind} channel are not trace preserving")


def depolarizing(p: float) -> NoiseChannel:
    """Kraus set ``{sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"strength {p} outside [0, 1]")
    ks = [math.sqrt(1 - 3 * p / 4) * _I2] + [math.sqrt(p / 4) * measures.PAULI[a] for a in "xyz"]
    return NoiseChannel("depolarizing", p, tuple(ks))


def dephasing(p: float) -> NoiseChannel:
    """Kraus set ``{sqrt(1-p/2) I, sqrt(p/2) Z}``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"strength {p} outside [0, 1]")
    return NoiseChannel("dephasing", p, (math.sqrt(1 - p / 2) * _I2, math.sqrt(p / 2) * measures.PAULI["z"]))


CHANNELS = {"depolarizing": depolarizing, "dephasing": dephasing}


def make_channel(kind: str, strength: float) -> NoiseChannel:
    try:
        return CHANNELS[kind](strength)
    except KeyError:
        raise ValueError(f"unknown channel kind {kind!r}") from None


def apply_local_channel(rho, ch: NoiseChannel, subsystem: str) -> qstate.DensityMatrix:
    rho = linalg.as_matrix(rho)
    out = np.zeros((4, 4), dtype=complex)
    for k in ch.kraus:
        big = linalg.kron(k, _I2) if subsystem == "A" else linalg.kron(_I2, k)
        out += big @ rho @ big.conj().T
    return qstate.DensityMatrix(out)


@dataclass(frozen=True)
class SweepRow:
    strength: float
    payoff: float
    I: float
    D_BA_fixed: float
    D_AB_fixed: float
    D_BA_opt: float
    D_AB_opt: float
    negativity: float
    chsh: float

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, name) for name in CSV_HEADER)


def noisy_state(rho, kind: str, strength: float, subsystems=("A", "B")) -> qstate.DensityMatrix:
    ch = make_channel(kind, strength)
    state = qstate.DensityMatrix(linalg.as_matrix(rho))
    for sub in subsystems:
        state = apply_local_channel(state, ch, sub)
    return state


def sweep(rho=None, kind: str = "depolarizing", subsystems=("A", "B"), steps: int = 21) -> list[SweepRow]:
    """Evaluate payoff and all measures at ``steps`` strengths evenly spaced on [0, 1].

    Fixed-basis discord uses the computational basis on the measured qubit.
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    if rho is None:
        rho = qstate.make_paper_state()
    game = make_paper_game("single_infoset")
    scheme = make_paper_scheme()
    rows = []
    for strength in np.linspace(0.0, 1.0, steps):
        state = noisy_state(rho, kind, float(strength), subsystems)
        rep = measures.correlation_report(state, bases={"comp": measures.computational})
        rows.append(
            SweepRow(
                strength=float(strength),
                payoff=expected_quantum_payoff(state, scheme, game),
                I=rep.I,
                D_BA_fixed=rep.fixed[("A", "comp")].D,
                D_AB_fixed=rep.fixed[("B", "comp")].D,
                D_BA_opt=rep.optimized["A"].D,
                D_AB_opt=rep.optimized["B"].D,
                negativity=rep.negativity,
                chsh=rep.chsh_max,
            )
        )
    return rows


def sweep_to_csv(rows, out=None) -> str:
    """Render rows as CSV; also write to the text stream ``out`` if given."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([f"{round(v, 12) + 0.0:.12g}" for v in row.as_tuple()])
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


def read_sweep_csv(text: str) -> list[SweepRow]:
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    return [SweepRow(*(float(v) for v in line)) for line in reader if line]
