"""Operator algebra for a single driven Lambda atom.

Level ordering is (|1>, |2>, |e>). The rotating frame puts the excited
level at zero energy and the ground levels at -delta and +delta, so the
Hamiltonian of the symmetrically driven atom reads (units of gamma)

    H = -delta |1><1| + delta |2><2|
        - (W1 |e><1| + W2 |e><2| + h.c.)

with W1, W2 the (possibly complex) Rabi frequencies of the two arms. The
excited state decays at total rate 2 into |1> and |2> with equal branching,
so each optical coherence damps at rate 1. Ground-state decoherence gamma0
is modeled as symmetric population exchange |1><2|, |2><1| at rate gamma0,
which damps the ground coherence at gamma0 and lifts the zero-drive
degeneracy of the generator.

Everything here works on plain 3x3 ndarrays; the Liouvillian acts on the
row-major vectorization vec(rho)[3a+b] = rho[a, b].
"""

from __future__ import annotations

import numpy as np

from .params import DegenerateSteadyStateError, NumericalError

# basis indices
G1, G2, EXC = 0, 1, 2

# relative weight of the second-smallest singular value below which the
# stationary kernel is treated as degenerate
DEGENERACY_RTOL = 1e-10


def unit(a: int, b: int) -> np.ndarray:
    """Matrix unit |a><b| as a complex 3x3 array."""
    m = np.zeros((3, 3), dtype=complex)
    m[a, b] = 1.0
    return m


# single-atom fluctuation basis, in the order used by the Langevin model:
# optical coherences, their adjoints, ground coherence pair, ground
# populations. |e><e| is eliminated through trace conservation.
FLUCT_LABELS = ("p1", "p1_dag", "p2", "p2_dag", "j", "j_dag", "pi1", "pi2")
FLUCT_OPS = (
    unit(G1, EXC),   # p1      = |1><e|
    unit(EXC, G1),   # p1_dag  = |e><1|
    unit(G2, EXC),   # p2      = |2><e|
    unit(EXC, G2),   # p2_dag  = |e><2|
    unit(G1, G2),    # j       = |1><2|
    unit(G2, G1),    # j_dag   = |2><1|
    unit(G1, G1),    # pi1     = |1><1|
    unit(G2, G2),    # pi2     = |2><2|
)


def hamiltonian(omega1: complex, omega2: complex, delta_bar: float) -> np.ndarray:
    """Rotating-frame Hamiltonian for given Rabi drives and detuning."""
    h = np.zeros((3, 3), dtype=complex)
    h[G1, G1] = -delta_bar
    h[G2, G2] = delta_bar
    h[EXC, G1] = -omega1
    h[G1, EXC] = -np.conj(omega1)
    h[EXC, G2] = -omega2
    h[G2, EXC] = -np.conj(omega2)
    return h


def collapse_ops(gamma0: float = 0.0) -> list[np.ndarray]:
    """Jump operators: radiative decay plus optional ground-state exchange."""
    ops = [unit(G1, EXC), unit(G2, EXC)]  # rate gamma = 1 each
    if gamma0 > 0.0:
        ops.append(np.sqrt(gamma0) * unit(G1, G2))
        ops.append(np.sqrt(gamma0) * unit(G2, G1))
    return ops


def liouvillian(h: np.ndarray, cops: list[np.ndarray]) -> np.ndarray:
    """9x9 generator of rho_dot = L vec(rho), row-major vectorization."""
    eye = np.eye(3)
    lv = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for c in cops:
        cdc = c.conj().T @ c
        lv += np.kron(c, c.conj())
        lv -= 0.5 * (np.kron(cdc, eye) + np.kron(eye, cdc.T))
    return lv


def adjoint_action(x: np.ndarray, h: np.ndarray, cops: list[np.ndarray]) -> np.ndarray:
    """Heisenberg-picture generator: i[H, X] + sum_k D_k^dag(X)."""
    out = 1j * (h @ x - x @ h)
    for c in cops:
        cdc = c.conj().T @ c
        out += c.conj().T @ x @ c - 0.5 * (cdc @ x + x @ cdc)
    return out


def steady_rho(h: np.ndarray, cops: list[np.ndarray]) -> tuple[np.ndarray, float]:
    """Unique stationary density matrix of the generator.

    Returns (rho, residual) where residual = max|L vec(rho)|. Raises
    DegenerateSteadyStateError when the stationary kernel has more than one
    dimension, NumericalError when the solve is untrustworthy.
    """
    lv = liouvillian(h, cops)
    svals = np.linalg.svd(lv, compute_uv=False)
    if svals[-2] < DEGENERACY_RTOL * svals[0]:
        raise DegenerateSteadyStateError(
            "stationary kernel is degenerate; add a small gamma0 to select "
            "a unique steady state"
        )

    # replace the (e,e) row by the trace constraint
    a = lv.copy()
    trace_row = np.zeros(9, dtype=complex)
    trace_row[[0, 4, 8]] = 1.0
    a[8] = trace_row
    b = np.zeros(9, dtype=complex)
    b[8] = 1.0
    try:
        rho_vec = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded by svd
        raise NumericalError(f"steady-state solve failed: {exc}") from exc

    rho = rho_vec.reshape(3, 3)
    rho = 0.5 * (rho + rho.conj().T)  # enforce hermiticity exactly
    residual = float(np.max(np.abs(lv @ rho.reshape(9))))
    if residual > 1e-10:
        raise NumericalError(f"steady-state residual {residual:.3e} too large")
    return rho, residual


def drift_block(h: np.ndarray, cops: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Linear flow of the fluctuation-basis expectations.

    d<b_x>/dt = sum_y M[x, y] <b_y> + const[x]. The |e><e| component is
    eliminated via the trace, which is what makes the constant term appear.
    """
    m = np.zeros((8, 8), dtype=complex)
    const = np.zeros(8, dtype=complex)
    for x, bx in enumerate(FLUCT_OPS):
        flow = adjoint_action(bx, h, cops)
        # <b_y> = rho[b, a] for b_y = |a><b|; expansion coefficient of
        # |a><b| in `flow` is flow[a, b]
        coeff_ee = flow[EXC, EXC]
        const[x] = coeff_ee  # from sigma_ee = 1 - pi1 - pi2
        for y, by in enumerate(FLUCT_OPS):
            (a,), (b,) = np.nonzero(by)[0], np.nonzero(by)[1]
            m[x, y] = flow[a, b]
        m[x, FLUCT_LABELS.index("pi1")] -= coeff_ee
        m[x, FLUCT_LABELS.index("pi2")] -= coeff_ee
    return m, const


def einstein_diffusion(rho: np.ndarray, cops: list[np.ndarray]) -> np.ndarray:
    """Langevin noise correlations of the fluctuation basis.

    D[x, y] such that <F_x(t) F_y(t')> = D[x, y] delta(t - t'), from the
    generalized Einstein relation D = sum_k <[c_k^dag, b_x][b_y, c_k]>
    evaluated on the stationary state.
    """
    d = np.zeros((8, 8), dtype=complex)
    for c in cops:
        cd = c.conj().T
        left = [cd @ bx - bx @ cd for bx in FLUCT_OPS]
        right = [by @ c - c @ by for by in FLUCT_OPS]
        for x in range(8):
            for y in range(8):
                d[x, y] += np.trace(rho @ left[x] @ right[y])
    return d


def expectations(rho: np.ndarray) -> np.ndarray:
    """Fluctuation-basis expectation values <b_x> = Tr(rho b_x)."""
    return np.array([np.trace(rho @ op) for op in FLUCT_OPS])
