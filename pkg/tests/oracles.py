"""Independent numerical oracles used to freeze expected test values.

These deliberately avoid the implementation paths they check: the
Clebsch-Gordan oracle builds coupled states by ladder operators and
null-space extraction in the product basis (no Racah sum), and the phase
average oracle integrates over an explicit phase grid.
"""

import numpy as np


def _single_ops(j: float):
    d = round(2 * j) + 1
    m = j - np.arange(d)
    jp = np.zeros((d, d))
    jp[np.arange(d - 1), np.arange(1, d)] = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    return jp, jp.T, np.diag(m)


def ladder_cg_table(j1: float, j2: float) -> dict:
    """All <j1 m1; j2 m2 | J M> by explicit construction in the product space.

    For each total J the stretched state |J, J> is the null vector of the
    total raising operator inside the M = J sector (unique because coupling
    two irreps is multiplicity free), signed so the largest-m1 component is
    positive (Condon-Shortley).  Lower M states follow from the total
    lowering operator.  Returns {(m1, m2, J, M): coefficient}.
    """
    d1, d2 = round(2 * j1) + 1, round(2 * j2) + 1
    p1, _, z1 = _single_ops(j1)
    p2, _, z2 = _single_ops(j2)
    eye1, eye2 = np.eye(d1), np.eye(d2)
    jp = np.kron(p1, eye2) + np.kron(eye1, p2)
    jm = jp.T
    mz = np.diag(np.kron(z1, eye2) + np.kron(eye1, z2))

    table = {}
    j_total = j1 + j2
    while j_total >= abs(j1 - j2) - 1e-9:
        sector = np.where(np.abs(mz - j_total) < 1e-9)[0]
        _, _, vt = np.linalg.svd(jp[:, sector])
        null = vt[-1]
        vec = np.zeros(d1 * d2)
        vec[sector] = null
        m1_in_sector = j1 - (sector // d2)
        anchor = sector[np.argmax(m1_in_sector)]
        if vec[anchor] < 0:
            vec = -vec
        m_total = j_total
        table[(j_total, m_total)] = vec
        while m_total > -j_total + 1e-9:
            norm = np.sqrt(j_total * (j_total + 1) - m_total * (m_total - 1))
            vec = jm @ vec / norm
            m_total -= 1
            table[(j_total, m_total)] = vec
        j_total -= 1

    out = {}
    for (J, M), vec in table.items():
        for idx, c in enumerate(vec):
            m1 = j1 - idx // d2
            m2 = j2 - idx % d2
            if abs(c) > 1e-13 or abs(m1 + m2 - M) < 1e-9:
                out[(m1, m2, J, M)] = c
    return out


def uniform_phase_average(dx: np.ndarray, m_values: np.ndarray, initial: np.ndarray, n: int = 4096):
    """Average populations of Dx(pi/2) Dz(phi) Dx(pi/2) |initial> over a
    uniform phi grid (exact for trigonometric polynomials of order < n/2)."""
    phis = 2 * np.pi * np.arange(n) / n
    v = dx @ initial
    phases = np.exp(-1j * np.multiply.outer(phis, m_values))
    amps = (phases * v[None, :]) @ dx.T
    return np.mean(np.abs(amps) ** 2, axis=0)
