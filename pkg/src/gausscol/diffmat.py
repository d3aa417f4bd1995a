"""Differentiation matrices for Gauss collocation and their certification.

Two rectangular matrices drive the scheme.  ``D`` differentiates the
polynomial interpolating values at the node set {tau_0, ..., tau_N}
(initial point plus interior nodes) and evaluates the derivative at the
interior nodes, so it has shape N x (N+1).  Its counterpart ``Ddag``
plays the same role for the costate and is defined entrywise from D and
the quadrature weights; its columns correspond to {tau_1, ..., tau_N+1}
(interior nodes plus terminal point).

``D`` is built by the barycentric formula with the diagonal filled by the
negative-sum trick, which keeps the entries accurate for large N.  Two
certified bounds are checked numerically: the inverse of the square
trailing block of D has sup-norm below 2, and the rows of the inverse of
the weighted block have Euclidean norm below sqrt(2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadrature import GaussRule, gauss_rule

__all__ = [
    "DiffMatrices",
    "CertEntry",
    "CertificationReport",
    "bary_weights",
    "bary_interp",
    "build_D",
    "build_Ddag",
    "build_matrices",
    "differentiate",
    "check_p1",
    "check_p2",
    "flip_deviation",
    "certify",
]


@dataclass(frozen=True)
class DiffMatrices:
    """Differentiation matrices and interpolation weights for one rule.

    Attributes
    ----------
    rule : GaussRule
    D : ndarray, shape (N, N+1)
        Row i gives the derivative at tau_i of the interpolant through
        {tau_0, ..., tau_N}.
    Ddag : ndarray, shape (N, N+1)
        Columns correspond to {tau_1, ..., tau_N+1}.
    bary_weights_state : ndarray, shape (N+1,)
        Barycentric weights for the node set {tau_0, ..., tau_N}.
    bary_weights_costate : ndarray, shape (N+1,)
        Barycentric weights for the node set {tau_1, ..., tau_N+1}.
    """

    rule: GaussRule
    D: np.ndarray
    Ddag: np.ndarray
    bary_weights_state: np.ndarray
    bary_weights_costate: np.ndarray


def bary_weights(nodes) -> np.ndarray:
    """Barycentric weights w_j = 1 / prod_{k != j} (x_j - x_k)."""
    nodes = np.asarray(nodes, dtype=float)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def _edge_factors(rule: GaussRule):
    """(1 + tau_j) and (1 - tau_j) for the interior nodes, plus the
    half-weight square roots sqrt((1 - tau_j)(1 + tau_j) w_j / 2).

    The two linear factors are exact near the matching endpoint and the
    product form avoids the cancellation of 1 - tau^2, so mirrored nodes
    give bitwise mirrored factors.
    """
    tau = rule.interior
    plus = 1.0 + tau
    minus = 1.0 - tau
    root = np.sqrt(minus * plus * rule.weights / 2.0)
    return plus, minus, root


def state_bary_weights(rule: GaussRule) -> np.ndarray:
    """Barycentric weights for {tau_0, ..., tau_N} in closed form.

    For this node set the product formula reduces, up to a common scale,
    to the derivative of the underlying orthogonal polynomial at its
    roots, which is available through the quadrature weights.  The closed
    form is both cheaper and more accurate than the O(N^2) products.
    """
    n = rule.n_collocation
    plus, _, root = _edge_factors(rule)
    w = np.empty(n + 1)
    w[0] = 1.0 if n % 2 == 0 else -1.0
    signs = np.where((n - np.arange(1, n + 1)) % 2 == 0, 1.0, -1.0)
    w[1:] = signs * root / plus
    return w


def costate_bary_weights(rule: GaussRule) -> np.ndarray:
    """Barycentric weights for {tau_1, ..., tau_N+1} in closed form."""
    n = rule.n_collocation
    _, minus, root = _edge_factors(rule)
    w = np.empty(n + 1)
    signs = np.where((n - np.arange(1, n + 1)) % 2 == 0, -1.0, 1.0)
    w[:n] = signs * root / minus
    w[n] = 1.0
    return w


def bary_interp(nodes, values, t: float, weights=None):
    """Evaluate the interpolating polynomial at scalar ``t``.

    Second barycentric formula; returns the stored value exactly when t
    coincides bitwise with a node.  ``values`` may be a vector or a
    matrix of per-node rows.  ``weights`` overrides the product-formula
    barycentric weights (any common scale works).
    """
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values, dtype=float)
    hit = np.nonzero(nodes == t)[0]
    if hit.size:
        return values[hit[0]]
    w = bary_weights(nodes) if weights is None else np.asarray(weights, dtype=float)
    c = w / (t - nodes)
    return (c @ values) / c.sum()


def build_D(rule: GaussRule) -> np.ndarray:
    """Differentiation matrix on {tau_0, ..., tau_N}, rows at interior nodes.

    Off-diagonal entries come from the barycentric ratio formula.  The
    diagonal at an interior node collapses to 1 / ((1 - tau)(1 + tau)):
    the Legendre ODE turns the usual sum of inverse node gaps into
    tau / (1 - tau^2), and the endpoint term 1 / (tau + 1) completes it.
    The factored form evaluates identically at mirrored nodes, so the
    diagonal carries no left-right asymmetry from roundoff.
    """
    nodes = rule.nodes[:-1]
    w = state_bary_weights(rule)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    full = (w[None, :] / w[:, None]) / diff
    interior = rule.interior
    diag = np.empty(rule.n_collocation + 1)
    diag[0] = 0.0
    diag[1:] = 1.0 / ((1.0 - interior) * (1.0 + interior))
    np.fill_diagonal(full, diag)
    return full[1:, :]


def build_Ddag(rule: GaussRule, D: np.ndarray) -> np.ndarray:
    """Costate differentiation matrix derived from D and the weights.

    Entries for columns 1..N are -(w_j / w_i) * D_ji; the last column is
    the negative row sum of the others, which makes Ddag annihilate
    constants exactly.
    """
    n = rule.n_collocation
    if D.shape != (n, n + 1):
        raise ValueError(f"D has shape {D.shape}, expected {(n, n + 1)}")
    w = rule.weights
    core = -(w[None, :] / w[:, None]) * D[:, 1:].T
    ddag = np.empty((n, n + 1))
    ddag[:, :n] = core
    ddag[:, n] = -core.sum(axis=1)
    return ddag


def build_matrices(rule: GaussRule) -> DiffMatrices:
    """Build both matrices and the interpolation weights for a rule."""
    D = build_D(rule)
    Ddag = build_Ddag(rule, D)
    ws = state_bary_weights(rule)
    wc = costate_bary_weights(rule)
    for arr in (D, Ddag, ws, wc):
        arr.setflags(write=False)
    return DiffMatrices(
        rule=rule, D=D, Ddag=Ddag, bary_weights_state=ws, bary_weights_costate=wc
    )


def differentiate(dm: DiffMatrices, nodal_values) -> np.ndarray:
    """Apply D to values sampled at {tau_0, ..., tau_N}."""
    values = np.asarray(nodal_values, dtype=float)
    n = dm.rule.n_collocation
    if values.shape[0] != n + 1:
        raise ValueError(f"expected {n + 1} nodal values, got {values.shape[0]}")
    return dm.D @ values


def check_p1(n: int) -> float:
    """Sup-norm of the inverse of the trailing square block of D.

    Computed from the explicit LU-based inverse.  Known to stay below 2;
    numerically it coincides with 1 + tau_N to high accuracy.  A singular
    factorization raises numpy.linalg.LinAlgError, which itself would
    signal a violation of the bound.
    """
    rule = gauss_rule(n)
    inv = np.linalg.inv(build_D(rule)[:, 1:])
    return float(np.abs(inv).sum(axis=1).max())


def check_p2(n: int) -> tuple[float, int]:
    """Largest Euclidean row norm of inv(W^(1/2) D_trailing).

    Returns the norm together with the 1-based index of the row attaining
    it.  The norm is known to stay below sqrt(2), attained in the last
    row.
    """
    rule = gauss_rule(n)
    block = np.sqrt(rule.weights)[:, None] * build_D(rule)[:, 1:]
    inv = np.linalg.inv(block)
    norms = np.sqrt((inv**2).sum(axis=1))
    row = int(np.argmax(norms))
    return float(norms[row]), row + 1


def flip_deviation(D: np.ndarray, Ddag: np.ndarray) -> float:
    """Max deviation in the exchange identity between D and Ddag.

    The trailing square block of D equals the doubly reversed, negated
    square block of Ddag; returns max |D_block + reversed(Ddag_block)|.
    """
    a = D[:, 1:]
    b = Ddag[:, :-1]
    return float(np.abs(a + b[::-1, ::-1]).max())


@dataclass(frozen=True)
class CertEntry:
    """Certification measurements for a single N."""

    n_collocation: int
    p1_norm: float
    p1_identity_gap: float
    p2_norm: float
    p2_argmax_row: int
    flip_max_dev: float
    flags: tuple[str, ...]


@dataclass(frozen=True)
class CertificationReport:
    entries: tuple[CertEntry, ...]

    @property
    def flagged(self) -> bool:
        return any(entry.flags for entry in self.entries)


_SLACK = 1e-9


def certify(n_list) -> CertificationReport:
    """Measure both norm bounds and the flip identity for each N.

    Any value beyond its certified bound (with 1e-9 slack for rounding)
    is flagged rather than raised, so a report is always produced.
    """
    entries = []
    for n in n_list:
        rule = gauss_rule(int(n))
        D = build_D(rule)
        ddag = build_Ddag(rule, D)
        flags = []
        try:
            inv = np.linalg.inv(D[:, 1:])
            p1 = float(np.abs(inv).sum(axis=1).max())
            block = np.sqrt(rule.weights)[:, None] * D[:, 1:]
            winv = np.linalg.inv(block)
            norms = np.sqrt((winv**2).sum(axis=1))
            row = int(np.argmax(norms)) + 1
            p2 = float(norms.max())
        except np.linalg.LinAlgError:
            flags.append("singular")
            p1 = p2 = float("nan")
            row = 0
        gap = abs(p1 - (1.0 + rule.nodes[-2])) if np.isfinite(p1) else float("nan")
        flip = flip_deviation(D, ddag)
        if np.isfinite(p1) and p1 > 2.0 + _SLACK:
            flags.append("p1>2")
        if np.isfinite(p2) and p2 > np.sqrt(2.0) + _SLACK:
            flags.append("p2>sqrt2")
        entries.append(
            CertEntry(
                n_collocation=int(n),
                p1_norm=p1,
                p1_identity_gap=gap,
                p2_norm=p2,
                p2_argmax_row=row,
                flip_max_dev=flip,
                flags=tuple(flags),
            )
        )
    return CertificationReport(entries=tuple(entries))
