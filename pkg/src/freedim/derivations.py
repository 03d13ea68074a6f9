"""Derivations with prescribed Hilbert-Schmidt values and their dual operators.

A tuple T = (T_1..T_n) of Hilbert-Schmidt operators prescribes a derivation
on the free polynomial algebra in the generators: it sends X_j to T_j and
extends by the Leibniz rule, with HS a bimodule over left multiplications
through operator composition.  Whether that free assignment descends through
the relations of the algebra is decided by a least-squares fit over words;
when it does, the adjoint relation <xi, Q 1> = <P1, dT(Q)>_HS determines a
conjugate vector xi, and an operator Y with Y 1 = 0, [Y, L_{X_j}] = T_j and
Y* 1 = xi is assembled column by column on the cyclic basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .algebra import GnsStructure, TracialAlgebra, gns_structure
from .errors import IllDefined, ResidualTooLarge
from .tolerances import RESIDUAL_TOL, WELLDEF_TOL


@dataclass
class DerivationSpec:
    """Prescribed values of a derivation on the generators.

    Either an explicit tuple of D x D matrices, or the distinguished
    assignment placing the trace-vector projection in one slot and zero in
    the others.
    """

    targets: Optional[tuple[np.ndarray, ...]] = None
    fdq_slot: Optional[int] = None

    @classmethod
    def from_targets(cls, targets: Sequence[np.ndarray]) -> "DerivationSpec":
        return cls(targets=tuple(np.asarray(t, dtype=complex) for t in targets))

    @classmethod
    def free_difference_quotient(cls, slot: int) -> "DerivationSpec":
        return cls(fdq_slot=int(slot))

    def resolve(self, gns: GnsStructure, n: int) -> tuple[np.ndarray, ...]:
        if self.targets is not None:
            if len(self.targets) != n:
                raise IllDefined(
                    f"{len(self.targets)} target operators for {n} generators"
                )
            return self.targets
        if self.fdq_slot is None or not 0 <= self.fdq_slot < n:
            raise IllDefined(f"slot {self.fdq_slot} out of range for {n} generators")
        out = [np.zeros((gns.dim, gns.dim), dtype=complex) for _ in range(n)]
        out[self.fdq_slot] = gns.p1.astype(complex)
        return tuple(out)


def inner_spec(
    gns: GnsStructure, generators: Sequence[np.ndarray], B: np.ndarray
) -> DerivationSpec:
    """The inner assignment T_j = [B, L_{X_j}] induced by an operator B."""
    targets = []
    for X in generators:
        L = gns.left_mult(np.asarray(X, dtype=complex))
        targets.append(B @ L - L @ B)
    return DerivationSpec.from_targets(targets)


def _word_system(
    gns: GnsStructure, Ls: Sequence[np.ndarray], targets: Sequence[np.ndarray]
):
    """All (vector, free-derivative) pairs needed to pin down the derivation.

    Words are enumerated breadth-first; a word is expanded further only if
    its vector grew the span, and one full round past stabilization is
    evaluated so that every relation among the retained words is present in
    the system.
    """
    from .vndim import numerical_span

    D = gns.dim
    t = gns.trace_vector.astype(complex)
    vecs = [t]
    vals = [np.zeros((D, D), dtype=complex)]
    frontier = [(np.eye(D, dtype=complex), vals[0])]
    span = numerical_span(np.array([t]), dim=D)
    for _ in range(D + 1):
        new_frontier = []
        for L_w, val_w in frontier:
            for L_j, T_j in zip(Ls, targets):
                L_new = L_w @ L_j
                val_new = val_w @ L_j + L_w @ T_j
                v = L_new @ t
                vecs.append(v)
                vals.append(val_new)
                resid = v - span.T @ (span.conj() @ v)
                if np.linalg.norm(resid) > 1e-9 * max(1.0, np.linalg.norm(v)):
                    span = numerical_span(np.vstack([span, v[None, :]]), dim=D)
                    new_frontier.append((L_new, val_new))
        if not new_frontier:
            break
        frontier = new_frontier
    return np.array(vecs), np.array(vals)


def derivation_well_defined(
    gns: GnsStructure,
    generators: Sequence[np.ndarray],
    spec: DerivationSpec,
) -> tuple[bool, float, np.ndarray]:
    """Decide whether the prescribed derivation descends to the algebra.

    Returns (well_defined, defect, map), where map is the (D*D, D) matrix of
    the induced linear map from L2 into HS and defect is the worst
    least-squares residual over the evaluated words.  Inconsistency is a
    result, not an error.
    """
    Ls = [gns.left_mult(np.asarray(X, dtype=complex)) for X in generators]
    targets = spec.resolve(gns, len(Ls))
    vecs, vals = _word_system(gns, Ls, targets)
    K = vecs.shape[0]
    D = gns.dim

    V = vecs.T                      # (D, K)
    Wm = vals.reshape(K, D * D).T   # (D^2, K)
    sol, *_ = np.linalg.lstsq(V.T, Wm.T, rcond=None)
    dhat = sol.T                    # (D^2, D)
    resid = dhat @ V - Wm
    defect = float(np.linalg.norm(resid.reshape(D * D, K), axis=0).max())
    return defect <= WELLDEF_TOL, defect, dhat


def conjugate_variable(
    gns: GnsStructure,
    spec: DerivationSpec,
    generators: Optional[Sequence[np.ndarray]] = None,
) -> Optional[np.ndarray]:
    """The vector xi with <xi, Q 1> = <P1, dT(Q)>_HS, or None when the
    derivation does not descend."""
    if generators is None:
        generators = gns.algebra.generators
    ok, _, dhat = derivation_well_defined(gns, generators, spec)
    if not ok:
        return None
    D = gns.dim
    xi = np.array([
        np.vdot(dhat[:, m].reshape(D, D), gns.p1) for m in range(D)
    ])
    return xi


@dataclass
class FisherSlot:
    """Well-definedness data for one distinguished-derivation slot."""

    slot: int
    well_defined: bool
    defect: float
    xi_norm_sq: Optional[float]


@dataclass
class FisherReport:
    value: float
    slots: list[FisherSlot]


def fisher_report(algebra: TracialAlgebra, gns: Optional[GnsStructure] = None
                  ) -> FisherReport:
    """Sum of |xi_j|^2 over the distinguished derivations, or +inf.

    Infinite whenever some slot's derivation fails to descend (the defect
    records how decisively) or lacks a conjugate vector.
    """
    if gns is None:
        gns = gns_structure(algebra)
    gens = gns.algebra.generators
    slots = []
    total = 0.0
    finite = True
    for j in range(len(gens)):
        spec = DerivationSpec.free_difference_quotient(j)
        ok, defect, dhat = derivation_well_defined(gns, gens, spec)
        xi_norm_sq = None
        if ok:
            D = gns.dim
            xi = np.array([
                np.vdot(dhat[:, m].reshape(D, D), gns.p1) for m in range(D)
            ])
            xi_norm_sq = float(np.linalg.norm(xi) ** 2)
            total += xi_norm_sq
        else:
            finite = False
        slots.append(FisherSlot(slot=j, well_defined=ok, defect=defect,
                                xi_norm_sq=xi_norm_sq))
    return FisherReport(value=total if finite else float("inf"), slots=slots)


def phi_star(algebra: TracialAlgebra) -> float:
    """Free Fisher information of the generating tuple (+inf when undefined)."""
    return fisher_report(algebra).value


@dataclass
class DualOperatorReport:
    """The operator dual to a prescribed derivation, with its residuals."""

    Y: np.ndarray
    xi: np.ndarray
    residual_Y1: float
    residual_commutators: float
    residual_adjoint: float

    @property
    def max_residual(self) -> float:
        return max(self.residual_Y1, self.residual_commutators,
                   self.residual_adjoint)


def construct_dual_operator(
    gns: GnsStructure,
    spec: DerivationSpec,
    generators: Optional[Sequence[np.ndarray]] = None,
    tol: float = RESIDUAL_TOL,
) -> DualOperatorReport:
    """Build Y with Y 1 = 0, [Y, L_{X_j}] = T_j and Y* 1 = xi.

    Y acts on the cyclic vector of a polynomial by the derivative of that
    polynomial applied to the trace vector; the report verifies all three
    identities and raises ResidualTooLarge if any exceeds `tol`.
    """
    if generators is None:
        generators = gns.algebra.generators
    ok, defect, dhat = derivation_well_defined(gns, generators, spec)
    if not ok:
        raise IllDefined(
            f"derivation does not descend to the algebra (defect {defect:.3e})"
        )
    D = gns.dim
    t = gns.trace_vector.astype(complex)
    Y = np.einsum("ijm,j->im", dhat.reshape(D, D, D), t, optimize=True)
    xi = np.array([np.vdot(dhat[:, m].reshape(D, D), gns.p1) for m in range(D)])

    targets = spec.resolve(gns, len(generators))
    Ls = [gns.left_mult(np.asarray(X, dtype=complex)) for X in generators]
    residual_Y1 = float(np.linalg.norm(Y @ t))
    residual_commutators = max(
        float(np.linalg.norm(Y @ L - L @ Y - T)) for L, T in zip(Ls, targets)
    ) if Ls else 0.0
    residual_adjoint = float(np.linalg.norm(Y.conj().T @ t - xi))

    report = DualOperatorReport(
        Y=Y,
        xi=xi,
        residual_Y1=residual_Y1,
        residual_commutators=residual_commutators,
        residual_adjoint=residual_adjoint,
    )
    if report.max_residual > tol:
        raise ResidualTooLarge(
            f"dual operator residual {report.max_residual:.3e} exceeds {tol:.0e}"
        )
    return report


def antisymmetrize(Y_list: Sequence[np.ndarray]) -> list[np.ndarray]:
    """(Y - Y*) / 2 for each operator in the list."""
    return [(np.asarray(Y) - np.asarray(Y).conj().T) / 2.0 for Y in Y_list]


def antisymmetrize_identity_residual(Y: np.ndarray, Lx: np.ndarray) -> float:
    """Deviation in [Ỹ, L_X] = ([Y, L_X] + [Y, L_X]*) / 2 for self-adjoint X."""
    Yt = (Y - Y.conj().T) / 2.0
    lhs = Yt @ Lx - Lx @ Yt
    com = Y @ Lx - Lx @ Y
    rhs = (com + com.conj().T) / 2.0
    return float(np.abs(lhs - rhs).max())
