"""Trace-weighted dimension of invariant subspaces of Hilbert-Schmidt tuples.

A subspace K of HS(L2)^n that is invariant under the commutant bimodule
action (composition on either side with conjugated left multiplications)
decomposes along the minimal central projections z_i of the algebra; its
dimension over the algebra and its opposite is

    sum_{i,j} alpha_i alpha_j dim_C(z_i K z_j) / (n_i n_j)^2,

with every dim_C(z_i K z_j) an integer multiple of n_i n_j.  The weights are
pinned by the normalization dim(full HS^n) = n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, TYPE_CHECKING

import numpy as np

from .errors import CenterResolutionError, IntegralityError, NotInvariant
from .tolerances import INVARIANCE_TOL, OPERATOR_TOL, RANK_TOL

if TYPE_CHECKING:  # pragma: no cover
    from .algebra import GnsStructure, TracialAlgebra


def numerical_span(
    vectors, tol: float = RANK_TOL, dim: Optional[int] = None
) -> np.ndarray:
    """Orthonormal basis (rows) of the span, with relative SVD cutoff `tol`."""
    A = np.asarray(vectors, dtype=complex)
    if A.size == 0:
        d = dim if dim is not None else (A.shape[-1] if A.ndim >= 2 else 0)
        return np.zeros((0, d), dtype=complex)
    if A.ndim == 1:
        A = A[None, :]
    _, s, vh = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((0, A.shape[1]), dtype=complex)
    rank = int(np.sum(s > tol * s[0]))
    return vh[:rank]


def to_fraction(x: float, max_denominator: int = 10**6) -> Fraction:
    """Exact rational form of a float that is morally a small fraction."""
    fr = Fraction(x).limit_denominator(max_denominator)
    if abs(float(fr) - x) > 1e-12:
        fr = Fraction(x)
    return fr


@dataclass
class CentralDecomposition:
    """Minimal central projections of the algebra, acting on its L2 space."""

    projections: np.ndarray        # (b, D, D): left multiplication by each z_i
    sizes: tuple[int, ...]         # n_i with dim_C(z_i M) = n_i^2
    weights: tuple[float, ...]     # alpha_i = tau(z_i)
    elements: np.ndarray           # (b, N, N): the z_i as algebra elements
    weight_fractions: tuple[Fraction, ...]


def central_decomposition(
    algebra: "TracialAlgebra", gns: "GnsStructure", seed: int = 0
) -> CentralDecomposition:
    """Numerically resolve the center and read off block sizes and weights.

    The center is computed as the kernel of x -> ([x, X_j])_j inside the
    algebra, split by diagonalizing a random self-adjoint central element
    (deterministic for a fixed seed), and the result is cross-checked
    against the declared block data.
    """
    from .algebra import block_offsets
    from .wedderburn import commutant_basis, minimal_central_projections

    algebra = gns.algebra
    N = algebra.matrix_size
    spans = block_offsets(algebra.block_sizes)

    units = []
    for (start, stop) in spans:
        for a in range(start, stop):
            for b in range(start, stop):
                E = np.zeros((N, N), dtype=complex)
                E[a, b] = 1.0
                units.append(E.ravel())
    unit_basis = np.array(units)

    center = commutant_basis(list(algebra.generators), within=unit_basis)
    rng = np.random.default_rng(seed)
    zs = minimal_central_projections(
        unit_basis.reshape(-1, N, N), center, rng
    )

    sizes, weights = [], []
    for z in zs:
        compressed = np.array([z @ u.reshape(N, N) for u in unit_basis])
        block_dim = numerical_span(
            compressed.reshape(len(unit_basis), -1), dim=N * N
        ).shape[0]
        n = int(round(np.sqrt(block_dim)))
        if n * n != block_dim:
            raise CenterResolutionError(
                f"central block dimension {block_dim} is not a perfect square"
            )
        sizes.append(n)
        weights.append(algebra.trace(z).real)

    if tuple(sizes) != tuple(algebra.block_sizes) or any(
        abs(w - a) > 1e-8 for w, a in zip(weights, algebra.trace_weights)
    ):
        raise CenterResolutionError(
            f"recovered blocks {sizes} / weights {weights} disagree with the "
            f"declared data {algebra.block_sizes} / {algebra.trace_weights}"
        )

    projections = np.array([gns.left_mult(z) for z in zs])
    D = gns.dim
    total = projections.sum(axis=0)
    if np.abs(total - np.eye(D)).max() > OPERATOR_TOL:
        raise CenterResolutionError("central projections do not sum to the identity")
    for i in range(len(zs)):
        for j in range(len(zs)):
            expect = projections[i] if i == j else 0.0
            if np.abs(projections[i] @ projections[j] - expect).max() > OPERATOR_TOL:
                raise CenterResolutionError("central projections are not orthogonal")
    for i in range(len(zs)):
        comm = np.einsum("ab,pbc->pac", projections[i], gns.basis_left_mult) - \
            np.einsum("pab,bc->pac", gns.basis_left_mult, projections[i])
        if np.abs(comm).max() > OPERATOR_TOL:
            raise CenterResolutionError("central projection failed to be central")

    return CentralDecomposition(
        projections=projections,
        sizes=tuple(sizes),
        weights=tuple(weights),
        elements=np.array(zs),
        weight_fractions=tuple(to_fraction(w) for w in weights),
    )


@dataclass
class HsSubspace:
    """An invariant subspace of HS(L2)^n with an orthonormal spanning set."""

    n: int
    ambient_dim: int
    basis: np.ndarray            # (r, n, D, D)
    invariance_residual: float

    @property
    def complex_dim(self) -> int:
        return self.basis.shape[0]

    def flat(self) -> np.ndarray:
        return self.basis.reshape(self.basis.shape[0], self.ambient_dim)


def commutant_action(gns: "GnsStructure") -> np.ndarray:
    """The action generators: conjugated left multiplications, one per basis element."""
    return gns.basis_left_mult.transpose(0, 2, 1)


def _rowspace_residual(rows: np.ndarray, basis_flat: np.ndarray) -> float:
    """Largest distance from a row to the span of the orthonormal basis rows."""
    if rows.shape[0] == 0:
        return 0.0
    if basis_flat.shape[0] == 0:
        norms = np.linalg.norm(rows, axis=1)
        return float(norms.max()) if norms.size else 0.0
    coeff = rows @ basis_flat.conj().T
    resid = rows - coeff @ basis_flat
    return float(np.linalg.norm(resid, axis=1).max())


def invariance_residual(basis: np.ndarray, gns: "GnsStructure") -> float:
    """Certificate that the span is stable under the commutant bimodule action."""
    r = basis.shape[0]
    if r == 0:
        return 0.0
    flat = basis.reshape(r, -1)
    actions = commutant_action(gns)
    worst = 0.0
    # batched over action generators to keep the projections in large GEMMs
    chunk = max(1, int(2**23 // max(1, 2 * r * flat.shape[1])))
    for lo in range(0, actions.shape[0], chunk):
        R = actions[lo : lo + chunk]
        left = np.einsum("pab,rnbc->prnac", R, basis, optimize=True)
        right = np.einsum("rnab,pbc->prnac", basis, R, optimize=True)
        rows = np.concatenate(
            [left.reshape(-1, flat.shape[1]), right.reshape(-1, flat.shape[1])]
        )
        worst = max(worst, _rowspace_residual(rows, flat))
    return worst


def hs_subspace(
    gns: "GnsStructure", vectors, n: Optional[int] = None, tol: float = RANK_TOL
) -> HsSubspace:
    """Orthonormalize a spanning family of HS tuples and certify invariance."""
    D = gns.dim
    A = np.asarray(vectors, dtype=complex)
    if A.size == 0:
        if n is None:
            raise ValueError("tuple length required for an empty spanning set")
        return HsSubspace(
            n=n, ambient_dim=n * D * D,
            basis=np.zeros((0, n, D, D), dtype=complex),
            invariance_residual=0.0,
        )
    if A.ndim == 3:
        A = A[None, :, :, :]
    k = A.shape[0]
    n = A.shape[1]
    flat = numerical_span(A.reshape(k, -1), tol=tol, dim=n * D * D)
    basis = flat.reshape(-1, n, D, D)
    return HsSubspace(
        n=n,
        ambient_dim=n * D * D,
        basis=basis,
        invariance_residual=invariance_residual(basis, gns),
    )


def invariant_closure(gns: "GnsStructure", vectors) -> HsSubspace:
    """Smallest invariant subspace containing the given HS tuples."""
    A = np.asarray(vectors, dtype=complex)
    if A.ndim == 3:
        A = A[None, :, :, :]
    k, n = A.shape[0], A.shape[1]
    D = gns.dim
    flat = numerical_span(A.reshape(k, -1), dim=n * D * D)
    actions = commutant_action(gns)
    for _ in range(n * D * D + 1):
        basis = flat.reshape(-1, n, D, D)
        rows = [flat]
        for R in actions:
            rows.append(np.einsum("ab,rnbc->rnac", R, basis,
                                  optimize=True).reshape(flat.shape[0], -1))
            rows.append(np.einsum("rnab,bc->rnac", basis, R,
                                  optimize=True).reshape(flat.shape[0], -1))
        grown = numerical_span(np.vstack(rows), dim=n * D * D)
        if grown.shape[0] == flat.shape[0]:
            flat = grown
            break
        flat = grown
    basis = flat.reshape(-1, n, D, D)
    return HsSubspace(
        n=n,
        ambient_dim=n * D * D,
        basis=basis,
        invariance_residual=invariance_residual(basis, gns),
    )


@dataclass
class VnDimensionReport:
    """Dimension value with its exact rational form and per-block multiplicities."""

    value: float
    fraction: Fraction
    multiplicities: np.ndarray   # (b, b) integers m_ij
    block_dims: np.ndarray       # (b, b) integers dim_C(z_i K z_j)


def _projection_support(Z: np.ndarray):
    """Coordinate support of a 0/1 diagonal projection, or None if not diagonal."""
    diag = Z.diagonal().real
    if np.abs(Z - np.diag(Z.diagonal())).max() > 1e-10:
        return None
    if not np.all((np.abs(diag) < 1e-10) | (np.abs(diag - 1.0) < 1e-10)):
        return None
    return diag > 0.5


def vn_dimension_report(
    K: HsSubspace, decomposition: CentralDecomposition
) -> VnDimensionReport:
    """Evaluate the trace-weighted dimension of an invariant subspace."""
    if K.invariance_residual > INVARIANCE_TOL:
        raise NotInvariant(
            f"subspace has invariance residual {K.invariance_residual:.3e} "
            f"(threshold {INVARIANCE_TOL:.0e})"
        )
    Z = decomposition.projections
    b = Z.shape[0]
    sizes = decomposition.sizes
    wfr = decomposition.weight_fractions
    r = K.complex_dim
    supports = [_projection_support(Zi) for Zi in Z]

    mult = np.zeros((b, b), dtype=int)
    block_dims = np.zeros((b, b), dtype=int)
    total = Fraction(0)
    for i in range(b):
        for j in range(b):
            if r == 0:
                rank = 0
            else:
                if supports[i] is not None and supports[j] is not None:
                    # exact coordinate projections: compress by slicing
                    comp = K.basis[:, :, supports[i], :][:, :, :, supports[j]]
                    comp = comp.reshape(r, -1)
                else:
                    comp = np.einsum(
                        "ab,rnbc,cd->rnad", Z[i], K.basis, Z[j], optimize=True
                    ).reshape(r, -1)
                s = np.linalg.svd(comp, compute_uv=False)
                # basis rows are unit vectors, so the cutoff is floored at the
                # ambient scale: an all-noise block must report rank zero
                cut = RANK_TOL * max(1.0, float(s[0])) if s.size else RANK_TOL
                rank = int(np.sum(s > cut))
            denom = sizes[i] * sizes[j]
            if rank % denom:
                raise IntegralityError(
                    f"block ({i},{j}) has dimension {rank}, "
                    f"not a multiple of {denom}"
                )
            block_dims[i, j] = rank
            mult[i, j] = rank // denom
            total += wfr[i] * wfr[j] * Fraction(mult[i, j], denom)
    return VnDimensionReport(
        value=float(total), fraction=total, multiplicities=mult, block_dims=block_dims
    )


def vn_dimension(K: HsSubspace, decomposition: CentralDecomposition) -> float:
    """Trace-weighted dimension of an invariant subspace of HS tuples."""
    return vn_dimension_report(K, decomposition).value


def subspace_distance(a, b) -> float:
    """Symmetric gap between two subspaces given by orthonormal spanning rows."""
    A = a.flat() if isinstance(a, HsSubspace) else np.asarray(a, dtype=complex)
    B = b.flat() if isinstance(b, HsSubspace) else np.asarray(b, dtype=complex)
    return max(_rowspace_residual(A, B), _rowspace_residual(B, A))
