"""Numerical block decomposition of *-closed matrix algebras.

Given a *-closed unital algebra A of N x N matrices together with a faithful
tracial state on it, these routines locate the minimal central projections,
read off the block sizes and trace weights, extract one irreducible
invariant subspace per block through the commutant, and re-express A as a
validated TracialAlgebra in block-diagonal coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import CenterResolutionError, FreedimError
from .tolerances import CENTER_RETRIES, INVARIANCE_TOL, RANK_TOL


def _project_onto_rows(basis: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Orthogonal projection of v onto the row space of an orthonormal basis."""
    if basis.shape[0] == 0:
        return np.zeros_like(v)
    return basis.T @ (basis.conj() @ v)


def commutant_basis(
    mats: Sequence[np.ndarray], within: Optional[np.ndarray] = None
) -> np.ndarray:
    """Orthonormal basis of {x : [x, m] = 0 for all m}, as (s, N, N).

    `within` restricts the search to the row span of the given orthonormal
    family of flattened matrices; by default all of M_N is searched.
    """
    from .vndim import numerical_span

    mats = [np.asarray(m, dtype=complex) for m in mats]
    N = mats[0].shape[0]
    if within is None:
        within = np.eye(N * N, dtype=complex)
    r = within.shape[0]

    rows = []
    for m in mats:
        for k in range(r):
            B = within[k].reshape(N, N)
            rows.append((B @ m - m @ B).ravel())
    if not rows:
        return within.reshape(r, N, N).copy()
    constraint = np.array(rows).reshape(len(mats), r, N * N)
    # coefficient vectors c with sum_k c_k [B_k, m] = 0 for every m
    stacked = np.concatenate([constraint[i].T for i in range(len(mats))], axis=0)
    _, s, vh = np.linalg.svd(stacked, full_matrices=True)
    if s.size == 0 or s[0] < 1e-12:
        coeffs = np.eye(r, dtype=complex)
    else:
        rank = int(np.sum(s > RANK_TOL * s[0]))
        coeffs = vh[rank:].conj()
    flat = coeffs @ within
    flat = numerical_span(flat, dim=N * N)
    return flat.reshape(-1, N, N)


def _canonical_order(projections: list[np.ndarray]) -> list[np.ndarray]:
    """Deterministic block order: first support position, then rank, then entries."""

    def key(p):
        diag = p.diagonal().real
        sig = np.flatnonzero(diag > 1e-6)
        first = int(sig[0]) if sig.size else p.shape[0]
        rank = int(round(np.trace(p).real))
        entries = np.round(p, 6)
        return (first, rank, tuple(entries.real.ravel()), tuple(entries.imag.ravel()))

    return sorted(projections, key=key)


def minimal_central_projections(
    algebra_basis: np.ndarray,
    center: np.ndarray,
    rng: np.random.Generator,
    retries: int = CENTER_RETRIES,
) -> list[np.ndarray]:
    """Split the center into its minimal projections.

    Diagonalizes a random self-adjoint central element and groups spectral
    projections by eigenvalue cluster; the number of clusters must equal the
    center dimension, otherwise the draw is retried.
    """
    b = center.shape[0]
    N = center.shape[1]
    flat_alg = algebra_basis.reshape(algebra_basis.shape[0], -1)

    last_problem = "no attempts made"
    for _ in range(retries):
        coeff = rng.standard_normal(b) + 1j * rng.standard_normal(b)
        z = np.einsum("k,kab->ab", coeff, center)
        z = (z + z.conj().T) / 2.0
        lam, vec = np.linalg.eigh(z)
        spread = max(lam[-1] - lam[0], 1.0)
        gap = 1e-6 * spread
        clusters, start = [], 0
        for i in range(1, len(lam)):
            if lam[i] - lam[i - 1] > gap:
                clusters.append((start, i))
                start = i
        clusters.append((start, len(lam)))
        if len(clusters) != b:
            last_problem = f"found {len(clusters)} eigenvalue clusters, expected {b}"
            continue
        projections = []
        ok = True
        for lo, hi in clusters:
            V = vec[:, lo:hi]
            P = V @ V.conj().T
            resid = np.linalg.norm(P.ravel() - _project_onto_rows(flat_alg, P.ravel()))
            if resid > INVARIANCE_TOL:
                ok = False
                last_problem = f"spectral projection left the algebra (residual {resid:.2e})"
                break
            projections.append(P)
        if ok:
            return _canonical_order(projections)
    raise CenterResolutionError(
        f"could not separate the central blocks after {retries} attempts: "
        + last_problem
    )


@dataclass
class BlockifyResult:
    """A *-isomorphism from a matrix algebra onto its block form."""

    algebra: "object"                    # TracialAlgebra
    projections: list[np.ndarray]        # minimal central projections, N x N
    isometries: list[np.ndarray]         # V_i with pi_i(x) = V_i* x V_i

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Image of an algebra element in block-diagonal coordinates."""
        from .algebra import block_offsets

        sizes = self.algebra.block_sizes
        out = np.zeros((sum(sizes), sum(sizes)), dtype=complex)
        for (start, stop), V in zip(block_offsets(sizes), self.isometries):
            out[start:stop, start:stop] = V.conj().T @ x @ V
        return out


def blockify(
    span_mats: Sequence[np.ndarray],
    commuting_set: Sequence[np.ndarray],
    trace_fn: Callable[[np.ndarray], complex],
    generators: Sequence[np.ndarray],
    labels: Optional[Sequence[str]] = None,
    rng: Optional[np.random.Generator] = None,
    drop_zero_generators: bool = False,
) -> BlockifyResult:
    """Re-express the algebra spanned by `span_mats` as a TracialAlgebra.

    `commuting_set` is any family generating the same algebra (used for the
    cheaper commutant computation), `trace_fn` the faithful tracial state,
    and `generators` the elements whose images become the generating tuple.
    """
    from .algebra import build_algebra
    from .vndim import numerical_span

    if rng is None:
        rng = np.random.default_rng(0)
    mats = [np.asarray(m, dtype=complex) for m in span_mats]
    N = mats[0].shape[0]
    flat = numerical_span(np.array([m.ravel() for m in mats]), dim=N * N)
    alg_basis = flat.reshape(-1, N, N)
    alg_dim = alg_basis.shape[0]

    ident = np.eye(N, dtype=complex).ravel()
    if np.linalg.norm(ident - _project_onto_rows(flat, ident)) > INVARIANCE_TOL:
        raise FreedimError("the spanned algebra does not contain the identity")

    center = commutant_basis(commuting_set, within=flat)
    zs = minimal_central_projections(alg_basis, center, rng)

    commutant = commutant_basis(commuting_set, within=None)

    sizes, weights, isometries = [], [], []
    for z in zs:
        compressed = np.array([(z @ B).ravel() for B in alg_basis])
        block_dim = numerical_span(compressed, dim=N * N).shape[0]
        n = int(round(np.sqrt(block_dim)))
        if n * n != block_dim:
            raise CenterResolutionError(
                f"central block has dimension {block_dim}, not a perfect square"
            )
        alpha = trace_fn(z)
        if abs(alpha.imag) > 1e-10 or alpha.real <= 0:
            raise CenterResolutionError(f"central projection has trace {alpha!r}")
        V = _irreducible_isometry(z, commutant, n, rng)
        for g in commuting_set:
            resid = np.linalg.norm(g @ V - V @ (V.conj().T @ g @ V))
            if resid > INVARIANCE_TOL:
                raise CenterResolutionError(
                    f"extracted subspace is not invariant (residual {resid:.2e})"
                )
        sizes.append(n)
        weights.append(alpha.real)
        isometries.append(V)

    if sum(n * n for n in sizes) != alg_dim:
        raise CenterResolutionError(
            f"block sizes {sizes} are inconsistent with algebra dimension {alg_dim}"
        )

    total = sum(weights)
    weights = [w / total for w in weights]

    new_total = sum(sizes)
    gen_mats, gen_labels = [], []
    if labels is None:
        labels = [f"X{j + 1}" for j in range(len(generators))]
    from .algebra import block_offsets

    spans = block_offsets(sizes)
    for g, label in zip(generators, labels):
        img = np.zeros((new_total, new_total), dtype=complex)
        for (start, stop), V in zip(spans, isometries):
            img[start:stop, start:stop] = V.conj().T @ g @ V
        img = (img + img.conj().T) / 2.0
        if drop_zero_generators and np.linalg.norm(img) < 1e-12:
            continue
        gen_mats.append(img)
        gen_labels.append(label)

    algebra = build_algebra(sizes, weights, gen_mats, labels=gen_labels)
    return BlockifyResult(algebra=algebra, projections=zs, isometries=isometries)


def _irreducible_isometry(
    z: np.ndarray, commutant: np.ndarray, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Isometry onto one irreducible invariant subspace inside range(z).

    A random self-adjoint element of the compressed commutant z A' z splits
    range(z) into eigenspaces of dimension n each; any single eigenspace is
    an irreducible module for the block.
    """
    lam, vec = np.linalg.eigh(z)
    W = vec[:, lam > 0.5]
    r = W.shape[1]
    if r % n != 0:
        raise CenterResolutionError(
            f"central range has dimension {r}, not a multiple of block size {n}"
        )
    mult = r // n
    if mult == 1:
        return W

    comp = np.array([W.conj().T @ C @ W for C in commutant])
    for _ in range(CENTER_RETRIES):
        coeff = rng.standard_normal(len(comp)) + 1j * rng.standard_normal(len(comp))
        b = np.einsum("k,kab->ab", coeff, comp)
        b = (b + b.conj().T) / 2.0
        lam_b, vec_b = np.linalg.eigh(b)
        spread = max(lam_b[-1] - lam_b[0], 1.0)
        gap = 1e-6 * spread
        clusters, start = [], 0
        for i in range(1, len(lam_b)):
            if lam_b[i] - lam_b[i - 1] > gap:
                clusters.append((start, i))
                start = i
        clusters.append((start, len(lam_b)))
        if len(clusters) == mult and all(hi - lo == n for lo, hi in clusters):
            lo, hi = clusters[0]
            return W @ vec_b[:, lo:hi]
    raise CenterResolutionError(
        f"could not isolate an irreducible subspace of dimension {n}"
    )


def blockify_subalgebra(algebra) -> "object":
    """Block form of the subalgebra generated by a non-generating tuple."""
    from .algebra import block_offsets
    from .vndim import numerical_span

    sizes = algebra.block_sizes
    spans = block_offsets(sizes)
    total = algebra.matrix_size

    def unflat(v):
        out = np.zeros((total, total), dtype=complex)
        pos = 0
        for (s, t), n in zip(spans, sizes):
            out[s:t, s:t] = v[pos : pos + n * n].reshape(n, n)
            pos += n * n
        return out

    seed = [algebra.flatten(algebra.identity())] + [
        algebra.flatten(g) for g in algebra.generators
    ]
    basis = numerical_span(np.array(seed), dim=algebra.dim)
    for _ in range(algebra.dim):
        mats = [unflat(row) for row in basis]
        new_rows = np.array(
            [algebra.flatten(m @ g) for m in mats for g in algebra.generators]
        )
        grown = numerical_span(np.vstack([basis, new_rows]), dim=algebra.dim)
        if grown.shape[0] == basis.shape[0]:
            basis = grown
            break
        basis = grown

    span_mats = [unflat(row) for row in basis]
    result = blockify(
        span_mats,
        commuting_set=list(algebra.generators),
        trace_fn=algebra.trace,
        generators=list(algebra.generators),
        labels=list(algebra.labels),
        rng=np.random.default_rng(0),
    )
    return result.algebra
