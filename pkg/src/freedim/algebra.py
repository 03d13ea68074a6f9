"""Finite tracial multi-matrix *-algebras and their trace representations.

An algebra here is a direct sum of full matrix blocks M = ⊕_i M_{n_i}(C)
carried as block-diagonal N x N matrices (N = sum n_i), with the tracial
state tau(x) = sum_i alpha_i * tr_i(x_i), tr_i the normalized trace on the
i-th block.  The trace representation endows the algebra with the inner
product <a, b> = tau(b* a); its completion is a D-dimensional Hilbert space
(D = sum n_i^2) on which the algebra acts by left multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    FreedimError,
    NotGenerating,
    NotSelfAdjoint,
    ShapeMismatch,
    WeightError,
)
from .tolerances import OPERATOR_TOL, SCALAR_TOL


def block_offsets(block_sizes: Sequence[int]) -> list[tuple[int, int]]:
    """(start, stop) index ranges of the diagonal blocks."""
    spans, start = [], 0
    for n in block_sizes:
        spans.append((start, start + n))
        start += n
    return spans


def _diag_weights(block_sizes, trace_weights) -> np.ndarray:
    """w[a] = alpha_i / n_i for row a in block i, so tau(M) = sum_a M[a,a] w[a]."""
    w = np.zeros(sum(block_sizes))
    for (start, stop), n, alpha in zip(
        block_offsets(block_sizes), block_sizes, trace_weights
    ):
        w[start:stop] = alpha / n
    return w


@dataclass
class TracialAlgebra:
    """A finite multi-matrix *-algebra with a distinguished generating tuple.

    Immutable after construction; safe to share across threads.
    """

    block_sizes: tuple[int, ...]
    trace_weights: tuple[float, ...]
    generators: tuple[np.ndarray, ...]
    labels: tuple[str, ...]
    generated_dim: int
    generates: bool
    subalgebra_mode: bool = False
    _effective: Optional["TracialAlgebra"] = field(default=None, repr=False)

    @property
    def matrix_size(self) -> int:
        return sum(self.block_sizes)

    @property
    def dim(self) -> int:
        """Complex dimension D = sum n_i^2 of the algebra (and of its L2 space)."""
        return sum(n * n for n in self.block_sizes)

    @property
    def n_generators(self) -> int:
        return len(self.generators)

    def trace(self, x: np.ndarray) -> complex:
        """tau(x) = sum_i alpha_i * tr(x_i) / n_i."""
        w = _diag_weights(self.block_sizes, self.trace_weights)
        return complex(np.sum(np.diag(x) * w))

    def inner(self, a: np.ndarray, b: np.ndarray) -> complex:
        """<a, b> = tau(b* a)."""
        return self.trace(b.conj().T @ a)

    def flatten(self, x: np.ndarray) -> np.ndarray:
        """Concatenate the block entries of x into a vector of length D."""
        parts = [
            x[start:stop, start:stop].ravel()
            for (start, stop) in block_offsets(self.block_sizes)
        ]
        return np.concatenate(parts)

    def unflatten(self, v: np.ndarray) -> np.ndarray:
        N = self.matrix_size
        out = np.zeros((N, N), dtype=complex)
        pos = 0
        for (start, stop), n in zip(block_offsets(self.block_sizes), self.block_sizes):
            out[start:stop, start:stop] = v[pos : pos + n * n].reshape(n, n)
            pos += n * n
        return out

    def identity(self) -> np.ndarray:
        return np.eye(self.matrix_size, dtype=complex)

    def effective_algebra(self) -> "TracialAlgebra":
        """The algebra actually generated by the tuple.

        Equal to self when the tuple generates; in subalgebra mode the
        generated *-subalgebra is re-expressed in its own block form (same
        trace), and that re-expression is what every representation-level
        computation operates on.
        """
        if self.generates:
            return self
        if self._effective is None:
            from .wedderburn import blockify_subalgebra

            self._effective = blockify_subalgebra(self)
        return self._effective


def _generated_dimension(
    block_sizes: Sequence[int], generators: Sequence[np.ndarray]
) -> int:
    """Dimension of the span of all words in the generators and the identity.

    Iterates right-multiplication by the generators until the span
    stabilizes; the span grows by at least one per round, so D rounds
    always suffice.
    """
    from .vndim import numerical_span

    sizes = tuple(block_sizes)
    spans = block_offsets(sizes)
    total = sum(sizes)
    ambient = sum(n * n for n in sizes)

    def flat(x):
        return np.concatenate([x[s:t, s:t].ravel() for (s, t) in spans])

    def unflat(v):
        out = np.zeros((total, total), dtype=complex)
        pos = 0
        for (s, t), n in zip(spans, sizes):
            out[s:t, s:t] = v[pos : pos + n * n].reshape(n, n)
            pos += n * n
        return out

    seed = [flat(np.eye(total, dtype=complex))] + [flat(g) for g in generators]
    basis = numerical_span(np.array(seed), dim=ambient)
    for _ in range(ambient):
        if not generators:
            break
        mats = [unflat(row) for row in basis]
        new_rows = np.array([flat(m @ g) for m in mats for g in generators])
        grown = numerical_span(np.vstack([basis, new_rows]), dim=ambient)
        if grown.shape[0] == basis.shape[0]:
            basis = grown
            break
        basis = grown
    return basis.shape[0]


def generation_check(algebra: TracialAlgebra) -> tuple[int, bool]:
    """Span dimension of all generator words, and whether it exhausts the algebra."""
    dim = _generated_dimension(algebra.block_sizes, algebra.generators)
    return dim, dim == algebra.dim


def build_algebra(
    block_sizes: Sequence[int],
    trace_weights: Sequence[float],
    generators: Sequence[np.ndarray],
    labels: Optional[Sequence[str]] = None,
    subalgebra_mode: bool = False,
) -> TracialAlgebra:
    """Validate the block data and the generating tuple, and package them.

    Raises WeightError / ShapeMismatch / NotSelfAdjoint on malformed input,
    and NotGenerating when the tuple fails to generate and subalgebra mode
    was not requested.
    """
    sizes = tuple(int(n) for n in block_sizes)
    weights = tuple(float(w) for w in trace_weights)
    if len(sizes) == 0 or any(n <= 0 for n in sizes):
        raise ShapeMismatch(f"block sizes must be positive integers, got {sizes}")
    if len(weights) != len(sizes):
        raise WeightError(f"{len(weights)} weights for {len(sizes)} blocks")
    if any(w <= 0 for w in weights):
        raise WeightError(f"weights must be positive, got {weights}")
    if abs(sum(weights) - 1.0) > SCALAR_TOL:
        raise WeightError(f"weights sum to {sum(weights)!r}, expected 1")

    total = sum(sizes)
    spans = block_offsets(sizes)
    support = np.zeros((total, total), dtype=bool)
    for start, stop in spans:
        support[start:stop, start:stop] = True

    mats = []
    for k, g in enumerate(generators):
        g = np.asarray(g, dtype=complex)
        if g.shape != (total, total):
            raise ShapeMismatch(
                f"generator {k} has shape {g.shape}, expected {(total, total)}"
            )
        off = np.abs(g[~support])
        if off.size and off.max() > SCALAR_TOL:
            raise ShapeMismatch(
                f"generator {k} has entries of size {off.max():.3e} outside the blocks"
            )
        if np.abs(g - g.conj().T).max() > SCALAR_TOL:
            raise NotSelfAdjoint(f"generator {k} is not self-adjoint")
        mats.append(g)

    if labels is None:
        labels = tuple(f"X{j + 1}" for j in range(len(mats)))
    else:
        labels = tuple(str(s) for s in labels)
        if len(labels) != len(mats):
            raise ShapeMismatch("one label per generator required")

    gen_dim = _generated_dimension(sizes, mats)
    generates = gen_dim == sum(n * n for n in sizes)
    if not generates and not subalgebra_mode:
        raise NotGenerating(
            f"generators span a {gen_dim}-dimensional subalgebra of the "
            f"{sum(n * n for n in sizes)}-dimensional declared algebra; "
            "pass subalgebra_mode=True to work inside the generated subalgebra"
        )
    return TracialAlgebra(
        block_sizes=sizes,
        trace_weights=weights,
        generators=tuple(mats),
        labels=labels,
        generated_dim=gen_dim,
        generates=generates,
        subalgebra_mode=subalgebra_mode,
    )


@dataclass
class GnsStructure:
    """Orthonormal coordinates for the trace representation of an algebra.

    The basis consists of self-adjoint algebra elements, so the conjugation
    a -> a* acts on coordinates as entrywise complex conjugation.
    """

    algebra: TracialAlgebra
    dim: int
    basis: np.ndarray            # (D, N, N) self-adjoint elements
    trace_vector: np.ndarray     # (D,) coordinates of 1, unit norm
    p1: np.ndarray               # (D, D) rank-one projection onto the trace vector
    basis_left_mult: np.ndarray  # (D, D, D): left multiplication by each basis element
    generator_left_mult: tuple[np.ndarray, ...]
    _wvec: np.ndarray = field(repr=False, default=None)

    def coords(self, x: np.ndarray) -> np.ndarray:
        """Coordinates <x, b_m> of an algebra element in the orthonormal basis."""
        return np.einsum("mab,ba,b->m", self.basis, x, self._wvec, optimize=True)

    def left_mult(self, x: np.ndarray) -> np.ndarray:
        """Matrix of left multiplication by x on the trace representation."""
        return np.einsum(
            "mab,bc,qca,a->mq", self.basis, x, self.basis, self._wvec, optimize=True
        )

    def right_mult(self, x: np.ndarray) -> np.ndarray:
        """Matrix of right multiplication by x; equals J L_{x*} J."""
        return self.left_mult(x).T

    def conjugation(self, v: np.ndarray) -> np.ndarray:
        """The conjugation J: entrywise complex conjugation of coordinates."""
        return np.conj(v)

    def element(self, v: np.ndarray) -> np.ndarray:
        """Algebra element with the given coordinates."""
        return np.einsum("m,mab->ab", v, self.basis)


def _orthonormal_selfadjoint_basis(algebra: TracialAlgebra) -> np.ndarray:
    """Hermitian combinations of scaled matrix units, orthonormal for tau.

    Per block of size n and weight alpha: sqrt(n/alpha) e_kk on the diagonal
    and, for k < l, sqrt(n/(2 alpha)) (e_kl + e_lk) and
    sqrt(n/(2 alpha)) i (e_kl - e_lk).
    """
    N = algebra.matrix_size
    mats = []
    for (start, _), n, alpha in zip(
        block_offsets(algebra.block_sizes), algebra.block_sizes, algebra.trace_weights
    ):
        diag_scale = np.sqrt(n / alpha)
        pair_scale = np.sqrt(n / (2.0 * alpha))
        for k in range(n):
            b = np.zeros((N, N), dtype=complex)
            b[start + k, start + k] = diag_scale
            mats.append(b)
        for k in range(n):
            for l in range(k + 1, n):
                b = np.zeros((N, N), dtype=complex)
                b[start + k, start + l] = pair_scale
                b[start + l, start + k] = pair_scale
                mats.append(b)
                c = np.zeros((N, N), dtype=complex)
                c[start + k, start + l] = 1j * pair_scale
                c[start + l, start + k] = -1j * pair_scale
                mats.append(c)
    return np.array(mats)


def gns_structure(algebra: TracialAlgebra, check: bool = True) -> GnsStructure:
    """Build the trace representation of the (effective) algebra.

    Populates the orthonormal self-adjoint basis, left multiplications, the
    trace vector and its rank-one projection, and verifies the structural
    identities: coordinates reproduce the inner product, left multiplication
    is a *-homomorphism, conjugated left multiplications commute with left
    multiplications, and the trace vector is cyclic.
    """
    algebra = algebra.effective_algebra()
    basis = _orthonormal_selfadjoint_basis(algebra)
    D = algebra.dim
    wvec = _diag_weights(algebra.block_sizes, algebra.trace_weights)

    # L_p[m, q] = tau(b_m b_p b_q) = <b_p b_q, b_m>
    basis_left_mult = np.einsum(
        "mab,pbc,qca,a->pmq", basis, basis, basis, wvec, optimize=True
    )
    trace_vector = np.einsum("mab,ba,b->m", basis, np.eye(basis.shape[1]), wvec,
                             optimize=True)
    if np.abs(trace_vector.imag).max() > SCALAR_TOL:
        raise FreedimError("trace vector acquired an imaginary part")
    trace_vector = trace_vector.real
    p1 = np.outer(trace_vector, trace_vector)

    gns = GnsStructure(
        algebra=algebra,
        dim=D,
        basis=basis,
        trace_vector=trace_vector,
        p1=p1,
        basis_left_mult=basis_left_mult,
        generator_left_mult=(),
        _wvec=wvec,
    )
    gns.generator_left_mult = tuple(gns.left_mult(g) for g in algebra.generators)

    if check:
        _verify_gns(gns)
    return gns


def _verify_gns(gns: GnsStructure) -> None:
    D = gns.dim
    basis = gns.basis
    L = gns.basis_left_mult

    gram = np.einsum("qab,mba,b->mq", basis, basis, gns._wvec, optimize=True)
    if np.abs(gram - np.eye(D)).max() > OPERATOR_TOL:
        raise FreedimError("trace-representation basis failed orthonormality")

    # self-adjointness of L_b for self-adjoint b
    if np.abs(L - L.conj().transpose(0, 2, 1)).max() > OPERATOR_TOL:
        raise FreedimError("left multiplication by a self-adjoint element "
                           "is not self-adjoint")

    # multiplicativity: L_{b_p b_q} = sum_m L_p[m, q] L_m must equal L_p L_q
    lhs = np.einsum("pmq,mrs->pqrs", L, L, optimize=True)
    rhs = np.einsum("prt,qts->pqrs", L, L, optimize=True)
    if np.abs(lhs - rhs).max() > OPERATOR_TOL:
        raise FreedimError("left multiplication failed multiplicativity")

    # conjugated left multiplications land in the commutant
    R = np.conj(L)
    lhs = np.einsum("pab,qbc->pqac", R, L, optimize=True)
    rhs = np.einsum("qab,pbc->pqac", L, R, optimize=True)
    if np.abs(lhs - rhs).max() > OPERATOR_TOL:
        raise FreedimError("conjugated left multiplication left the commutant")

    # cyclicity: L_{b_p} applied to the trace vector recovers coordinates e_p
    hats = np.einsum("pmq,q->pm", L, gns.trace_vector, optimize=True)
    if np.abs(hats - np.eye(D)).max() > OPERATOR_TOL:
        raise FreedimError("trace vector is not cyclic for the basis")
