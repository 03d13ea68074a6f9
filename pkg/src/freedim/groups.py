"""Finite groups, their regular representations, and free-group subgroup ranks.

The left regular representation of a finite group G carries the canonical
trace x -> <x delta_e, delta_e>; its block decomposition is discovered
numerically and packaged as a TracialAlgebra whose generating tuple consists
of the self-adjoint real/imaginary parts of a generating set of G.  For free
groups, coset enumeration over a homomorphism into a finite group yields the
kernel's coset graph, whose non-tree edges enumerate free generators of the
kernel (rank 1 + index (n - 1)).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .algebra import TracialAlgebra
from .errors import FreedimError, NotGeneratingSet, TooLarge

DEFAULT_ORDER_CAP = 24

Word = tuple[int, ...]  # letters: +k is generator k (1-based), -k its inverse


# ---------------------------------------------------------------------------
# finite group tables
# ---------------------------------------------------------------------------

@dataclass
class FiniteGroupTable:
    """A finite group as an explicit multiplication table."""

    order: int
    mult: np.ndarray          # (order, order) int indices
    inverse: np.ndarray       # (order,) int indices
    identity: int
    names: tuple[str, ...]

    def mul(self, a: int, b: int) -> int:
        return int(self.mult[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])


def from_mult_table(
    mult, names: Optional[Sequence[str]] = None
) -> FiniteGroupTable:
    """Validate a multiplication table (identity, inverses, associativity)."""
    M = np.asarray(mult, dtype=int)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise FreedimError(f"multiplication table has shape {M.shape}")
    o = M.shape[0]
    if M.min() < 0 or M.max() >= o:
        raise FreedimError("multiplication table entries out of range")

    identity = -1
    for e in range(o):
        if np.array_equal(M[e], np.arange(o)) and np.array_equal(M[:, e], np.arange(o)):
            identity = e
            break
    if identity < 0:
        raise FreedimError("multiplication table has no identity element")

    inverse = np.full(o, -1, dtype=int)
    for a in range(o):
        hits = np.flatnonzero(M[a] == identity)
        if hits.size != 1 or M[hits[0], a] != identity:
            raise FreedimError(f"element {a} has no two-sided inverse")
        inverse[a] = hits[0]

    # associativity on all triples (vectorized; orders here are <= 24)
    left = M[M, :]            # [a, b, c] -> M[M[a, b], c]
    right = M[:, M]           # [a, b, c] -> M[a, M[b, c]]
    if not np.array_equal(left, right):
        raise FreedimError("multiplication table is not associative")

    if names is None:
        names = tuple(str(i) for i in range(o))
    else:
        names = tuple(str(s) for s in names)
        if len(names) != o:
            raise FreedimError("one name per element required")
    return FiniteGroupTable(order=o, mult=M, inverse=inverse,
                            identity=identity, names=names)


def cyclic_group(n: int) -> FiniteGroupTable:
    idx = np.arange(n)
    M = (idx[:, None] + idx[None, :]) % n
    return from_mult_table(M, names=[str(i) for i in range(n)])


def symmetric_group(n: int) -> FiniteGroupTable:
    perms = sorted(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    o = len(perms)
    M = np.zeros((o, o), dtype=int)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            M[i, j] = index[tuple(p[q[k]] for k in range(n))]
    return from_mult_table(M, names=["".join(map(str, p)) for p in perms])


def direct_product(g: FiniteGroupTable, h: FiniteGroupTable) -> FiniteGroupTable:
    pairs = [(a, b) for a in range(g.order) for b in range(h.order)]
    index = {p: i for i, p in enumerate(pairs)}
    o = len(pairs)
    M = np.zeros((o, o), dtype=int)
    for i, (a1, b1) in enumerate(pairs):
        for j, (a2, b2) in enumerate(pairs):
            M[i, j] = index[(g.mul(a1, a2), h.mul(b1, b2))]
    names = [f"({g.names[a]},{h.names[b]})" for a, b in pairs]
    return from_mult_table(M, names=names)


def permutation_from_cycles(text: str, degree: int) -> tuple[int, ...]:
    """Parse 1-based cycle notation like "(1 2)(3 4)" into a permutation tuple.

    Cycles are applied left to right; points omitted from every cycle are
    fixed.  Returns p with p[i] = image of point i (0-based).
    """
    text = text.strip()
    if text in ("", "()", "e", "1"):
        return tuple(range(degree))
    if text.count("(") != text.count(")") or not text.startswith("("):
        raise FreedimError(f"malformed cycle notation {text!r}")
    perm = list(range(degree))
    body = text
    while body:
        if not body.startswith("("):
            raise FreedimError(f"malformed cycle notation {text!r}")
        close = body.index(")")
        points = body[1:close].replace(",", " ").split()
        body = body[close + 1 :].strip()
        if not points:
            continue
        cycle = [int(p) - 1 for p in points]
        if any(p < 0 or p >= degree for p in cycle) or len(set(cycle)) != len(cycle):
            raise FreedimError(f"cycle {points} invalid for degree {degree}")
        step = list(range(degree))
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            step[a] = b
        perm = [step[perm[i]] for i in range(degree)]
    return tuple(perm)


def symmetric_element_index(perm: Sequence[int], degree: int) -> int:
    """Index of a permutation tuple in the symmetric-group table of `degree`."""
    perms = sorted(itertools.permutations(range(degree)))
    try:
        return perms.index(tuple(perm))
    except ValueError:
        raise FreedimError(f"{perm!r} is not a permutation of {degree} points")


def closure(table: FiniteGroupTable, elements: Sequence[int]) -> set[int]:
    """Subgroup generated by the given elements."""
    seen = {table.identity}
    frontier = [table.identity]
    gens = list(dict.fromkeys(int(e) for e in elements))
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = table.mul(a, g)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return seen


def minimal_generating_set(table: FiniteGroupTable) -> list[int]:
    """Smallest generating set, found by exhaustive search in size order."""
    if table.order == 1:
        return []
    candidates = [g for g in range(table.order) if g != table.identity]
    for size in range(1, len(candidates) + 1):
        for combo in itertools.combinations(candidates, size):
            if len(closure(table, combo)) == table.order:
                return list(combo)
    raise FreedimError("group has no generating set (corrupt table)")


def left_regular_matrices(table: FiniteGroupTable) -> np.ndarray:
    """Permutation matrices of left translation on l2(G)."""
    o = table.order
    mats = np.zeros((o, o, o), dtype=complex)
    for g in range(o):
        for h in range(o):
            mats[g, table.mul(g, h), h] = 1.0
    return mats


def regular_rep_algebra(
    table: FiniteGroupTable,
    generating_set: Optional[Sequence[int]] = None,
    cap: int = DEFAULT_ORDER_CAP,
    seed: int = 0,
) -> TracialAlgebra:
    """The group algebra of G with its canonical trace, in block form.

    The block structure is discovered numerically from the left regular
    representation; the generating tuple consists of (g + g^-1)/2 and
    (g - g^-1)/(2i) for g in a generating set of G, with exact zeros
    dropped.
    """
    from .wedderburn import blockify

    if table.order > cap:
        raise TooLarge(f"group order {table.order} exceeds the cap {cap}")
    if generating_set is None:
        generating_set = minimal_generating_set(table)
    else:
        generating_set = [int(g) for g in generating_set]
        if len(closure(table, generating_set)) != table.order:
            raise NotGeneratingSet(
                f"elements {generating_set} generate a proper subgroup"
            )

    lam = left_regular_matrices(table)
    e = table.identity

    gens, labels = [], []
    for g in generating_set:
        U = lam[g]
        Uinv = lam[table.inv(g)]
        gens.append((U + Uinv) / 2.0)
        labels.append(f"Re[{table.names[g]}]")
        gens.append((U - Uinv) / 2.0j)
        labels.append(f"Im[{table.names[g]}]")
    if not gens:  # trivial group
        gens = [lam[e]]
        labels = ["Re[e]"]

    commuting = [lam[g] for g in generating_set] or [lam[e]]
    result = blockify(
        span_mats=list(lam),
        commuting_set=commuting,
        trace_fn=lambda x: x[e, e],
        generators=gens,
        labels=labels,
        rng=np.random.default_rng(seed),
        drop_zero_generators=True,
    )
    return result.algebra


# ---------------------------------------------------------------------------
# free words and coset graphs
# ---------------------------------------------------------------------------

def reduce_word(word: Sequence[int]) -> Word:
    """Freely reduce a word (cancel adjacent inverse letter pairs)."""
    out: list[int] = []
    for letter in word:
        if letter == 0:
            raise FreedimError("0 is not a valid letter")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(int(letter))
    return tuple(out)


def word_inverse(word: Sequence[int]) -> Word:
    return tuple(-letter for letter in reversed(word))


def word_str(word: Word, names: Sequence[str]) -> str:
    """Render a reduced word with collapsed exponents, e.g. u^2*v^-1."""
    if not word:
        return "1"
    parts = []
    i = 0
    while i < len(word):
        letter = word[i]
        j = i
        while j < len(word) and word[j] == letter:
            j += 1
        count = j - i
        base = names[abs(letter) - 1]
        exp = count if letter > 0 else -count
        parts.append(base if exp == 1 else f"{base}^{exp}")
        i = j
    return "*".join(parts)


def evaluate_word(word: Word, images: Sequence[int], table: FiniteGroupTable) -> int:
    """Image of a free word under the homomorphism sending generator k to images[k-1]."""
    out = table.identity
    for letter in word:
        g = images[abs(letter) - 1]
        if letter < 0:
            g = table.inv(g)
        out = table.mul(out, g)
    return out


@dataclass
class SchreierGraph:
    """Coset graph of the kernel of a homomorphism from a free group.

    Cosets of the kernel correspond to elements of the image subgroup; each
    free generator acts on them by right translation.  Non-tree edges of a
    breadth-first spanning tree enumerate free generators of the kernel.
    """

    n: int
    cosets: tuple[int, ...]                 # image-subgroup elements, BFS order
    edges: np.ndarray                       # (index, n) coset transition table
    transversal: tuple[Word, ...]           # coset representative words
    subgroup_generators: tuple[Word, ...]   # reduced free words
    kernel_verified: bool
    names: tuple[str, ...]

    @property
    def index(self) -> int:
        return len(self.cosets)

    @property
    def rank(self) -> int:
        return len(self.subgroup_generators)


def schreier_graph(
    n: int,
    images: Sequence[int],
    table: FiniteGroupTable,
    names: Optional[Sequence[str]] = None,
) -> SchreierGraph:
    """Enumerate the kernel's cosets and extract its free generators."""
    if len(images) != n:
        raise FreedimError(f"{len(images)} images for {n} free generators")
    images = [int(g) for g in images]
    if names is None:
        names = tuple(f"x{k + 1}" for k in range(n)) if n != 2 else ("u", "v")
    else:
        names = tuple(names)

    e = table.identity
    order = [e]
    pos = {e: 0}
    transversal: list[Word] = [()]
    tree_edges: set[tuple[int, int]] = set()
    head = 0
    while head < len(order):
        v = order[head]
        for k in range(n):
            w = table.mul(v, images[k])
            if w not in pos:
                pos[w] = len(order)
                order.append(w)
                transversal.append(reduce_word(transversal[head] + (k + 1,)))
                tree_edges.add((head, k))
        head += 1

    m = len(order)
    edges = np.zeros((m, n), dtype=int)
    for i, v in enumerate(order):
        for k in range(n):
            edges[i, k] = pos[table.mul(v, images[k])]

    gens: list[Word] = []
    for i in range(m):
        for k in range(n):
            if (i, k) in tree_edges:
                continue
            target = edges[i, k]
            word = reduce_word(
                transversal[i] + (k + 1,) + word_inverse(transversal[target])
            )
            gens.append(word)

    verified = all(evaluate_word(w, images, table) == e for w in gens)
    expected = 1 + m * (n - 1)
    if len(gens) != expected:
        raise FreedimError(
            f"{len(gens)} non-tree edges but rank formula gives {expected}"
        )
    return SchreierGraph(
        n=n,
        cosets=tuple(order),
        edges=edges,
        transversal=tuple(transversal),
        subgroup_generators=tuple(gens),
        kernel_verified=verified,
        names=names,
    )


def schreier_rank(
    n: int, images: Sequence[int], table: FiniteGroupTable
) -> tuple[int, int, tuple[Word, ...]]:
    """(index, rank, free generators) of the kernel of the homomorphism."""
    graph = schreier_graph(n, images, table)
    return graph.index, graph.rank, graph.subgroup_generators


# ---------------------------------------------------------------------------
# Betti inputs and the dimension formula for group algebra generators
# ---------------------------------------------------------------------------

@dataclass
class BettiInput:
    """First two L2 Betti numbers of a group, with provenance."""

    beta0: float
    beta1: float
    provenance: str

    @classmethod
    def free_group(cls, k: int) -> "BettiInput":
        if k < 1:
            raise FreedimError("free-group rank must be >= 1")
        return cls(beta0=0.0, beta1=float(k - 1), provenance=f"free_group({k})")

    @classmethod
    def finite_group(cls, order: int) -> "BettiInput":
        if order < 1:
            raise FreedimError("group order must be >= 1")
        return cls(beta0=1.0 / order, beta1=0.0, provenance=f"finite_group({order})")

    @classmethod
    def user_supplied(cls, beta0: float, beta1: float) -> "BettiInput":
        return cls(beta0=float(beta0), beta1=float(beta1),
                   provenance="user_supplied (unvalidated)")


def betti_delta_formula(inp: BettiInput) -> float:
    """beta1 - beta0 + 1: the dimension value attached to group-algebra generators."""
    return inp.beta1 - inp.beta0 + 1.0


# ---------------------------------------------------------------------------
# the semicontinuity counterexample
# ---------------------------------------------------------------------------

def counterexample_report(k_values: Sequence[int] = (1, 2, 3, 4, 5, 10, 100)) -> dict:
    """A generator sequence whose dimension value drops in the limit.

    Eight self-adjoint variables over the free group on u, v: the real and
    imaginary parts of u^2, v^2 and uv, plus (1/k) Re u and (1/k) Im v.
    For every finite k the tuple generates the whole two-generator free group
    algebra (value 2); the limit tuple generates the algebra of the kernel of
    u, v -> 1 in Z/2, a free group of rank 3 (value 3), while the tuples
    converge in operator norm.
    """
    z2 = cyclic_group(2)
    graph = schreier_graph(2, [1, 1], z2, names=("u", "v"))

    per_k_delta = betti_delta_formula(BettiInput.free_group(2))
    limit_delta = betti_delta_formula(BettiInput.free_group(graph.rank))

    variables = [
        {"name": "A1", "definition": "Re(u^2)", "limit": "Re(u^2)"},
        {"name": "A2", "definition": "Im(u^2)", "limit": "Im(u^2)"},
        {"name": "B1", "definition": "Re(v^2)", "limit": "Re(v^2)"},
        {"name": "B2", "definition": "Im(v^2)", "limit": "Im(v^2)"},
        {"name": "C1", "definition": "Re(u*v)", "limit": "Re(u*v)"},
        {"name": "C2", "definition": "Im(u*v)", "limit": "Im(u*v)"},
        {"name": "W1", "definition": "(1/k) Re(u)", "limit": "0"},
        {"name": "W2", "definition": "(1/k) Im(v)", "limit": "0"},
    ]
    per_k = [
        {
            "k": int(k),
            "delta": per_k_delta,
            "generated": "group algebra of the free group on u, v",
            # u is unitary, so its real and imaginary parts have norm <= 1
            "shrink_norm_bound": 1.0 / int(k),
        }
        for k in k_values
    ]

    return {
        "variables": variables,
        "per_k": per_k,
        "liminf_delta": per_k_delta,
        "limit": {
            "delta": limit_delta,
            "generated": "group algebra of the kernel of u, v -> 1 in Z/2",
            "kernel_index": graph.index,
            "kernel_rank": graph.rank,
            "kernel_generators": [word_str(w, graph.names)
                                  for w in graph.subgroup_generators],
            "kernel_verified": graph.kernel_verified,
        },
        "convergence": {
            "mode": "operator norm (hence strong)",
            "bound": "shrinking coordinates have norm <= 1/k; others are constant",
        },
        "verdict": "liminf delta = 2 < 3 = delta(limit)",
        "strict_drop": per_k_delta < limit_delta,
        "definition_note": (
            "the shrinking pair is taken as (1/k) Re(u) and (1/k) Im(v); any "
            "choice of vanishing coordinates built from u and v leaves the "
            "generated algebras, hence both dimension values, unchanged"
        ),
        "provenance": {
            "per_k_delta": "free-group formula at rank 2 (pinned)",
            "limit_delta": "free-group formula at the kernel rank from coset "
                           "enumeration",
        },
    }
