"""Sparse weighted-shift operator machinery over labeled bases.

Operators are lazy kernels: a rule mapping a basis label to the finite list
of (target label, coefficient) pairs produced by one application.  Kernels
stay lazy through sums, compositions and commutators; they are materialized
to explicit sparse matrices only where adjoints or reorderings are needed.
Labels are tuples of doubled integers so half-integer arithmetic is exact.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Sequence, Tuple

Label = Tuple[int, ...]
Emission = List[Tuple[Label, complex]]


@dataclass(frozen=True)
class SparseKernel:
    """A lazy operator on a labeled basis.

    `rule` returns the action on one basis vector.  `shift_radius` is an
    upper bound on how much one application can change the truncation
    governing component (in plain, not doubled, units).  Antilinear
    operators set `conjugates`; composition then conjugates coefficients
    coming from factors to the right.
    """

    algebra: str
    rule: Callable[[Label], Emission]
    shift_radius: float = 1.0
    conjugates: bool = False

    def apply(self, label: Label) -> Emission:
        return [(w, c) for (w, c) in self.rule(label) if c != 0]


def apply(kernel: SparseKernel, label: Label) -> Emission:
    """Action of the operator on one basis vector, exact zeros dropped."""
    return kernel.apply(label)


def zero_kernel(algebra: str) -> SparseKernel:
    return SparseKernel(algebra, lambda v: [], shift_radius=0.0)


def identity_kernel(algebra: str) -> SparseKernel:
    return SparseKernel(algebra, lambda v: [(v, 1.0)], shift_radius=0.0)


def diagonal_kernel(algebra: str, weight: Callable[[Label], complex]) -> SparseKernel:
    return SparseKernel(algebra, lambda v: [(v, weight(v))], shift_radius=0.0)


def k_scale(c, k: SparseKernel) -> SparseKernel:
    return SparseKernel(k.algebra, lambda v: [(w, c * x) for (w, x) in k.rule(v)],
                        k.shift_radius, k.conjugates)


def k_add(*kernels: SparseKernel) -> SparseKernel:
    if not kernels:
        raise ValueError("k_add needs at least one kernel")
    alg = kernels[0].algebra
    if any(k.algebra != alg for k in kernels):
        raise ValueError("cannot add kernels over different algebras")
    if any(k.conjugates != kernels[0].conjugates for k in kernels):
        raise ValueError("cannot add linear and antilinear kernels")

    def rule(v):
        acc: Dict[Label, complex] = {}
        for k in kernels:
            for w, c in k.rule(v):
                acc[w] = acc.get(w, 0.0) + c
        return [(w, c) for w, c in acc.items() if c != 0]

    return SparseKernel(alg, rule, max(k.shift_radius for k in kernels),
                        kernels[0].conjugates)


def k_compose(k1: SparseKernel, k2: SparseKernel) -> SparseKernel:
    """Operator product k1*k2 (k2 applied first).

    If k1 is antilinear, coefficients produced by k2 are conjugated before
    being passed through.
    """
    if k1.algebra != k2.algebra:
        raise ValueError("cannot compose kernels over different algebras")
    conj_right = k1.conjugates

    def rule(v):
        acc: Dict[Label, complex] = {}
        for w, c in k2.rule(v):
            if c == 0:
                continue
            if conj_right:
                c = c.conjugate() if isinstance(c, complex) else c
            for u, d in k1.rule(w):
                acc[u] = acc.get(u, 0.0) + c * d
        return [(u, c) for u, c in acc.items() if c != 0]

    return SparseKernel(k1.algebra, rule, k1.shift_radius + k2.shift_radius,
                        k1.conjugates ^ k2.conjugates)


def k_commutator(a: SparseKernel, b: SparseKernel) -> SparseKernel:
    return k_add(k_compose(a, b), k_scale(-1.0, k_compose(b, a)))


class Word:
    """Formal linear combination of ordered words in named generators.

    Terms map tuples of generator names to complex coefficients; the
    involution reverses each word, stars every letter and conjugates the
    coefficients (an antilinear anti-homomorphism).
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Tuple[str, ...], complex] | None = None):
        self.terms: Dict[Tuple[str, ...], complex] = dict(terms or {})

    @classmethod
    def one(cls) -> "Word":
        return cls({(): 1.0})

    @classmethod
    def gen(cls, name: str) -> "Word":
        return cls({(name,): 1.0})

    @classmethod
    def monomial(cls, letters: Sequence[str], coeff=1.0) -> "Word":
        return cls({tuple(letters): coeff})

    def __add__(self, other: "Word") -> "Word":
        out = dict(self.terms)
        for t, c in other.terms.items():
            out[t] = out.get(t, 0.0) + c
        return Word({t: c for t, c in out.items() if c != 0})

    def __sub__(self, other: "Word") -> "Word":
        return self + (-1.0) * other

    def __mul__(self, other):
        if not isinstance(other, Word):
            return Word({t: c * other for t, c in self.terms.items()})
        out: Dict[Tuple[str, ...], complex] = {}
        for t1, c1 in self.terms.items():
            for t2, c2 in other.terms.items():
                t = t1 + t2
                out[t] = out.get(t, 0.0) + c1 * c2
        return Word({t: c for t, c in out.items() if c != 0})

    def __rmul__(self, other):
        return Word({t: other * c for t, c in self.terms.items()})

    def star(self) -> "Word":
        out: Dict[Tuple[str, ...], complex] = {}
        for t, c in self.terms.items():
            st = tuple(_star_name(g) for g in reversed(t))
            out[st] = out.get(st, 0.0) + complex(c).conjugate()
        return Word(out)

    def __repr__(self):
        return f"Word({self.terms!r})"


def _star_name(name: str) -> str:
    return name[:-1] if name.endswith("*") else name + "*"


def word_power(w: Word, n: int) -> Word:
    out = Word.one()
    for _ in range(n):
        out = out * w
    return out


def evaluate_word(word: Word, gens: Mapping[str, SparseKernel], label: Label) -> Emission:
    """Apply a formal word, rightmost generator first, merging like terms."""
    total: Dict[Label, complex] = {}
    for letters, coeff in word.terms.items():
        state: Dict[Label, complex] = {label: 1.0}
        for name in reversed(letters):
            k = gens.get(name)
            if k is None:
                raise KeyError(f"unbound generator {name!r}")
            new: Dict[Label, complex] = {}
            for v, c in state.items():
                for w, d in k.rule(v):
                    if d != 0:
                        new[w] = new.get(w, 0.0) + c * d
            state = new
            if not state:
                break
        for v, c in state.items():
            total[v] = total.get(v, 0.0) + coeff * c
    return [(v, c) for v, c in sorted(total.items()) if c != 0]


def word_shift_radius(word: Word, gens: Mapping[str, SparseKernel]) -> float:
    radius = 0.0
    for letters in word.terms:
        radius = max(radius, sum(gens[g].shift_radius for g in letters))
    return radius


@dataclass(frozen=True)
class TruncatedBasis:
    """Deterministic enumeration of admissible labels below a cutoff.

    Labels are sorted ascending lexicographically; `governing` extracts the
    truncation-governing component (plain units, e.g. l or n+h).
    """

    algebra: str
    cutoff: float
    labels: Tuple[Label, ...]
    governing: Callable[[Label], float]
    index: Mapping[Label, int] = field(default=None, repr=False)

    def __post_init__(self):
        ordered = tuple(sorted(self.labels))
        object.__setattr__(self, "labels", ordered)
        object.__setattr__(self, "index", {v: i for i, v in enumerate(ordered)})

    def __len__(self):
        return len(self.labels)

    def interior(self, margin: float) -> List[Label]:
        cut = self.cutoff - margin
        return [v for v in self.labels if self.governing(v) <= cut + 1e-12]


def relation_residual(rels: Sequence[Word], gens: Mapping[str, SparseKernel],
                      basis: TruncatedBasis, margin: float | None = None) -> float:
    """Max absolute coefficient of any relation on any interior label.

    The interior restriction (governing component <= cutoff - margin) keeps
    truncation from manufacturing spurious boundary terms.
    """
    needed = max(word_shift_radius(w, gens) for w in rels)
    if margin is None:
        margin = needed
    elif margin < needed:
        raise ValueError(f"margin {margin} below relation shift radius {needed}")
    worst = 0.0
    for v in basis.interior(margin):
        for rel in rels:
            for _, c in evaluate_word(rel, gens, v):
                a = abs(c)
                if a > worst:
                    worst = a
    return worst


@dataclass
class SparseMatrix:
    """Minimal sparse matrix: dimension plus (row, col) -> value entries."""

    n: int
    entries: Dict[Tuple[int, int], complex]

    def triples(self) -> List[Tuple[int, int, complex]]:
        return [(i, j, v) for (i, j), v in sorted(self.entries.items())]

    def adjoint(self) -> "SparseMatrix":
        return SparseMatrix(self.n, {(j, i): complex(v).conjugate()
                                     for (i, j), v in self.entries.items()})

    def compose(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        by_row: Dict[int, List[Tuple[int, complex]]] = {}
        for (i, k), v in self.entries.items():
            by_row.setdefault(k, []).append((i, v))
        out: Dict[Tuple[int, int], complex] = {}
        for (k, j), w in other.entries.items():
            for i, v in by_row.get(k, ()):
                out[(i, j)] = out.get((i, j), 0.0) + v * w
        return SparseMatrix(self.n, {k: v for k, v in out.items() if v != 0})

    def add(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0.0) + v
        return SparseMatrix(self.n, {k: v for k, v in out.items() if v != 0})

    def scale(self, c) -> "SparseMatrix":
        return SparseMatrix(self.n, {k: c * v for k, v in self.entries.items()})

    def commutator(self, other: "SparseMatrix") -> "SparseMatrix":
        return self.compose(other).add(other.compose(self).scale(-1.0))

    def trace(self) -> complex:
        return sum(self.entries.get((i, i), 0.0) for i in range(self.n))


def materialize(kernel: SparseKernel, basis: TruncatedBasis) -> SparseMatrix:
    """Matrix of the kernel on the truncated basis; emissions leaving the
    cutoff are dropped (use interior labels for artifact-free results)."""
    entries: Dict[Tuple[int, int], complex] = {}
    idx = basis.index
    for j, v in enumerate(basis.labels):
        for w, c in kernel.rule(v):
            i = idx.get(w)
            if i is not None and c != 0:
                entries[(i, j)] = entries.get((i, j), 0.0) + c
    return SparseMatrix(len(basis), entries)


def trace(m: SparseMatrix) -> complex:
    return m.trace()


def diag_coeff(kernel: SparseKernel, label: Label) -> complex:
    for w, c in kernel.rule(label):
        if w == label:
            return c
    return 0.0


def weighted_trace(weight: Callable[[Label], float], kernel: SparseKernel,
                   basis: TruncatedBasis) -> complex:
    """Sum of weight(v) <v|kernel|v> in enumeration order (deterministic)."""
    return sum(weight(v) * diag_coeff(kernel, v) for v in basis.labels)


def interior_trace(kernel: SparseKernel, basis: TruncatedBasis, margin: float,
                   weight: Callable[[Label], float] | None = None,
                   threads: int = 1, block_size: int = 512) -> complex:
    """Trace over interior labels, lazily evaluated per label.

    Diagonal elements are exact (the kernel acts on the untruncated label
    set); the truncation error is purely the dropped tail.  Partial sums are
    accumulated per enumeration-order block and combined in block order, so
    the result does not depend on the number of threads.
    """
    labels = basis.interior(margin)
    blocks = [labels[i:i + block_size] for i in range(0, len(labels), block_size)]

    def block_sum(chunk):
        if weight is None:
            return sum(diag_coeff(kernel, v) for v in chunk)
        return sum(weight(v) * diag_coeff(kernel, v) for v in chunk)

    if threads > 1 and len(blocks) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as ex:
            partials = list(ex.map(block_sum, blocks))
    else:
        partials = [block_sum(b) for b in blocks]
    total = 0.0
    for p in partials:
        total += p
    return total


def sup_decay_ratio(kernel: SparseKernel, basis: TruncatedBasis,
                    rate: Callable[[Label], float]) -> float:
    """max over emitted terms of |coefficient| / rate(source label)."""
    worst = 0.0
    for v in basis.labels:
        r = rate(v)
        if r <= 0:
            raise ValueError("rate must be strictly positive")
        for _, c in kernel.rule(v):
            a = abs(c) / r
            if a > worst:
                worst = a
    return worst


def adjoint_residual(kernel: SparseKernel, adjoint: SparseKernel,
                     basis: TruncatedBasis, margin: float | None = None) -> float:
    """Max |<w|k|v> - conj <v|k*|w>| over interior source labels v."""
    if margin is None:
        margin = max(kernel.shift_radius, adjoint.shift_radius)
    worst = 0.0
    for v in basis.interior(margin):
        forward = dict(kernel.apply(v))
        targets = set(forward)
        for w, c in adjoint.apply(v):
            targets.add(w)
        for w in targets:
            c = forward.get(w, 0.0)
            back = 0.0
            for u, d in adjoint.apply(w):
                if u == v:
                    back = d
                    break
            worst = max(worst, abs(c - complex(back).conjugate()))
    return worst


def matrix_of_kernels_mul(a, b):
    """Product of two square matrices whose entries are kernels."""
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            row.append(k_add(*[k_compose(a[i][k], b[k][j]) for k in range(n)]))
        out.append(row)
    return out


def matrix_of_kernels_scalar(op: SparseKernel, mat):
    """Left-multiply each entry by a fixed operator on the base space."""
    return [[k_compose(op, e) for e in row] for row in mat]


def matrix_kernels_commutator_with(op: SparseKernel, mat):
    """Entrywise [op, e_ij] for op acting on the base space."""
    return [[k_commutator(op, e) for e in row] for row in mat]


def matrix_kernels_trace(mat, basis: TruncatedBasis, margin: float,
                         weight=None, threads: int = 1) -> complex:
    """Trace over (basis x C^n) of a matrix of kernels."""
    total = 0.0
    for i in range(len(mat)):
        total += interior_trace(mat[i][i], basis, margin, weight=weight,
                                threads=threads)
    return total
