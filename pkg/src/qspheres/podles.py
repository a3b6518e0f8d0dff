"""Podleś quantum spheres: equivariant representations, Dirac operator,
index pairings, zeta residues and the weak real structure.

Basis labels are (L, M, S) with L = 2l, M = 2m doubled integers and
S in {0, 1} the sector of the doubled spinor space; sector 0 carries the
representation with charge -N (grading +1), sector 1 the one with +N
(grading -1).  All coefficient formulas are evaluated through exact
doubled-integer arithmetic; square-root arguments are provably nonnegative
on admissible labels and asserted so at runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .qnum import HalfInt, QNumbers, zeta_closed
from .opalg import (Label, SparseKernel, TruncatedBasis, Word, diagonal_kernel,
                    identity_kernel, interior_trace, k_add, k_commutator,
                    k_compose, k_scale, sup_decay_ratio)


def _psqrt(x: float) -> float:
    if x < -1e-12:
        raise ValueError(f"negative radicand {x}")
    return math.sqrt(x) if x > 0 else 0.0


@dataclass(frozen=True)
class PodlesParams:
    """Sphere parameters: 0 < q < 1, 0 <= s <= 1 and the half-integer charge N."""

    q: float
    s: float
    N: HalfInt

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must satisfy 0 < q < 1, got {self.q}")
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"s must satisfy 0 <= s <= 1, got {self.s}")
        object.__setattr__(self, "N", HalfInt.parse(self.N))

    @property
    def t(self) -> float:
        return 1.0 - self.s * self.s


ALG = "podles"


def admissible(label: Label, tn: int) -> bool:
    L, M, S = label
    if S not in (0, 1):
        return False
    a = abs(tn)
    return L >= a and (L - a) % 2 == 0 and L >= abs(M) and (L - M) % 2 == 0


def basis(p: PodlesParams, cutoff: float) -> TruncatedBasis:
    """All labels with l <= cutoff, ascending lexicographic order."""
    tn = p.N.twice
    labels = []
    L = abs(tn)
    while L <= 2 * cutoff + 1e-9:
        for M in range(-L, L + 1, 2):
            labels.append((L, M, 0))
            labels.append((L, M, 1))
        L += 2
    return TruncatedBasis(ALG, cutoff, tuple(labels), lambda v: v[0] / 2.0)


def alpha(l, p: PodlesParams) -> float:
    """Equivariant-representation coefficient alpha_N(l), nonnegative root."""
    L = HalfInt.parse(l).twice
    return _alpha(QNumbers(p.q), p, p.N.twice, L)


def beta(l, p: PodlesParams) -> float:
    """Equivariant-representation coefficient beta_N(l)."""
    L = HalfInt.parse(l).twice
    return _beta(QNumbers(p.q), p, p.N.twice, L)


def _alpha(qn: QNumbers, p: PodlesParams, tn: int, L: int) -> float:
    # smooth rewrite: the 1/[l]^2 of the printed form is absorbed through
    # [2l]/[l] = q^l + q^-l, removing the l=0 indeterminacy
    if L < abs(tn):
        raise ValueError(f"alpha needs l >= |N|, got 2l={L}, 2N={tn}")
    if L == 0:
        return 0.0
    t = p.t
    qp = qn.qpow
    inner = (1.0 - t) * (qp(L) + qp(-L)) ** 2 + qp(-2 * tn) * (t - 1.0 + qp(2 * tn)) ** 2
    outer = qn(4) * qn(L + tn) * qn(L - tn) / (qn(2 * L) * qn(2 * L + 2))
    return _psqrt(outer) * _psqrt(inner)


def _beta(qn: QNumbers, p: PodlesParams, tn: int, L: int) -> float:
    if L < abs(tn):
        raise ValueError(f"beta needs l >= |N|, got 2l={L}, 2N={tn}")
    t = p.t
    sign = 1 if tn >= 0 else -1
    num = qn(2 * tn) * (qn(4) - qn.qpow(2 * sign) * t) \
        + t * (1.0 / qn.q - qn.q) * qn(L - abs(tn)) * qn(L + abs(tn) + 2)
    return num / (qn.q * qn(2 * L + 4))


class _Rep:
    """Kernels of one parameter set, with cached q-numbers."""

    def __init__(self, p: PodlesParams):
        self.p = p
        self.qn = QNumbers(p.q)
        self.tn = p.N.twice

    def _n_eff(self, sector: int) -> int:
        return self.tn if sector == 1 else -self.tn

    # crossed-product representation coefficients; all take doubled l, m
    def _atilde_plus(self, tn: int, L: int, M: int) -> float:
        qn, qp = self.qn, self.qn.qpow
        a = _alpha(qn, self.p, tn, L + 2)
        return qp(M) * _psqrt(qn(4) * qn(L - M + 2) * qn(L + M + 2)
                              / (qn(2 * L + 2) * qn(2 * L + 4))) * a

    def _atilde_zero(self, tn: int, L: int, M: int) -> float:
        qn, qp = self.qn, self.qn.qpow
        # ([2l] - q^(l+m+1) [2] [l-m]) / [2l]; at l=0 the ratio [l-m]/[2l]
        # degenerates to [l]/[2l] whose limit is 1/2
        ratio = 0.5 if L == 0 else qn(L - M) / qn(2 * L)
        c0 = 1.0 - qp(L + M + 2) * qn(4) * ratio
        return c0 * _beta(qn, self.p, tn, L)

    def _btilde_plus(self, tn: int, L: int, M: int) -> float:
        qn, qp = self.qn, self.qn.qpow
        a = _alpha(qn, self.p, tn, L + 2)
        return qp(M - L) * _psqrt(qn(L + M + 2) * qn(L + M + 4)
                                  / (qn(2 * L + 2) * qn(2 * L + 4))) * a

    def _btilde_zero(self, tn: int, L: int, M: int) -> float:
        qn, qp = self.qn, self.qn.qpow
        if L == 0:
            return 0.0
        return -qp(M + 4) * _psqrt(qn(4) * qn(L - M) * qn(L + M + 2)) \
            * _beta(qn, self.p, tn, L) / qn(2 * L)

    def _btilde_minus(self, tn: int, L: int, M: int) -> float:
        qn, qp = self.qn, self.qn.qpow
        if L < 2:
            return 0.0
        a = _alpha(qn, self.p, tn, L)
        return -qp(L + M + 2) * _psqrt(qn(L - M) * qn(L - M - 2)
                                       / (qn(2 * L - 2) * qn(2 * L))) * a

    def _ok(self, w: Label) -> bool:
        return admissible(w, self.tn)

    def x1(self, v: Label):
        L, M, S = v
        tn = self._n_eff(S)
        out = []
        for w, f in (((L + 2, M + 2, S), self._btilde_plus),
                     ((L, M + 2, S), self._btilde_zero),
                     ((L - 2, M + 2, S), self._btilde_minus)):
            if self._ok(w):
                out.append((w, f(tn, L, M)))
        return out

    def x0(self, v: Label):
        L, M, S = v
        tn = self._n_eff(S)
        out = []
        if self._ok((L + 2, M, S)):
            out.append(((L + 2, M, S), self._atilde_plus(tn, L, M)))
        if self._ok((L, M, S)):
            out.append(((L, M, S), self._atilde_zero(tn, L, M)))
        if self._ok((L - 2, M, S)):
            out.append(((L - 2, M, S), self._atilde_plus(tn, L - 2, M)))
        return out

    def xm1(self, v: Label):
        L, M, S = v
        tn = self._n_eff(S)
        f = -1.0 / self.qn.q
        out = []
        if self._ok((L + 2, M - 2, S)):
            out.append(((L + 2, M - 2, S), f * self._btilde_minus(tn, L + 2, M - 2)))
        if self._ok((L, M - 2, S)):
            out.append(((L, M - 2, S), f * self._btilde_zero(tn, L, M - 2)))
        if self._ok((L - 2, M - 2, S)):
            out.append(((L - 2, M - 2, S), f * self._btilde_plus(tn, L - 2, M - 2)))
        return out


def _wrap(p: PodlesParams, raw, radius=1.0) -> SparseKernel:
    tn = p.N.twice

    def rule(v):
        if not admissible(v, tn):
            return []
        return [(w, c) for (w, c) in raw(v) if c != 0 and admissible(w, tn)]

    return SparseKernel(ALG, rule, radius)


def generator_kernel(name: str, p: PodlesParams) -> SparseKernel:
    """Kernel of a sphere generator on the doubled spinor space.

    Names: x1, x0, x-1 (crossed-product generators), their stars, and the
    A, B, B* set related by the generator change x1 = (q[2])^(1/2) B,
    x0 = -q[2] A + (1-s^2).
    """
    rep = _Rep(p)
    q = p.q
    q2 = QNumbers(q)(4)  # [2]
    if name == "x1":
        return _wrap(p, rep.x1)
    if name == "x0" or name == "x0*":
        return _wrap(p, rep.x0)
    if name in ("x-1", "xm1"):
        return _wrap(p, rep.xm1)
    if name == "x1*":
        return k_scale(-q, _wrap(p, rep.xm1))
    if name in ("x-1*", "xm1*"):
        return k_scale(-1.0 / q, _wrap(p, rep.x1))
    if name == "A" or name == "A*":
        x0 = _wrap(p, rep.x0)
        one = identity_kernel(ALG)
        return k_scale(1.0 / (q * q2), k_add(k_scale(p.t, one), k_scale(-1.0, x0)))
    if name == "B":
        return k_scale((q * q2) ** -0.5, _wrap(p, rep.x1))
    if name == "B*":
        return k_scale(-q * (q * q2) ** -0.5, _wrap(p, rep.xm1))
    raise ValueError(f"unknown generator {name!r}")


def uqsu2_kernel(name: str, p: PodlesParams) -> SparseKernel:
    """Symmetry-algebra generators K, K^-1, E, F acting per sector."""
    qn = QNumbers(p.q)
    qp = qn.qpow
    if name == "K":
        return _wrap(p, lambda v: [(v, qp(v[1]))], radius=0.0)
    if name in ("K-1", "Kinv"):
        return _wrap(p, lambda v: [(v, qp(-v[1]))], radius=0.0)
    if name == "E":
        def rule(v):
            L, M, S = v
            return [((L, M + 2, S), _psqrt(qn(L - M) * qn(L + M + 2)))]
        return _wrap(p, rule, radius=0.0)
    if name == "F":
        def rule(v):
            L, M, S = v
            return [((L, M - 2, S), _psqrt(qn(L + M) * qn(L - M + 2)))]
        return _wrap(p, rule, radius=0.0)
    raise ValueError(f"unknown symmetry generator {name!r}")


def generators(p: PodlesParams) -> dict[str, SparseKernel]:
    gens = {n: generator_kernel(n, p)
            for n in ("x1", "x0", "x-1", "x1*", "x0*", "x-1*", "A", "A*", "B", "B*")}
    for n in ("K", "Kinv", "E", "F"):
        gens[n] = uqsu2_kernel(n, p)
    return gens


def grading(p: PodlesParams) -> SparseKernel:
    return _wrap(p, lambda v: [(v, 1.0 if v[2] == 0 else -1.0)], radius=0.0)


def sign_F(p: PodlesParams) -> SparseKernel:
    return _wrap(p, lambda v: [((v[0], v[1], 1 - v[2]), 1.0)], radius=0.0)


def dirac(p: PodlesParams) -> SparseKernel:
    """D |l,m;+-N> = (l - |N| + 1) |l,m;-+N>; requires N != 0."""
    if p.N.twice == 0:
        raise ValueError("the spinor construction needs N != 0")
    a = abs(p.N.twice)

    def rule(v):
        L, M, S = v
        return [((L, M, 1 - S), (L - a) / 2.0 + 1.0)]

    return _wrap(p, rule, radius=0.0)


def abs_dirac_eigenvalue(p: PodlesParams, label: Label) -> float:
    return (label[0] - abs(p.N.twice)) / 2.0 + 1.0


def idempotent_es(p: PodlesParams):
    """The charge-one idempotent as a 2x2 matrix of kernels."""
    q = p.q
    s2 = p.s * p.s
    f = 1.0 / (1.0 + s2)
    one = identity_kernel(ALG)
    A = generator_kernel("A", p)
    B = generator_kernel("B", p)
    Bs = generator_kernel("B*", p)
    return [[k_scale(f, k_add(k_scale(s2, one), A)), k_scale(f * q, B)],
            [k_scale(f / q, Bs), k_scale(f, k_add(one, k_scale(-q * q, A)))]]


def _commutator_matrix_with_F(p: PodlesParams, mat):
    F = sign_F(p)
    return [[k_commutator(F, e) for e in row] for row in mat]


def _mat_mul(a, b):
    n = len(a)
    return [[k_add(*[k_compose(a[i][k], b[k][j]) for k in range(n)])
             for j in range(n)] for i in range(n)]


def fredholm_index(p: PodlesParams, cutoff: float, threads: int = 1) -> float:
    """(1/2) Tr(gamma F [F, e_s]) over interior labels; converges to 2N."""
    if p.N.twice == 0:
        raise ValueError("index needs N != 0")
    b = basis(p, cutoff)
    fe = _commutator_matrix_with_F(p, idempotent_es(p))
    gF = k_compose(grading(p), sign_F(p))
    total = 0.0
    for i in range(2):
        total += interior_trace(k_compose(gF, fe[i][i]), b, margin=3,
                                threads=threads)
    return 0.5 * complex(total).real


def chern0(word: Word, p: PodlesParams, cutoff: float, threads: int = 1) -> float:
    """(1/2) Tr(gamma F [F, a]) for a polynomial a in the generators."""
    if p.N.twice == 0:
        raise ValueError("chern0 needs N != 0")
    gens = generators(p)
    a = word_to_kernel(word, gens)
    b = basis(p, cutoff)
    gF = k_compose(grading(p), sign_F(p))
    k = k_compose(gF, k_commutator(sign_F(p), a))
    margin = max(3.0, a.shift_radius)
    val = interior_trace(k, b, margin=margin, threads=threads)
    return 0.5 * complex(val).real


def word_to_kernel(word: Word, gens) -> SparseKernel:
    algebra = next(iter(gens.values())).algebra
    pieces = []
    for letters, coeff in word.terms.items():
        k = identity_kernel(algebra)
        for name in letters:
            k = k_compose(k, gens[name])
        pieces.append(k_scale(coeff, k))
    return k_add(*pieces) if pieces else SparseKernel(algebra, lambda v: [], 0.0)


def twisted_q_index(p: PodlesParams, cutoff: float, threads: int = 1) -> float:
    """-(1/2) Tr(K^-2 eta gamma F [F,e_s]^3); converges to sign(N) [2|N|]."""
    if p.N.twice == 0:
        raise ValueError("twisted index needs N != 0")
    q = p.q
    qp = QNumbers(q).qpow
    b = basis(p, cutoff)
    fe = _commutator_matrix_with_F(p, idempotent_es(p))
    fe3 = _mat_mul(_mat_mul(fe, fe), fe)
    kinv2 = _wrap(p, lambda v: [(v, qp(-2 * v[1]))], radius=0.0)  # q^(-2m)
    left = k_compose(kinv2, k_compose(grading(p), sign_F(p)))
    eta = (q, 1.0 / q)
    total = 0.0
    for i in range(2):
        total += eta[i] * complex(interior_trace(
            k_compose(left, fe3[i][i]), b, margin=3, threads=threads)).real
    return -0.5 * total


def zeta_partial(s: float, p: PodlesParams, cutoff: float,
                 weight=None) -> float:
    """Partial Tr(T |D|^-s); with T = 1 the multiplicity form is used."""
    a = abs(float(p.N))
    if weight is None:
        if s <= 2:
            raise ValueError("full-trace comparison needs s > 2")
        nmax = int(cutoff - a + 1 + 1e-9)
        return sum((4 * n + 4 * a - 2) * float(n) ** -s for n in range(1, nmax + 1))
    total = 0.0
    for v in basis(p, cutoff).labels:
        total += weight(v) * abs_dirac_eigenvalue(p, v) ** -s
    return total


def zeta_closed_form(s: float, p: PodlesParams) -> float:
    """4 zeta(s-1) + (4|N|-2) zeta(s)."""
    return 4.0 * zeta_closed(s - 1.0) + (4.0 * abs(float(p.N)) - 2.0) * zeta_closed(s)


def top_residue(word: Word, p: PodlesParams) -> float:
    """Top zeta residue of a polynomial word via the circle symbol map.

    The symbol sends A to 0 and B to s*u; only the u^0 Fourier mode
    survives the integral, with overall normalization 4.
    """
    q = p.q
    s = p.s
    q2 = QNumbers(q)(4)
    symbols = {
        "A": {}, "A*": {},
        "B": {1: s}, "B*": {-1: s},
        "x1": {1: (q * q2) ** 0.5 * s}, "x1*": {-1: (q * q2) ** 0.5 * s},
        "x0": {0: p.t}, "x0*": {0: p.t},
        "x-1": {-1: -(q * q2) ** 0.5 * s / q}, "x-1*": {1: -(q * q2) ** 0.5 * s / q},
    }
    c0 = 0.0
    for letters, coeff in word.terms.items():
        prod = {0: 1.0}
        for name in letters:
            sym = symbols[name]
            new = {}
            for k1, c1 in prod.items():
                for k2, c2 in sym.items():
                    new[k1 + k2] = new.get(k1 + k2, 0.0) + c1 * c2
            prod = new
        c0 += coeff * prod.get(0, 0.0)
    return 4.0 * complex(c0).real


def real_structure_J(p: PodlesParams) -> SparseKernel:
    """Antilinear J |l,m;+-N> = (-1)^(m+N) |l,-m;-+N>."""
    tn = p.N.twice

    def rule(v):
        L, M, S = v
        return [((L, -M, 1 - S), float((-1) ** ((M + tn) // 2)))]

    k = _wrap(p, rule, radius=0.0)
    return SparseKernel(k.algebra, k.rule, 0.0, conjugates=True)


def weak_real_decay(a: str, b: str, p: PodlesParams, cutoff: float):
    """Decay ratios of [a, J b* J^-1] and [[D, a], J b* J^-1] against q^l."""
    gens = generators(p)
    J = real_structure_J(p)
    Jinv = k_scale(float((-1) ** p.N.twice), J)
    bstar = gens[_star(b)]
    jbj = k_compose(k_compose(J, bstar), Jinv)
    c1 = k_commutator(gens[a], jbj)
    c2 = k_commutator(k_commutator(dirac(p), gens[a]), jbj)
    bas = basis(p, cutoff)
    rate = lambda v: p.q ** (v[0] / 2.0)
    return sup_decay_ratio(c1, bas, rate), sup_decay_ratio(c2, bas, rate)


def _star(name: str) -> str:
    return name[:-1] if name.endswith("*") else name + "*"


def x_relations(p: PodlesParams):
    """Defining relations of the crossed-product generator set."""
    q = p.q
    t = p.t
    q2 = QNumbers(q)(4)
    x1, x0, xm1 = Word.gen("x1"), Word.gen("x0"), Word.gen("x-1")
    one = Word.one()
    r1 = x1 * x0 - q ** -2 * (x0 * x1) - t * (1 - q ** -2) * x1
    r2 = xm1 * x0 - q ** 2 * (x0 * xm1) - t * (1 - q ** 2) * xm1
    r3 = (-q2) * (xm1 * x1) + (q ** 2 * x0 + t * one) * (x0 - t * one) \
        - q2 ** 2 * (1 - t) * one
    r4 = (-q2) * (x1 * xm1) + (q ** -2 * x0 + t * one) * (x0 - t * one) \
        - q2 ** 2 * (1 - t) * one
    return [r1, r2, r3, r4]


def ab_relations(p: PodlesParams):
    """Defining relations in the A, B generator set."""
    q = p.q
    s2 = p.s * p.s
    A, B, Bs = Word.gen("A"), Word.gen("B"), Word.gen("B*")
    one = Word.one()
    r1 = A * B - q ** 2 * (B * A)
    r2 = B * Bs + (A + s2 * one) * (A - one)
    r3 = Bs * B + (q ** 2 * A + s2 * one) * (q ** 2 * A - one)
    return [r1, r2, r3]


def equivariance_relations(p: PodlesParams):
    q = p.q
    K, E, A, B = Word.gen("K"), Word.gen("E"), Word.gen("A"), Word.gen("B")
    return [K * B - q * (B * K),
            K * A - A * K,
            E * B - (1.0 / q) * (B * E),
            E * A - A * E + q ** -0.5 * (B * K)]


def scalar_consistency(p: PodlesParams, cutoff: float) -> float:
    """Max deviation at N = 0 between the crossed-product kernels (after the
    generator change) and the left regular representation."""
    if p.N.twice != 0:
        raise ValueError("scalar consistency is an N = 0 check")
    qn = QNumbers(p.q)
    qp = qn.qpow
    s2 = p.s * p.s
    t = p.t

    def rr(L):  # [l]/[2l], smooth through l = 0
        return 1.0 / (qp(L) + qp(-L))

    def croot(L):  # sqrt([2l]^2 s^2 + [l]^2 (1-s^2)^2) / [2l]
        return _psqrt(s2 + (rr(L) * t) ** 2)

    def a_plus(L, M):
        return -qp(M - 2) * croot(L + 2) * _psqrt(
            qn(L + M + 2) * qn(L - M + 2) / (qn(2 * L + 2) * qn(2 * L + 6)))

    def a_zero(L, M):
        return t / p.q * (1.0 + qp(2 * M)) * rr(L) * rr(L + 2)

    def b_plus(L, M):
        return qp(M - L - 1) * croot(L + 2) * _psqrt(
            qn(L + M + 2) * qn(L + M + 4) / (qn(2 * L + 2) * qn(2 * L + 6)))

    def b_zero(L, M):
        return -t * (1 - p.q ** 2) * qp(M - 1) * rr(L) * rr(L + 2) \
            * _psqrt(qn(L - M) * qn(L + M + 2))

    def b_minus(L, M):
        if L < 2:
            return 0.0
        return -qp(L + M + 1) * croot(L) * _psqrt(
            qn(L - M) * qn(L - M - 2) / (qn(2 * L - 2) * qn(2 * L + 2)))

    def a_rule(v):
        L, M, S = v
        out = [((L + 2, M, S), a_plus(L, M)), ((L, M, S), a_zero(L, M))]
        if L >= 2:
            out.append(((L - 2, M, S), a_plus(L - 2, M)))
        return out

    def b_rule(v):
        L, M, S = v
        return [((L + 2, M + 2, S), b_plus(L, M)),
                ((L, M + 2, S), b_zero(L, M)),
                ((L - 2, M + 2, S), b_minus(L, M))]

    A_lr = _wrap(p, a_rule)
    B_lr = _wrap(p, b_rule)
    bas = basis(p, cutoff)
    dev = 0.0
    for name, ref in (("A", A_lr), ("B", B_lr)):
        k = generator_kernel(name, p)
        for v in bas.interior(1):
            got = dict(k.apply(v))
            want = dict(ref.apply(v))
            for w in set(got) | set(want):
                dev = max(dev, abs(got.get(w, 0.0) - want.get(w, 0.0)))
    return dev
