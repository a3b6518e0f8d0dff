"""The quantum orthogonal 4-sphere: symmetry-algebra representation data,
scalar/chiral/Fock representations, index pairings, Haar state, deformed
gamma matrices, twisted pairing, zeta functions and the weak real structure.

Scalar labels are (L, J, M1, M2), chiral labels (L, J, M1, M2, C) with
C = +-1 the chirality sector, Fock labels (k1, k2, S) with S = +-1; all
angular components are doubled integers.  The parity sign TE = 2*eps of a
chiral label is recomputed from the label and passed explicitly into every
coefficient evaluation (the coefficient of a branch always receives the
parity of the applied ket).
"""

from __future__ import annotations

import math
from typing import Dict, List

import numpy as np

from .qnum import QNumbers, q_double_factorial, q_number, zeta_closed
from .opalg import (Label, SparseKernel, TruncatedBasis, Word, identity_kernel,
                    interior_trace, k_add, k_commutator, k_compose, k_scale,
                    sup_decay_ratio)

ALG_SCALAR = "s4q-scalar"
ALG_CHIRAL = "s4q-chiral"
ALG_FOCK = "s4q-fock"


def _psqrt(x: float) -> float:
    if x < -1e-12:
        raise ValueError(f"negative radicand {x}")
    return math.sqrt(x) if x > 0 else 0.0


def admissible_scalar(v: Label) -> bool:
    L, J, M1, M2 = v
    return (L >= 0 and L % 2 == 0 and 0 <= J <= L and J % 2 == 0
            and J >= abs(M1) and (J - M1) % 2 == 0
            and L - J - abs(M2) >= 0 and (L - J - abs(M2)) % 4 == 0
            and M2 % 2 == 0)


def admissible_chiral(v: Label) -> bool:
    # m1 and m2 are both half-odd here: J - |M1| and L+1 - J - |M2| must be
    # even and nonnegative, which forces M1, M2 odd
    L, J, M1, M2, C = v
    return (C in (1, -1) and L >= 1 and L % 2 == 1 and 1 <= J <= L and J % 2 == 1
            and J >= abs(M1) and (J - M1) % 2 == 0
            and L + 1 - J - abs(M2) >= 0 and (L + 1 - J - M2) % 2 == 0)


def epsilon2(v: Label) -> int:
    """TE = 2*eps, the sign (-1)^(l + 1/2 - j - m2) of a chiral label."""
    L, J, M1, M2 = v[:4]
    return 1 if ((L + 1 - J - M2) // 2) % 2 == 0 else -1


def _te(L: int, J: int, M2: int) -> int:
    """Parity sign of a coefficient subscript triple.

    Every coefficient receives the parity of its own (l, j, m2) subscripts;
    this is what makes x0 Hermitian and the defining relations close."""
    return 1 if ((L + 1 - J - M2) // 2) % 2 == 0 else -1


def scalar_basis(cutoff: float) -> TruncatedBasis:
    labels = []
    for L in range(0, int(2 * cutoff + 1e-9) + 1, 2):
        for J in range(0, L + 1, 2):
            for M1 in range(-J, J + 1, 2):
                for M2 in range(-(L - J), L - J + 1, 2):
                    if (L - J - abs(M2)) % 4 == 0:
                        labels.append((L, J, M1, M2))
    return TruncatedBasis(ALG_SCALAR, cutoff, tuple(labels), lambda v: v[0] / 2.0)


def chiral_basis(cutoff: float, chirality: int | None = None) -> TruncatedBasis:
    sectors = (1, -1) if chirality is None else (chirality,)
    labels = []
    for L in range(1, int(2 * cutoff + 1e-9) + 1, 2):
        for J in range(1, L + 1, 2):
            for M1 in range(-J, J + 1, 2):
                for M2 in range(-(L + 1 - J), L + 1 - J + 1, 2):
                    for C in sectors:
                        labels.append((L, J, M1, M2, C))
    return TruncatedBasis(ALG_CHIRAL, cutoff, tuple(labels), lambda v: v[0] / 2.0)


def fock_basis(cutoff: int) -> TruncatedBasis:
    labels = [(k1, k2, s) for k1 in range(cutoff + 1)
              for k2 in range(cutoff + 1 - k1) for s in (1, -1)]
    return TruncatedBasis(ALG_FOCK, cutoff, tuple(labels), lambda v: v[0] + v[1])


class _Coeffs:
    """Representation coefficients, doubled-integer arguments throughout."""

    def __init__(self, q: float):
        self.q = q
        self.qn = QNumbers(q)

    # -- scalar (left regular) --------------------------------------------
    def sA(self, J, M1):
        qn, qp = self.qn, self.qn.qpow
        return qp(M1 - 2) * _psqrt(qn(J + M1 + 2) * qn(J - M1 + 2)
                                   / (qn(2 * J + 2) * qn(2 * J + 6)))

    def sBp(self, J, M1):
        qn, qp = self.qn, self.qn.qpow
        return qp(M1 - J - 1) * _psqrt(qn(J + M1 + 2) * qn(J + M1 + 4)
                                       / (qn(2 * J + 2) * qn(2 * J + 6)))

    def sBm(self, J, M1):
        qn, qp = self.qn, self.qn.qpow
        return -qp(J + M1 + 1) * _psqrt(qn(J - M1) * qn(J - M1 - 2)
                                        / (qn(2 * J - 2) * qn(2 * J + 2)))

    def sCp(self, L, J, M2):
        qn, qp = self.qn, self.qn.qpow
        return qp(M2 - 2) * _psqrt(qn(L + J + M2 + 6) * qn(L + J - M2 + 6)
                                   / (qn(2 * L + 6) * qn(2 * L + 10)))

    def sCm(self, L, J, M2):
        qn, qp = self.qn, self.qn.qpow
        return -qp(M2 - 2) * _psqrt(qn(L - J + M2) * qn(L - J - M2)
                                    / (qn(2 * L + 2) * qn(2 * L + 6)))

    def sDp(self, L, J, M2):
        qn, qp = self.qn, self.qn.qpow
        return qp(M2 - L - 3) * _psqrt(qn(L + J + M2 + 6) * qn(L - J + M2 + 4)
                                       / (qn(2 * L + 6) * qn(2 * L + 10)))

    def sDm(self, L, J, M2):
        qn, qp = self.qn, self.qn.qpow
        return qp(L + M2 + 3) * _psqrt(qn(L - J - M2) * qn(L + J - M2 + 2)
                                       / (qn(2 * L + 2) * qn(2 * L + 6)))

    # -- chiral -------------------------------------------------------------
    def Ap(self, J, M1):
        qn, qp = self.qn, self.qn.qpow
        return qp(M1 - 2) * _psqrt(qn(J + M1 + 2) * qn(J - M1 + 2)) / qn(2 * J + 4)

    def A0(self, J, M1):
        qn, qp = self.qn, self.qn.qpow
        return (qp(J + M1 + 2) * qn(4) * qn(J - M1) - qn(2 * J)) \
            / (self.q ** 2 * qn(2 * J) * qn(2 * J + 4))

    def Bp(self, J, M1):
        qn, qp = self.qn, self.qn.qpow
        return qp(M1 - J - 1) * _psqrt(qn(J + M1 + 2) * qn(J + M1 + 4)) / qn(2 * J + 4)

    def B0(self, J, M1):
        qn, qp = self.qn, self.qn.qpow
        return (1 + self.q ** 2) * qp(M1 - 1) \
            * _psqrt(qn(J - M1) * qn(J + M1 + 2)) / (qn(2 * J) * qn(2 * J + 4))

    def Bm(self, J, M1):
        qn, qp = self.qn, self.qn.qpow
        return -qp(J + M1 + 1) * _psqrt(qn(J - M1) * qn(J - M1 - 2)) / qn(2 * J)

    def Cp(self, L, J, M2, TE):
        qn, qp = self.qn, self.qn.qpow
        return -qp(M2 - 2 - TE) * _psqrt(qn(L + J + M2 + 6 + TE)
                                         * qn(L + J - M2 + 6 - TE)) / qn(2 * L + 8)

    def C0(self, L, J, M2, TE):
        qn, qp = self.qn, self.qn.qpow
        return qn(4 * TE) * qp(TE * L + M2 - 2 + 3 * TE) \
            * _psqrt(qn(L + 1 + J - TE * M2 + 4) * qn(L + 1 - J - TE * M2)) \
            / (qn(2 * L + 4) * qn(2 * L + 8))

    def Cm(self, L, J, M2, TE):
        qn, qp = self.qn, self.qn.qpow
        return -qp(M2 - 2 + TE) * _psqrt(qn(L - J + M2 - TE)
                                         * qn(L - J - M2 + TE)) / qn(2 * L + 4)

    def Hp(self, L, J, M2, TE):
        qn, qp = self.qn, self.qn.qpow
        return qp(M2 - 2 + TE * (J + 1)) * _psqrt(qn(L + TE * J - M2 + 4 + TE)
                                                  * qn(L - TE * J + M2 + 4 - TE)) / qn(2 * L + 8)

    def H0(self, L, J, M2, TE):
        qn = self.qn
        tj = TE * (J + 1)
        num = qn(L - tj - M2 + 2) * qn(L - tj + M2 + 4) \
            - self.q ** -2 * qn(L + tj - M2 + 4) * qn(L + tj + M2 + 2)
        return num / (qn(2 * L + 4) * qn(2 * L + 8))

    def Dp(self, L, J, M2, TE):
        qn, qp = self.qn, self.qn.qpow
        return qp(M2 - L - 3) * _psqrt(qn(L + J + M2 + 6 + TE)
                                       * qn(L - J + M2 + 4 - TE)) / qn(2 * L + 8)

    def D0(self, L, J, M2, TE):
        qn, qp = self.qn, self.qn.qpow
        return qn(4) * qp(M2 + 1) * _psqrt(qn(L - TE * J - M2 + 2 - TE)
                                           * qn(L - TE * J + M2 + 4 - TE)) \
            / (qn(2 * L + 4) * qn(2 * L + 8))

    def Dm(self, L, J, M2, TE):
        qn, qp = self.qn, self.qn.qpow
        return -qp(L + M2 + 3) * _psqrt(qn(L - J - M2 + TE)
                                        * qn(L + J - M2 + 2 - TE)) / qn(2 * L + 4)

    # -- symmetry algebra ----------------------------------------------------
    def a_coeff(self, L, J, M2, TE):
        qn = self.qn
        ae = abs(TE)  # 2|eps|
        return _psqrt(qn(L - J - M2 + TE) * qn(L + J + M2 + 6 + TE)
                      / (qn(2 * (J + ae) + 2) * qn(2 * (J - ae) + 6))) / qn(4)

    def b_coeff(self, L, J, M2, TE):
        qn = self.qn
        if TE == 0:
            return 0.0
        tj = TE * (J + 1)
        return _psqrt(qn(L - tj - M2 + 2) * qn(L - tj + M2 + 4)) \
            / (qn(2 * J) * qn(2 * J + 4))

    def c_coeff(self, L, J, M2, TE):
        qn = self.qn
        ae = abs(TE)
        sign = 1.0 if TE == 0 else -1.0
        return sign * _psqrt(qn(L - J + M2 + 4 - TE) * qn(L + J - M2 + 2 - TE)
                             / (qn(2 * (J + ae) - 2) * qn(2 * (J - ae) + 2))) / qn(4)


def _branch_kernel(algebra: str, adm, branches, radius=1.0) -> SparseKernel:
    """Kernel from additive branches: (shift tuple, coefficient fn(source))."""

    def rule(v):
        if not adm(v):
            return []
        out = []
        for shift, fn in branches:
            w = tuple(a + b for a, b in zip(v, shift))
            if adm(w):
                c = fn(v)
                if c != 0:
                    out.append((w, c))
        return out

    return SparseKernel(algebra, rule, radius)


def _adjoint_branches(branches):
    out = []
    for shift, fn in branches:
        neg = tuple(-x for x in shift)

        def afn(v, _fn=fn, _neg=neg):
            w = tuple(a + b for a, b in zip(v, _neg))
            return complex(_fn(w)).conjugate()

        out.append((neg, afn))
    return out


def _scalar_branches(c: _Coeffs, name: str):
    if name == "x0":
        return [((2, 2, 0, 0), lambda v: c.sA(v[1], v[2]) * c.sCp(v[0], v[1], v[3])),
                ((-2, 2, 0, 0), lambda v: c.sA(v[1], v[2]) * c.sCm(v[0], v[1], v[3])),
                ((2, -2, 0, 0), lambda v: c.sA(v[1] - 2, v[2]) * c.sCm(v[0] + 2, v[1] - 2, v[3])),
                ((-2, -2, 0, 0), lambda v: c.sA(v[1] - 2, v[2]) * c.sCp(v[0] - 2, v[1] - 2, v[3]))]
    if name == "x1":
        return [((2, 2, 2, 0), lambda v: c.sBp(v[1], v[2]) * c.sCp(v[0], v[1], v[3])),
                ((-2, 2, 2, 0), lambda v: c.sBp(v[1], v[2]) * c.sCm(v[0], v[1], v[3])),
                ((2, -2, 2, 0), lambda v: c.sBm(v[1], v[2]) * c.sCm(v[0] + 2, v[1] - 2, v[3])),
                ((-2, -2, 2, 0), lambda v: c.sBm(v[1], v[2]) * c.sCp(v[0] - 2, v[1] - 2, v[3]))]
    if name == "x2":
        return [((2, 0, 0, 2), lambda v: c.sDp(v[0], v[1], v[3])),
                ((-2, 0, 0, 2), lambda v: c.sDm(v[0], v[1], v[3]))]
    raise ValueError(name)


def _chiral_branches(c: _Coeffs, name: str):
    # each coefficient gets the parity sign of its own subscript triple
    def Cp(L, J, M2):
        return c.Cp(L, J, M2, _te(L, J, M2))

    def C0(L, J, M2):
        return c.C0(L, J, M2, _te(L, J, M2))

    def Cm(L, J, M2):
        return c.Cm(L, J, M2, _te(L, J, M2))

    def Hp(L, J, M2):
        return c.Hp(L, J, M2, _te(L, J, M2))

    def H0(L, J, M2):
        return c.H0(L, J, M2, _te(L, J, M2))

    if name == "x0":
        return [((2, 2, 0, 0, 0), lambda v: c.Ap(v[1], v[2]) * Cp(v[0], v[1], v[3])),
                ((0, 2, 0, 0, 0), lambda v: -v[4] * c.Ap(v[1], v[2]) * C0(v[0], v[1], v[3])),
                ((-2, 2, 0, 0, 0), lambda v: c.Ap(v[1], v[2]) * Cm(v[0], v[1], v[3])),
                ((2, 0, 0, 0, 0), lambda v: c.A0(v[1], v[2]) * Hp(v[0], v[1], v[3])),
                ((0, 0, 0, 0, 0), lambda v: v[4] * c.A0(v[1], v[2]) * H0(v[0], v[1], v[3])),
                ((-2, 0, 0, 0, 0), lambda v: c.A0(v[1], v[2]) * Hp(v[0] - 2, v[1], v[3])),
                ((2, -2, 0, 0, 0), lambda v: c.Ap(v[1] - 2, v[2]) * Cm(v[0] + 2, v[1] - 2, v[3])),
                ((0, -2, 0, 0, 0), lambda v: -v[4] * c.Ap(v[1] - 2, v[2]) * C0(v[0], v[1] - 2, v[3])),
                ((-2, -2, 0, 0, 0), lambda v: c.Ap(v[1] - 2, v[2]) * Cp(v[0] - 2, v[1] - 2, v[3]))]
    if name == "x1":
        return [((2, 2, 2, 0, 0), lambda v: c.Bp(v[1], v[2]) * Cp(v[0], v[1], v[3])),
                ((0, 2, 2, 0, 0), lambda v: -v[4] * c.Bp(v[1], v[2]) * C0(v[0], v[1], v[3])),
                ((-2, 2, 2, 0, 0), lambda v: c.Bp(v[1], v[2]) * Cm(v[0], v[1], v[3])),
                ((2, 0, 2, 0, 0), lambda v: c.B0(v[1], v[2]) * Hp(v[0], v[1], v[3])),
                ((0, 0, 2, 0, 0), lambda v: v[4] * c.B0(v[1], v[2]) * H0(v[0], v[1], v[3])),
                ((-2, 0, 2, 0, 0), lambda v: c.B0(v[1], v[2]) * Hp(v[0] - 2, v[1], v[3])),
                ((2, -2, 2, 0, 0), lambda v: c.Bm(v[1], v[2]) * Cm(v[0] + 2, v[1] - 2, v[3])),
                ((0, -2, 2, 0, 0), lambda v: -v[4] * c.Bm(v[1], v[2]) * C0(v[0], v[1] - 2, v[3])),
                ((-2, -2, 2, 0, 0), lambda v: c.Bm(v[1], v[2]) * Cp(v[0] - 2, v[1] - 2, v[3]))]
    if name == "x2":
        return [((2, 0, 0, 2, 0), lambda v: c.Dp(v[0], v[1], v[3], _te(v[0], v[1], v[3]))),
                ((0, 0, 0, 2, 0), lambda v: v[4] * c.D0(v[0], v[1], v[3], _te(v[0], v[1], v[3]))),
                ((-2, 0, 0, 2, 0), lambda v: c.Dm(v[0], v[1], v[3], _te(v[0], v[1], v[3])))]
    raise ValueError(name)


def scalar_kernel(name: str, q: float) -> SparseKernel:
    """Left regular representation kernel of x0, x1, x2 or a star."""
    c = _Coeffs(q)
    base = name.rstrip("*")
    br = _scalar_branches(c, base)
    if name.endswith("*") and base != "x0":
        br = _adjoint_branches(br)
    elif name.endswith("*"):
        pass  # x0 is self-adjoint; keep the direct branches
    return _branch_kernel(ALG_SCALAR, admissible_scalar, br)


def chiral_kernel(name: str, q: float) -> SparseKernel:
    """Chiral spinor representation kernel on the doubled space."""
    c = _Coeffs(q)
    base = name.rstrip("*")
    br = _chiral_branches(c, base)
    if name.endswith("*") and base != "x0":
        br = _adjoint_branches(br)
    return _branch_kernel(ALG_CHIRAL, admissible_chiral, br)


def fock_kernel(name: str, q: float) -> SparseKernel:
    def adm(v):
        return v[0] >= 0 and v[1] >= 0 and v[2] in (1, -1)

    if name in ("x0", "x0*"):
        br = [((0, 0, 0), lambda v: v[2] * q ** (2 * (v[0] + v[1])))]
    elif name == "x1":
        br = [((1, 0, 0), lambda v: q ** (2 * v[1]) * _psqrt(1 - q ** (4 * (v[0] + 1))))]
    elif name == "x2":
        br = [((0, 1, 0), lambda v: _psqrt(1 - q ** (4 * (v[1] + 1))))]
    elif name == "x1*":
        br = _adjoint_branches([((1, 0, 0), lambda v: q ** (2 * v[1]) * _psqrt(1 - q ** (4 * (v[0] + 1))))])
    elif name == "x2*":
        br = _adjoint_branches([((0, 1, 0), lambda v: _psqrt(1 - q ** (4 * (v[1] + 1))))])
    else:
        raise ValueError(name)
    return _branch_kernel(ALG_FOCK, adm, br)


def so5_kernel(name: str, q: float, space: str = "scalar") -> SparseKernel:
    """Symmetry generators K1, K2, E1, E2, F1, F2 on the scalar or chiral space."""
    c = _Coeffs(q)
    qn, qp = c.qn, c.qn.qpow
    chiral = space == "chiral"
    adm = admissible_chiral if chiral else admissible_scalar
    alg = ALG_CHIRAL if chiral else ALG_SCALAR
    pad = (0,) if chiral else ()
    if name == "K1":
        return SparseKernel(alg, lambda v: [(v, qp(v[2]))] if adm(v) else [], 0.0)
    if name == "K2":
        return SparseKernel(alg, lambda v: [(v, qp(v[3] - v[2]))] if adm(v) else [], 0.0)
    if name == "E1":
        br = [((0, 0, 2, 0) + pad,
               lambda v: _psqrt(qn(v[1] - v[2]) * qn(v[1] + v[2] + 2)))]
        return _branch_kernel(alg, adm, br, radius=0.0)
    if name == "F1":
        br = _adjoint_branches([((0, 0, 2, 0) + pad,
                                 lambda v: _psqrt(qn(v[1] - v[2]) * qn(v[1] + v[2] + 2)))])
        return _branch_kernel(alg, adm, br, radius=0.0)
    if name == "E2":
        return _branch_kernel(alg, adm, _so5_e2_branches(c, chiral), radius=0.0)
    if name == "F2":
        return _branch_kernel(alg, adm,
                              _adjoint_branches(_so5_e2_branches(c, chiral)),
                              radius=0.0)
    raise ValueError(name)


def _so5_e2_branches(c: _Coeffs, chiral: bool):
    qn = c.qn
    te = epsilon2 if chiral else (lambda v: 0)
    pad = (0,) if chiral else ()
    return [((0, 2, -2, 2) + pad,
             lambda v: _psqrt(qn(v[1] - v[2] + 2) * qn(v[1] - v[2] + 4))
             * c.a_coeff(v[0], v[1], v[3], te(v))),
            ((0, 0, -2, 2) + pad,
             lambda v: _psqrt(qn(v[1] + v[2]) * qn(v[1] - v[2] + 2))
             * c.b_coeff(v[0], v[1], v[3], te(v))),
            ((0, -2, -2, 2) + pad,
             lambda v: _psqrt(qn(v[1] + v[2]) * qn(v[1] + v[2] - 2))
             * c.c_coeff(v[0], v[1], v[3], te(v)))]


def generators(q: float, space: str) -> Dict[str, SparseKernel]:
    maker = {"scalar": scalar_kernel, "chiral": chiral_kernel,
             "fock": fock_kernel}[space]
    gens = {n: maker(n, q) for n in ("x0", "x0*", "x1", "x1*", "x2", "x2*")}
    if space in ("scalar", "chiral"):
        for n in ("K1", "K2", "E1", "E2", "F1", "F2"):
            gens[n] = so5_kernel(n, q, space)
    return gens


def seven_relations(q: float) -> List[Word]:
    """The seven defining polynomials of the sphere algebra."""
    x0, x1, x2 = Word.gen("x0"), Word.gen("x1"), Word.gen("x2")
    x1s, x2s = Word.gen("x1*"), Word.gen("x2*")
    one = Word.one()
    q2 = q * q
    return [x0 * x2 - q2 * (x2 * x0),
            x1 * x2 - q2 * (x2 * x1),
            x2s * x1 - q2 * (x1 * x2s),
            x0 * x1 - q2 * (x1 * x0),
            x1 * x1s - x1s * x1 + (1 - q ** 4) * (x0 * x0),
            x2 * x2s - x2s * x2 + x1s * x1 - q ** 4 * (x1 * x1s),
            x0 * x0 + x1 * x1s + x2 * x2s - one]


def crossed_relations(q: float) -> List[Word]:
    """Sample crossed-product relations between symmetry and sphere generators."""
    K1, K2 = Word.gen("K1"), Word.gen("K2")
    E1, E2, F1, F2 = (Word.gen(n) for n in ("E1", "E2", "F1", "F2"))
    x0, x1, x2 = Word.gen("x0"), Word.gen("x1"), Word.gen("x2")
    return [K1 * x0 - x0 * K1,
            K1 * x1 - q * (x1 * K1),
            K1 * x2 - x2 * K1,
            K2 * x1 - (1 / q) * (x1 * K2),
            K2 * x2 - q * (x2 * K2),
            E1 * x0 - x0 * E1 - q ** -0.5 * (x1 * K1),
            E1 * x1 - (1 / q) * (x1 * E1),
            E1 * x2 - x2 * E1,
            E2 * x0 - x0 * E2,
            E2 * x1 - q * (x1 * E2) - x2 * K2,
            E2 * x2 - (1 / q) * (x2 * E2),
            F2 * x2 - (1 / q) * (x2 * F2) - x1 * K2,
            F1 * x1 - (1 / q) * (x1 * F1) - q ** 0.5 * q_number(2, q) * (x0 * K1)]


# ---------------------------------------------------------------------------
# gamma matrices and the idempotent

def gamma_matrices(q: float) -> Dict[int, np.ndarray]:
    g0 = np.diag([1.0, -q ** 2, -q ** 2, q ** 4]).astype(complex)
    g1 = np.zeros((4, 4), complex)
    g1[0, 2] = -q
    g1[1, 3] = q ** 3
    gm1 = np.zeros((4, 4), complex)
    gm1[2, 0] = -1.0 / q
    gm1[3, 1] = q
    g2 = np.zeros((4, 4), complex)
    g2[0, 1] = q ** 3
    g2[2, 3] = q ** 3
    gm2 = np.zeros((4, 4), complex)
    gm2[1, 0] = q ** -3
    gm2[3, 2] = q ** -3
    return {0: g0, 1: g1, -1: gm1, 2: g2, -2: gm2}


def eta_twist(q: float) -> np.ndarray:
    return np.diag([q ** 4, q ** -2, q ** 2, q ** -4]).astype(complex)


def gamma_trace(i: int, j: int, k: int, q: float) -> complex:
    """Tr(eta gamma_i gamma_j gamma_k); vanishes for all 125 triples."""
    g = gamma_matrices(q)
    return complex(np.trace(eta_twist(q) @ g[i] @ g[j] @ g[k]))


def plain_gamma_trace(i: int, j: int, k: int, q: float) -> complex:
    g = gamma_matrices(q)
    return complex(np.trace(g[i] @ g[j] @ g[k]))


_GAMMA_GEN = {0: "x0", 1: "x1", -1: "x1*", 2: "x2", -2: "x2*"}


def idempotent_e(q: float, space: str = "chiral"):
    """The 4x4 idempotent (1/2)(1 + sum_i gamma_i x_i) as kernels."""
    gens = generators(q, space)
    g = gamma_matrices(q)
    alg = gens["x0"].algebra
    mat = []
    for a in range(4):
        row = []
        for b in range(4):
            pieces = []
            if a == b:
                pieces.append(k_scale(0.5, identity_kernel(alg)))
            for i, name in _GAMMA_GEN.items():
                coef = g[i][a, b]
                if coef != 0:
                    pieces.append(k_scale(0.5 * coef, gens[name]))
            row.append(k_add(*pieces) if pieces else k_scale(0.0, identity_kernel(alg)))
        mat.append(row)
    return mat


def idempotent_e_explicit(q: float, space: str = "chiral"):
    """The printed 4x4 idempotent entries, for the reconstruction check."""
    gens = generators(q, space)
    alg = gens["x0"].algebra
    one = identity_kernel(alg)

    def ent(*pieces):
        return k_scale(0.5, k_add(*pieces))

    x0, x1, x2 = gens["x0"], gens["x1"], gens["x2"]
    x1s, x2s = gens["x1*"], gens["x2*"]
    zero = k_scale(0.0, one)
    return [
        [ent(one, x0), ent(k_scale(q ** 3, x2)), ent(k_scale(-q, x1)), zero],
        [ent(k_scale(q ** -3, x2s)), ent(one, k_scale(-q * q, x0)), zero, ent(k_scale(q ** 3, x1))],
        [ent(k_scale(-1 / q, x1s)), zero, ent(one, k_scale(-q * q, x0)), ent(k_scale(q ** 3, x2))],
        [zero, ent(k_scale(q, x1s)), ent(k_scale(q ** -3, x2s)), ent(one, k_scale(q ** 4, x0))],
    ]


# ---------------------------------------------------------------------------
# grading, F, D and the direct F-commutators on the chiral space

def grading4() -> SparseKernel:
    return SparseKernel(ALG_CHIRAL, lambda v: [(v, float(v[4]))], 0.0)


def sign_F4() -> SparseKernel:
    return SparseKernel(ALG_CHIRAL, lambda v: [(v[:4] + (-v[4],), 1.0)], 0.0)


def dirac4() -> SparseKernel:
    return SparseKernel(ALG_CHIRAL,
                        lambda v: [(v[:4] + (-v[4],), v[0] / 2.0 + 1.5)], 0.0)


def f_commutator_kernel(name: str, q: float) -> SparseKernel:
    """[F, x] on the chiral doubled space: only the middle, l-preserving
    terms survive, with weights (+-2) times the chirality-odd coefficients."""
    c = _Coeffs(q)

    if name == "x0":
        def rule(v):
            if not admissible_chiral(v):
                return []
            L, J, M1, M2, C = v
            out = []
            for dj, fn in ((2, lambda: -2 * C * c.Ap(J, M1) * c.C0(L, J, M2, _te(L, J, M2))),
                           (0, lambda: 2 * C * c.A0(J, M1) * c.H0(L, J, M2, _te(L, J, M2))),
                           (-2, lambda: -2 * C * c.Ap(J - 2, M1)
                            * c.C0(L, J - 2, M2, _te(L, J - 2, M2)))):
                w = (L, J + dj, M1, M2, -C)
                if admissible_chiral(w):
                    val = fn()
                    if val != 0:
                        out.append((w, val))
            return out
    elif name == "x1":
        def rule(v):
            if not admissible_chiral(v):
                return []
            L, J, M1, M2, C = v
            out = []
            for dj, fn in ((2, lambda: -2 * C * c.Bp(J, M1) * c.C0(L, J, M2, _te(L, J, M2))),
                           (0, lambda: 2 * C * c.B0(J, M1) * c.H0(L, J, M2, _te(L, J, M2))),
                           (-2, lambda: -2 * C * c.Bm(J, M1)
                            * c.C0(L, J - 2, M2, _te(L, J - 2, M2)))):
                w = (L, J + dj, M1 + 2, M2, -C)
                if admissible_chiral(w):
                    val = fn()
                    if val != 0:
                        out.append((w, val))
            return out
    elif name == "x2":
        def rule(v):
            L, J, M1, M2, C = v
            if not admissible_chiral(v):
                return []
            w = (L, J, M1, M2 + 2, -C)
            if not admissible_chiral(w):
                return []
            val = 2 * C * c.D0(L, J, M2, _te(L, J, M2))
            return [(w, val)] if val != 0 else []
    elif name in ("x1*", "x2*"):
        inner = f_commutator_kernel(name[:-1], q)

        def rule(v, _k=inner):
            if not admissible_chiral(v):
                return []
            # [F, a*] = -[F, a]^dagger
            out = []
            for w in _candidates(v, name):
                for u, cc in _k.rule(w):
                    if u == v:
                        out.append((w, -complex(cc).conjugate()))
            return out
    else:
        raise ValueError(name)
    return SparseKernel(ALG_CHIRAL, rule, 0.0)


def _candidates(v: Label, name: str):
    L, J, M1, M2, C = v
    if name == "x1*":
        return [(L, J + dj, M1 - 2, M2, -C) for dj in (-2, 0, 2)]
    return [(L, J, M1, M2 - 2, -C)]


# ---------------------------------------------------------------------------
# index pairings

def fock_index(q: float, cutoff: int, threads: int = 1) -> float:
    """(1/4)(1-q^2)^2 Tr(gamma F [F, x0]) on the truncated Fock space -> 1."""
    b = fock_basis(cutoff)
    x0 = fock_kernel("x0", q)
    F = SparseKernel(ALG_FOCK, lambda v: [((v[0], v[1], -v[2]), 1.0)], 0.0)
    g = SparseKernel(ALG_FOCK, lambda v: [(v, float(v[2]))], 0.0)
    k = k_compose(g, k_compose(F, k_commutator(F, x0)))
    val = interior_trace(k, b, margin=0, threads=threads)
    return 0.25 * (1 - q * q) ** 2 * complex(val).real


def _fe_matrix(q: float):
    """[F, e] as a 4x4 matrix of kernels built from the direct commutators."""
    g = gamma_matrices(q)
    fx = {i: f_commutator_kernel(n, q) for i, n in _GAMMA_GEN.items()}
    zero = k_scale(0.0, identity_kernel(ALG_CHIRAL))
    mat = []
    for a in range(4):
        row = []
        for b in range(4):
            pieces = [k_scale(0.5 * g[i][a, b], fx[i])
                      for i in fx if g[i][a, b] != 0]
            row.append(k_add(*pieces) if pieces else zero)
        mat.append(row)
    return mat


def chiral_index(q: float, cutoff: float, threads: int = 1) -> float:
    """(1/2) Tr(gamma F [F, e]) on the chiral doubled space -> 1."""
    b = chiral_basis(cutoff)
    fe = _fe_matrix(q)
    gF = k_compose(grading4(), sign_F4())
    total = 0.0
    for a in range(4):
        total += complex(interior_trace(k_compose(gF, fe[a][a]), b, margin=0,
                                        threads=threads)).real
    return 0.5 * total


def chiral_index_series(q: float, lmax: float) -> float:
    """Independent series for the chiral index; generic term f_lj."""
    total = 0.0
    r = (1 + q * q) / (1 - q * q)
    L = 1
    while L <= 2 * lmax + 1e-9:
        l = L / 2.0
        for J in range(1, L + 1, 2):
            j = J / 2.0
            num1 = (2 * j + 1) * (1 + q ** (4 * j + 2)) - r * (1 - q ** (4 * j + 2))
            den = ((1 - q ** (4 * l + 4)) * (1 - q ** (4 * l + 8))
                   * (1 - q ** (4 * j)) * (1 - q ** (4 * j + 4)))
            num2 = ((l - j + 1) * (1 + q ** (4 * l + 6)) * (1 + q ** (4 * j + 2))
                    - r * q ** 2 * (q ** (4 * j) - q ** (4 * l + 4)))
            total += (1 - q * q) ** 4 * num1 / den * q ** (2 * l - 1) * num2
        L += 2
    return total


def twisted_pairing4(q: float, cutoff: float, threads: int = 1) -> float:
    """Tr(eta K1^-8 K2^-6 gamma F [F,e]^5) -> 2.

    The commutator matrix conserves l and the two total charges
    T1 = m1 + c(a), T2 = m2 + d(a); the trace is assembled per charge block
    with dense matrix powers, blocks combined in deterministic order.
    """
    fe = _fe_matrix(q)
    eta = np.real(np.diag(eta_twist(q)))
    cchg = (0, 0, 1, 1)
    dchg = (0, 1, 0, 1)
    total = 0.0
    L = 1
    while L <= 2 * cutoff + 1e-9:
        total += _twisted_block_level(q, L, fe, eta, cchg, dchg)
        L += 2
    return total


def _twisted_block_level(q, L, fe, eta, cchg, dchg) -> float:
    # enumerate the level-l slice of the doubled space tensored with C^4
    slots = []
    for J in range(1, L + 1, 2):
        for M1 in range(-J, J + 1, 2):
            for M2 in range(-(L + 1 - J), L + 1 - J + 1, 2):
                for C in (1, -1):
                    for a in range(4):
                        slots.append((J, M1, M2, C, a))
    blocks: Dict[tuple, list] = {}
    for s in slots:
        J, M1, M2, C, a = s
        key = (M1 + 2 * cchg[a], M2 + 2 * dchg[a])
        blocks.setdefault(key, []).append(s)
    total = 0.0
    for key in sorted(blocks):
        members = sorted(blocks[key])
        index = {s: i for i, s in enumerate(members)}
        n = len(members)
        M = np.zeros((n, n))
        for s in members:
            J, M1, M2, C, a = s
            v = (L, J, M1, M2, C)
            jcol = index[s]
            for b in range(4):
                for w, c in fe[b][a].rule(v):
                    t = (w[1], w[2], w[3], w[4], b)
                    i = index.get(t)
                    if i is not None and c != 0:
                        M[i, jcol] += c.real if isinstance(c, complex) else c
        M2p = M @ M
        M5 = M2p @ M2p @ M
        for s in members:
            J, M1, M2, C, a = s
            flipped = index.get((J, M1, M2, -C, a))
            if flipped is None:
                continue
            w = eta[a] * q ** (-(M1 + 3 * M2)) * C
            total += w * M5[flipped, index[s]]
    return total


def trace_class_certificate(q: float, cutoff: float) -> float:
    """sup |coef| / q^(4j/3) of K1^-8 K2^-6 [F,x0][F,x1][F,x2]."""
    k = k_compose(f_commutator_kernel("x0", q),
                  k_compose(f_commutator_kernel("x1", q),
                            f_commutator_kernel("x2", q)))
    weight = SparseKernel(ALG_CHIRAL,
                          lambda v: [(v, q ** (-(v[2] + 3 * v[3])))], 0.0)
    k = k_compose(weight, k)
    b = chiral_basis(cutoff)
    return sup_decay_ratio(k, b, lambda v: q ** (2 * v[1] / 3.0))


# ---------------------------------------------------------------------------
# Haar state

def haar_formula(j: int, k: int, q: float) -> float:
    """Haar value of x0^(2j) x1^k (x1*)^k.

    The q-exponent is 2jk - 4j - k, the assembled value of the twisted-
    cyclicity recursion; it matches the GNS evaluation and has the same
    classical limit as the double-factorial form.
    """
    if j < 0 or k < 0:
        raise ValueError("j, k must be nonnegative integers")
    num = q_number(3, q) * q_double_factorial(2 * j - 1, q) * q_double_factorial(2 * k, q)
    return q ** (2 * j * k - 4 * j - k) * num / q_double_factorial(2 * (j + k) + 3, q)


def haar_monomial(n0: int, n1: int, n2: int, n3: int, q: float) -> float:
    """Haar value of x0^n0 x1^n1 (x1*)^n2 x2^n3 (negative n3 meaning stars)."""
    if n0 % 2 == 1 or n1 != n2 or n3 != 0:
        return 0.0
    return haar_formula(n0 // 2, n1, q)


def haar_classical(j: int, k: int) -> float:
    """q -> 1 limit: 3 (2k)!! (2j-1)!! / (2j+2k+3)!!."""
    def dfac(n):
        out = 1
        while n > 1:
            out *= n
            n -= 2
        return out
    return 3.0 * dfac(2 * k) * dfac(2 * j - 1) / dfac(2 * j + 2 * k + 3)


def haar_gns(n0: int, n1: int, n2: int, n3: int, q: float) -> float:
    """<0| x0^n0 x1^n1 (x1*)^n2 x2^n3 |0> through the left regular kernels."""
    gens = generators(q, "scalar")
    letters = (["x0"] * n0 + ["x1"] * n1 + ["x1*"] * n2
               + (["x2"] * n3 if n3 >= 0 else ["x2*"] * (-n3)))
    word = Word.monomial(letters)
    from .opalg import evaluate_word
    vac = (0, 0, 0, 0)
    out = dict(evaluate_word(word, gens, vac))
    return complex(out.get(vac, 0.0)).real


# ---------------------------------------------------------------------------
# zeta functions

def dim_chiral(l: float) -> float:
    return (2.0 / 3.0) * (l + 0.5) * (l + 1.5) * (l + 2.5)


def dim_scalar(l: int) -> float:
    return (l + 1) * (l + 2) * (2 * l + 3) / 6.0


def count_level(space: str, l: float) -> int:
    """Enumeration oracle for the level dimension."""
    if space == "scalar":
        b = scalar_basis(l)
        return sum(1 for v in b.labels if v[0] == 2 * l)
    b = chiral_basis(l, chirality=1)
    return sum(1 for v in b.labels if v[0] == int(2 * l))


def zeta4(s: float, cutoff: float) -> float:
    """Partial Tr(|D|^-s) over the chiral doubled space."""
    if s <= 4:
        raise ValueError("the full trace needs s > 4")
    total = 0.0
    L = 1
    while L <= 2 * cutoff + 1e-9:
        l = L / 2.0
        total += 2.0 * (l + 1.5) ** -s * dim_chiral(l)
        L += 2
    return total


def zeta4_closed(s: float) -> float:
    return (4.0 / 3.0) * (zeta_closed(s - 3.0) - zeta_closed(s - 1.0))


def x2x2star_level_sum(q: float, L: int) -> float:
    """Exact sum of <v| x2 x2* |v> over the level-l slice (both sectors).

    The diagonal element is m1-independent, so the m1 degeneracy enters as
    the factor (2j+1)."""
    c = _Coeffs(q)
    total = 0.0
    for J in range(1, L + 1, 2):
        for M2 in range(-(L + 1 - J), L + 1 - J + 1, 2):
            v = (L, J, J, M2, 1)
            te = epsilon2(v)
            acc = 0.0
            # sources w with x2(w) = v: w = (L -+ 2, J, *, M2 - 2)
            for dl, fn in ((-2, c.Dp), (0, c.D0), (2, c.Dm)):
                w = (L + dl, J, J, M2 - 2, 1)
                if admissible_chiral(w):
                    val = fn(L + dl, J, M2 - 2, epsilon2(w))
                    acc += val * val
            total += 2 * (J + 1) * acc  # (2j+1) values of m1, two sectors
    return total


def x2x2star_residues(q: float, l0: int = 30, span: int = 8):
    """Finite-difference extraction of the two leading pole coefficients of
    zeta_{x2 x2*}: returns (c3, c2) with expected values
    c3 = 4/3 and c2 = -4/(1-q^4)."""
    Ls = [2 * (l0 + i) + 1 for i in range(span)]
    C = [x2x2star_level_sum(q, L) for L in Ls]
    n = [L / 2.0 + 1.5 for L in Ls]
    d3 = [C[i + 3] - 3 * C[i + 2] + 3 * C[i + 1] - C[i] for i in range(span - 3)]
    c3 = d3[-1] / 6.0
    rem = [C[i] - c3 * n[i] ** 3 for i in range(span)]
    d2 = [rem[i + 2] - 2 * rem[i + 1] + rem[i] for i in range(span - 2)]
    c2 = d2[-1] / 2.0
    return c3, c2


# ---------------------------------------------------------------------------
# real structure

def real_structure_J4() -> SparseKernel:
    """Antilinear J |l,m1,m2;j>_+- = i^(2l+1) (-1)^(j+m1) |l,-m1,-m2;j>_+-.

    On the chiral space 2l+1 is even, so the phase i^(2l+1) is the real sign
    (-1)^((2l+1)/2 rounded); it cancels in every conjugation J b J since it
    enters twice, and J^2 = -1 on each sector."""

    def rule(v):
        L, J, M1, M2, C = v
        phase = (1j) ** (L + 1) * (-1.0) ** ((J + M1) // 2)
        return [((L, J, -M1, -M2, C), phase)]

    return SparseKernel(ALG_CHIRAL, rule, 0.0, conjugates=True)


def weak_real_decay4(a: str, b: str, q: float, cutoff: float):
    """Decay ratios of [a, JbJ] and [[D,a], JbJ] against q^(2j)."""
    gens = generators(q, "chiral")
    J = real_structure_J4()
    jbj = k_compose(k_compose(J, gens[b]), J)
    c1 = k_commutator(gens[a], jbj)
    c2 = k_commutator(k_commutator(dirac4(), gens[a]), jbj)
    bas = chiral_basis(cutoff)
    rate = lambda v: q ** v[1]
    return sup_decay_ratio(c1, bas, rate), sup_decay_ratio(c2, bas, rate)


def commutator_x2_Jx2J_element(l: float, q: float) -> float:
    """<l+1, m1, l; 1/2 | [x2, J x2 J] | l, m1, l; 1/2> on the + sector."""
    gens = generators(q, "chiral")
    J = real_structure_J4()
    jbj = k_compose(k_compose(J, gens["x2"]), J)
    com = k_commutator(gens["x2"], jbj)
    L = int(2 * l)
    v = (L, 1, 1, L, 1)
    target = (L + 2, 1, 1, L, 1)
    for w, c in com.apply(v):
        if w == target:
            return complex(c).real
    return 0.0


def f_closed_form(l: float, q: float) -> float:
    """Closed form of the matrix element at j = 1/2, m2 = l."""
    qn = QNumbers(q)
    L = int(2 * l)
    val = -q ** (-l - 4) * (1 - q * q) ** 2 * qn(4) \
        * (q ** (l - 1) + q ** (-l + 1)) * math.sqrt(qn(2 * L + 6)) \
        * qn(L + 2) * qn(L + 4) * qn(L + 6) \
        / (qn(2 * L + 4) * qn(2 * L + 8) ** 2 * qn(2 * L + 12))
    return val
