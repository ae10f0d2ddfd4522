"""Dense univariate polynomials and the Wronski map on 2-planes.

Two scalar kinds are supported: ``"rational"`` (coefficients are
:class:`fractions.Fraction`, arithmetic is exact) and ``"complex"``
(coefficients are Python ``complex``). Coefficients are stored in ascending
order of degree.

Resultant and discriminant conventions
--------------------------------------
``resultant(p, q)`` equals ``lc(q)**deg(p) * prod(p(t) for t in roots(q))``.
With ``W = prod (x - z_j)**m_j`` and monic ``F = prod (x - t_i)`` this gives
``resultant(W, F) == prod_i prod_j (t_i - z_j)**m_j`` with no extra sign.
``discriminant(p)`` equals ``prod_{i<j} (t_i - t_j)**2`` over the roots of
the monic normalization of ``p``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import NoSolutionError, PreconditionError

COMPLEX = "complex"
RATIONAL = "rational"

#: coefficient-wise tolerances for comparing complex polynomials
REL_TOL = 1e-9
ABS_TOL = 1e-12
#: relative residual above which an overdetermined float system is inconsistent
CONSISTENCY_TOL = 1e-8
#: relative cutoff for treating a Taylor coefficient as zero
MULTIPLICITY_TOL = 1e-7


def _is_exact_scalar(c) -> bool:
    return isinstance(c, (int, Fraction))


def _scalar_kind(c) -> str:
    return RATIONAL if _is_exact_scalar(c) else COMPLEX


def _join_kinds(*kinds: str) -> str:
    return RATIONAL if all(k == RATIONAL for k in kinds) else COMPLEX


@dataclass(frozen=True, eq=False)
class Polynomial:
    """A polynomial with dense ascending coefficients.

    Trailing (highest-degree) exact zeros are stripped on construction, so
    ``degree`` is the index of the last stored coefficient. The zero
    polynomial stores no coefficients and has degree ``-1``.

    Parameters
    ----------
    coeffs : iterable of scalars
        Coefficients of ``1, x, x**2, ...``.
    kind : {"rational", "complex"}, optional
        Inferred from the coefficients when omitted: all ``int`` or
        ``Fraction`` gives ``"rational"``.
    """

    coeffs: tuple
    kind: str | None = None

    def __post_init__(self):
        coeffs = list(self.coeffs)
        kind = self.kind
        if kind is None:
            kind = RATIONAL if all(_is_exact_scalar(c) for c in coeffs) else COMPLEX
        if kind == RATIONAL:
            coeffs = [Fraction(c) for c in coeffs]
        elif kind == COMPLEX:
            coeffs = [complex(c) for c in coeffs]
        else:
            raise ValueError(f"unknown scalar kind {kind!r}")
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "kind", kind)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, kind: str = RATIONAL) -> "Polynomial":
        return cls((), kind)

    @classmethod
    def constant(cls, c, kind: str | None = None) -> "Polynomial":
        return cls((c,), kind)

    @classmethod
    def monomial(cls, n: int, c=1, kind: str | None = None) -> "Polynomial":
        return cls((0,) * n + (c,), kind)

    @classmethod
    def from_roots(cls, roots: Iterable, kind: str | None = None) -> "Polynomial":
        """Monic polynomial ``prod (x - r)``; the empty product gives ``1``."""
        roots = list(roots)
        if kind is None:
            kind = _join_kinds(*(_scalar_kind(r) for r in roots))
        p = cls((1,), kind)
        for r in roots:
            p = p * cls((-r, 1), kind)
        return p

    # -- basic properties ---------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self):
        if self.is_zero:
            raise PreconditionError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def exact(self) -> bool:
        return self.kind == RATIONAL

    def coeff(self, i: int):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self._zero_scalar()

    def _zero_scalar(self):
        return Fraction(0) if self.exact else 0j

    def is_monic(self, tol: float = ABS_TOL) -> bool:
        if self.is_zero:
            return False
        if self.exact:
            return self.leading == 1
        return abs(self.leading - 1) <= tol

    # -- conversion ---------------------------------------------------------

    def to_complex(self) -> "Polynomial":
        return Polynomial(self.coeffs, COMPLEX)

    def to_numpy(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def monic(self) -> "Polynomial":
        lc = self.leading
        if self.exact:
            return Polynomial([c / lc for c in self.coeffs], RATIONAL)
        coeffs = [c / lc for c in self.coeffs]
        coeffs[-1] = 1.0 + 0j
        return Polynomial(coeffs, COMPLEX)

    def trim(self, rtol: float = 1e-14) -> "Polynomial":
        """Drop top coefficients of a complex polynomial below ``rtol * max|c|``."""
        if self.exact or self.is_zero:
            return self
        coeffs = list(self.coeffs)
        scale = max(abs(c) for c in coeffs)
        while coeffs and abs(coeffs[-1]) <= rtol * scale:
            coeffs.pop()
        return Polynomial(coeffs, COMPLEX)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial((other,), _scalar_kind(other))

    def __add__(self, other):
        other = self._coerce(other)
        kind = _join_kinds(self.kind, other.kind)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial([self.coeff(i) + other.coeff(i) for i in range(n)], kind)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs], self.kind)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        kind = _join_kinds(self.kind, other.kind)
        if self.is_zero or other.is_zero:
            return Polynomial.zero(kind)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out, kind)

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, Polynomial):
            raise TypeError("use divmod() for polynomial division")
        kind = _join_kinds(self.kind, _scalar_kind(c))
        if kind == RATIONAL:
            c = Fraction(c)
        return Polynomial([a / c for a in self.coeffs], kind)

    def __pow__(self, n: int):
        out = Polynomial((1,), self.kind)
        for _ in range(n):
            out = out * self
        return out

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        kind = _join_kinds(self.kind, other.kind)
        num = list(Polynomial(self.coeffs, kind).coeffs)
        den = Polynomial(other.coeffs, kind).coeffs
        dq = len(num) - len(den)
        if dq < 0:
            return Polynomial.zero(kind), Polynomial(num, kind)
        quot = [0] * (dq + 1)
        lc = den[-1]
        for i in range(dq, -1, -1):
            c = num[i + len(den) - 1] / lc
            quot[i] = c
            for j, d in enumerate(den):
                num[i + j] -= c * d
        rem = num[: len(den) - 1]
        return Polynomial(quot, kind), Polynomial(rem, kind)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x):
        acc = self._zero_scalar() if _is_exact_scalar(x) else 0j
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial([i * c for i, c in enumerate(self.coeffs)][1:], self.kind)

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.kind == other.kind and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.kind, self.coeffs))

    def isclose(self, other: "Polynomial", rtol: float = REL_TOL, atol: float = ABS_TOL) -> bool:
        """Coefficient-wise comparison with relative and absolute tolerance."""
        n = max(len(self.coeffs), len(other.coeffs))
        for i in range(n):
            a, b = complex(self.coeff(i)), complex(other.coeff(i))
            if abs(a - b) > atol + rtol * max(abs(a), abs(b)):
                return False
        return True

    def max_coeff_error(self, reference: "Polynomial") -> float:
        """``max|c_i - r_i| / max|r_i|`` against a reference polynomial."""
        n = max(len(self.coeffs), len(reference.coeffs))
        scale = max((abs(complex(c)) for c in reference.coeffs), default=1.0) or 1.0
        return max(
            (abs(complex(self.coeff(i)) - complex(reference.coeff(i))) for i in range(n)),
            default=0.0,
        ) / scale

    # -- roots --------------------------------------------------------------

    def roots(self, polish_steps: int = 8) -> np.ndarray:
        """Roots via companion-matrix eigenvalues, each polished by Newton."""
        if self.is_zero:
            raise PreconditionError("zero polynomial has no finite root set")
        if self.degree == 0:
            return np.zeros(0, dtype=complex)
        c = self.monic().to_numpy()
        n = self.degree
        comp = np.zeros((n, n), dtype=complex)
        comp[1:, :-1] = np.eye(n - 1)
        comp[:, -1] = -c[:-1]
        roots = np.linalg.eigvals(comp)
        p = self.monic().to_complex()
        dp = p.derivative()
        for i, r in enumerate(roots):
            best, best_val = r, abs(p(r))
            for _ in range(polish_steps):
                d = dp(r)
                if d == 0:
                    break
                r = r - p(r) / d
                val = abs(p(r))
                if not val < best_val:
                    break
                best, best_val = r, val
            roots[i] = best
        return roots

    def taylor(self, x0) -> list:
        """Taylor coefficients at ``x0`` by repeated synthetic division."""
        coeffs = list(self.coeffs)
        out = []
        while coeffs:
            rem = 0 * x0 + 0
            quot = [0] * (len(coeffs) - 1)
            for i in range(len(coeffs) - 1, -1, -1):
                rem = rem * x0 + coeffs[i]
                if i > 0:
                    quot[i - 1] = rem
            out.append(rem)
            coeffs = quot
        return out

    # -- serialization ------------------------------------------------------

    def to_json(self) -> list:
        if self.exact:
            return [f"{c.numerator}/{c.denominator}" for c in self.coeffs]
        return [[c.real, c.imag] for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence) -> "Polynomial":
        if all(isinstance(c, str) for c in data):
            return cls([Fraction(c) for c in data], RATIONAL)
        return cls([complex(re, im) for re, im in data], COMPLEX)

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r}, kind={self.kind!r})"


def evaluate(p: Polynomial, x):
    """Horner evaluation of ``p`` at ``x``."""
    return p(x)


def derivative(p: Polynomial) -> Polynomial:
    return p.derivative()


def polynomial_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic gcd of two exact polynomials by the Euclidean algorithm."""
    if not (p.exact and q.exact):
        raise PreconditionError("polynomial_gcd requires exact rational polynomials")
    while not q.is_zero:
        p, q = q, p % q
    return p.monic() if not p.is_zero else p


def root_multiplicity(p: Polynomial, x0, tol: float = MULTIPLICITY_TOL) -> int:
    """Order of vanishing of ``p`` at ``x0``.

    Exact polynomials are tested exactly; complex ones treat Taylor
    coefficients below ``tol`` times the largest one as zero.
    """
    tay = p.taylor(x0)
    if p.exact and _is_exact_scalar(x0):
        return next((i for i, c in enumerate(tay) if c != 0), len(tay))
    scale = max(abs(c) for c in tay)
    return next((i for i, c in enumerate(tay) if abs(c) > tol * scale), len(tay))


# -- planes -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PolyPlane:
    """A 2-plane of polynomials in canonical monic basis.

    ``small`` is the monic member of minimal degree (the order ``a``),
    ``big`` the monic member of maximal degree ``b`` whose ``x**a``
    coefficient is zero. Both are normalized on construction, so two
    equal planes store identical bases.
    """

    small: Polynomial
    big: Polynomial
    ambient_degree: int | None = None

    def __post_init__(self):
        small, big = self.small, self.big
        if small.is_zero or big.is_zero:
            raise PreconditionError("plane basis members must be nonzero")
        small, big = small.monic(), big.monic()
        a, b = small.degree, big.degree
        if not a < b:
            raise PreconditionError(f"need order < degree, got a={a}, b={b}")
        big = big - big.coeff(a) * small
        if not big.exact:
            coeffs = list(big.coeffs)
            coeffs[a] = 0j
            big = Polynomial(coeffs, big.kind)
        d = b if self.ambient_degree is None else self.ambient_degree
        if d < b:
            raise PreconditionError(f"ambient degree {d} below plane degree {b}")
        object.__setattr__(self, "small", small)
        object.__setattr__(self, "big", big)
        object.__setattr__(self, "ambient_degree", d)

    @classmethod
    def from_basis(cls, p: Polynomial, q: Polynomial, ambient_degree: int | None = None,
                   rtol: float = 1e-12) -> "PolyPlane":
        """Plane spanned by two arbitrary independent polynomials."""
        if p.degree == q.degree:
            q = (q - (q.leading / p.leading) * p).trim(rtol)
        if q.is_zero:
            raise PreconditionError("basis polynomials are linearly dependent")
        if p.degree > q.degree:
            p, q = q, p
        return cls(p, q, ambient_degree)

    @property
    def order(self) -> int:
        return self.small.degree

    @property
    def degree(self) -> int:
        return self.big.degree

    @property
    def kind(self) -> str:
        return _join_kinds(self.small.kind, self.big.kind)

    def __eq__(self, other):
        if not isinstance(other, PolyPlane):
            return NotImplemented
        return self.small == other.small and self.big == other.big

    def __hash__(self):
        return hash((self.small, self.big))

    def isclose(self, other: "PolyPlane", rtol: float = REL_TOL, atol: float = ABS_TOL) -> bool:
        return self.small.isclose(other.small, rtol, atol) and self.big.isclose(other.big, rtol, atol)

    def to_json(self) -> dict:
        return {"order": self.order, "degree": self.degree,
                "small": self.small.to_json(), "big": self.big.to_json()}

    def __repr__(self):
        return f"PolyPlane(small={self.small!r}, big={self.big!r})"


def wronskian_pair(f: Polynomial, g: Polynomial, a: int, b: int) -> Polynomial:
    """Monic Wronskian ``(f' g - f g') / (a - b)`` of monic ``f``, ``g``."""
    if a == b:
        raise PreconditionError("wronskian_pair needs distinct degrees a != b")
    if f.degree != a or g.degree != b:
        raise PreconditionError(f"degrees ({f.degree}, {g.degree}) do not match ({a}, {b})")
    w = f.derivative() * g - f * g.derivative()
    return w / (a - b)


def plane_wronskian(V: PolyPlane) -> Polynomial:
    return wronskian_pair(V.small, V.big, V.order, V.degree)


# -- resultants ---------------------------------------------------------------


def sylvester_matrix(p: Polynomial, q: Polynomial) -> list:
    """Sylvester matrix with ``deg q`` shifted rows of ``p`` then ``deg p`` of ``q``.

    Rows list coefficients from the highest degree down, so
    ``det(sylvester_matrix(p, q)) = lc(p)**deg(q) * prod(q(s) for s in roots(p))``.
    """
    m, n = p.degree, q.degree
    size = m + n
    zero = p._zero_scalar() if p.exact and q.exact else 0j
    rows = []
    pc, qc = list(reversed(p.coeffs)), list(reversed(q.coeffs))
    for i in range(n):
        rows.append([zero] * i + pc + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + qc + [zero] * (size - n - 1 - i))
    return rows


def _det_exact(rows: list) -> Fraction:
    a = [list(r) for r in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                fac = a[r][col] / a[col][col]
                for c in range(col, n):
                    a[r][c] -= fac * a[col][c]
    return det


def resultant(p: Polynomial, q: Polynomial):
    """``lc(q)**deg(p) * prod(p(t) for t in roots(q))`` via a Sylvester determinant."""
    if p.is_zero or q.is_zero:
        raise PreconditionError("resultant of the zero polynomial is undefined")
    rows = sylvester_matrix(q, p)
    if not rows:
        return Fraction(1) if p.exact and q.exact else 1.0 + 0j
    if p.exact and q.exact:
        return _det_exact(rows)
    return complex(np.linalg.det(np.array(rows, dtype=complex)))


def discriminant(p: Polynomial):
    """``prod_{i<j} (t_i - t_j)**2`` over the roots of ``p`` (monic-normalized)."""
    if p.is_zero or p.degree < 1:
        raise PreconditionError("discriminant needs degree >= 1")
    p = p.monic()
    n = p.degree
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(p.derivative(), p)


# -- plane predicates -----------------------------------------------------------


def is_generic_plane(V: PolyPlane, tol: float = 1e-8) -> bool:
    """True iff the basis members have no common root."""
    if V.order == 0:
        return True
    if V.small.exact and V.big.exact:
        return polynomial_gcd(V.small, V.big).degree == 0
    big = V.big.to_complex()
    for t in V.small.roots():
        scale = sum(abs(c) * abs(t) ** i for i, c in enumerate(big.coeffs))
        if abs(big(t)) <= tol * scale:
            return False
    return True


def is_squarefree(p: Polynomial, tol: float = 1e-6) -> bool:
    """No multiple root.

    Exact kind tests the discriminant. Float kind asks that the closest
    pair of roots be farther apart than ``tol * max(1, max|root|)``; a
    double root perturbed by rounding splits by about ``sqrt(eps)``, well
    below the default cutoff.
    """
    if p.degree < 2:
        return True
    if p.exact:
        return discriminant(p) != 0
    roots = p.roots()
    gaps = np.abs(roots[:, None] - roots[None, :])
    gaps[np.diag_indices(len(roots))] = np.inf
    return bool(gaps.min() > tol * max(1.0, float(np.abs(roots).max())))


def is_nondegenerate_plane(V: PolyPlane) -> bool:
    """Generic, and the minimal-degree member has no multiple root."""
    return is_generic_plane(V) and is_squarefree(V.small)


def max_vanishing_order(V: PolyPlane, x0, tol: float = MULTIPLICITY_TOL) -> int:
    """Largest root multiplicity at ``x0`` attained by a nonzero member of ``V``.

    Works on Taylor coefficients of the basis at ``x0``: the member with the
    lower order is used as pivot to cancel the other one's leading term.
    """
    p, q = V.small.taylor(x0), V.big.taylor(x0)
    exact = V.kind == RATIONAL and _is_exact_scalar(x0)
    scale = max(abs(c) for c in p + q)

    def order(cs):
        if exact:
            return next((i for i, c in enumerate(cs) if c != 0), None)
        return next((i for i, c in enumerate(cs) if abs(c) > tol * scale), None)

    n = max(len(p), len(q))
    p = p + [0] * (n - len(p))
    q = q + [0] * (n - len(q))
    op, oq = order(p), order(q)
    if op is None or oq is None:
        raise PreconditionError("plane basis vanishes identically near x0")
    if oq < op:
        p, q, op = q, p, oq
    fac = q[op] / p[op]
    reduced = [qi - fac * pi for pi, qi in zip(p, q)]
    reduced[op] = 0 * reduced[op]
    o = order(reduced)
    return n if o is None else o


# -- plane recovery -------------------------------------------------------------


def _solve_exact(A: list, b: list) -> list:
    """Exact least-structure solve of a consistent (possibly tall) system."""
    rows, cols = len(A), len(A[0]) if A else 0
    aug = [list(A[r]) + [b[r]] for r in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] != 0:
                fac = aug[i][c]
                aug[i] = [vi - fac * vr for vi, vr in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    if any(aug[i][cols] != 0 for i in range(r, rows)):
        raise NoSolutionError("inconsistent linear system")
    if len(pivots) < cols:
        raise NoSolutionError("linear system is underdetermined")
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = aug[i][cols]
    return x


def recover_plane(f: Polynomial, w: Polynomial, tol: float = CONSISTENCY_TOL) -> PolyPlane:
    """The unique plane containing ``f`` whose Wronskian is ``w``.

    Solves ``(f' g - f g') / (k - d) = w`` for monic ``g`` of degree
    ``d = deg(w) + 1 - k`` with the ``x**k`` coefficient of ``g`` fixed to 0.

    Raises
    ------
    NoSolutionError
        If ``f`` is not the small member of any plane with Wronskian ``w``.
    """
    if f.is_zero or w.is_zero:
        raise PreconditionError("recover_plane needs nonzero polynomials")
    f, w = f.monic(), w.monic()
    k = f.degree
    d = w.degree + 1 - k
    if d <= k:
        raise PreconditionError(f"target degree {d} must exceed the order {k}")
    kind = _join_kinds(f.kind, w.kind)
    f = Polynomial(f.coeffs, kind)
    w = Polynomial(w.coeffs, kind)
    fp = f.derivative()
    scale = Fraction(1, k - d) if kind == RATIONAL else 1.0 / (k - d)

    def image(j):
        xj = Polynomial.monomial(j, 1, kind)
        return (fp * xj - f * xj.derivative()) * scale

    unknowns = [j for j in range(d) if j != k]
    nrows = w.degree + 1
    cols = [image(j) for j in unknowns]
    rhs_poly = w - image(d)
    A = [[col.coeff(r) for col in cols] for r in range(nrows)]
    b = [rhs_poly.coeff(r) for r in range(nrows)]
    if kind == RATIONAL:
        sol = _solve_exact(A, b) if unknowns else []
        if not unknowns and any(c != 0 for c in b):
            raise NoSolutionError("inconsistent linear system")
    else:
        An = np.array(A, dtype=complex).reshape(nrows, len(unknowns))
        bn = np.array(b, dtype=complex)
        if unknowns:
            sol, *_ = np.linalg.lstsq(An, bn, rcond=None)
            resid = np.abs(An @ sol - bn).max()
        else:
            sol, resid = np.zeros(0, dtype=complex), np.abs(bn).max()
        wscale = max(abs(c) for c in w.coeffs)
        if resid > tol * wscale:
            raise NoSolutionError(f"no plane: relative residual {resid / wscale:.3e}")
        sol = list(sol)
    g = [0] * (d + 1)
    for j, c in zip(unknowns, sol):
        g[j] = c
    g[d] = 1
    return PolyPlane(f, Polynomial(g, kind), d)

