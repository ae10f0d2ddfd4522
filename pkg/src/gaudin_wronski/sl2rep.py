"""sl2 representations on tensor products of irreducible modules.

A vector of ``L_{m_1} (x) ... (x) L_{m_n}`` is stored by its coordinates in
the monomial basis ``f^J v_M = f^{j_1} v_{m_1} (x) ... (x) f^{j_n} v_{m_n}``
with ``0 <= j_i <= m_i``. Tensor factors are indexed from 0.

On one factor the generators act by::

    h f^j v_m = (m - 2j) f^j v_m
    f f^j v_m = f^{j+1} v_m          (zero for j = m)
    e f^j v_m = j (m - j + 1) f^{j-1} v_m

The ``e`` coefficient follows from ``[e, f] = h`` and ``e v_m = 0``.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import PreconditionError, UnsupportedCaseError

TensorIndex = tuple  # (j_1, ..., j_n)

#: above this many basis vectors singular_basis switches to floating point
EXACT_NULLSPACE_LIMIT = 2000


@dataclass(frozen=True)
class WeightVector:
    """Highest weights ``(m_1, ..., m_n)`` of the tensor factors."""

    m: tuple

    def __post_init__(self):
        m = tuple(int(x) for x in self.m)
        if not m:
            raise PreconditionError("need at least one tensor factor")
        if any(x < 0 for x in m):
            raise PreconditionError(f"weights must be nonnegative, got {m}")
        object.__setattr__(self, "m", m)

    @property
    def n(self) -> int:
        return len(self.m)

    @property
    def total(self) -> int:
        return sum(self.m)

    def __iter__(self):
        return iter(self.m)

    def __len__(self):
        return len(self.m)

    def __getitem__(self, i):
        return self.m[i]


def as_weights(M) -> WeightVector:
    return M if isinstance(M, WeightVector) else WeightVector(tuple(M))


@lru_cache(maxsize=4096)
def _level_basis(m: tuple, k: int) -> tuple:
    if k < 0:
        return ()
    out = []

    def rec(prefix, i, remaining):
        if i == len(m) - 1:
            if remaining <= m[i]:
                out.append(prefix + (remaining,))
            return
        rest = sum(m[i + 1:])
        for j in range(max(0, remaining - rest), min(m[i], remaining) + 1):
            rec(prefix + (j,), i + 1, remaining - j)

    rec((), 0, k)
    return tuple(out)


def level_basis(M, k: int) -> tuple:
    """All ``J`` with ``|J| = k``, in lexicographic order."""
    return _level_basis(as_weights(M).m, k)


def full_basis(M) -> tuple:
    """Every ``J`` of the tensor product, in lexicographic order."""
    return tuple(itertools.product(*(range(x + 1) for x in as_weights(M).m)))


@dataclass(frozen=True, eq=False)
class TensorVector:
    """A vector of one weight space, as a map ``J -> coefficient``.

    All stored indices satisfy ``|J| = level``; zero coefficients are pruned.
    """

    weights: WeightVector
    coords: Mapping = field(default_factory=dict)
    level: int | None = None

    def __post_init__(self):
        weights = as_weights(self.weights)
        coords = {tuple(J): c for J, c in self.coords.items() if c != 0}
        levels = {sum(J) for J in coords}
        level = self.level
        if level is None:
            if len(levels) > 1:
                raise PreconditionError("indices of a TensorVector must share |J|")
            level = levels.pop() if levels else 0
        elif levels - {level}:
            raise PreconditionError(f"index levels {sorted(levels)} differ from {level}")
        for J in coords:
            if len(J) != weights.n or any(not 0 <= j <= m for j, m in zip(J, weights.m)):
                raise PreconditionError(f"index {J} out of range for weights {weights.m}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "level", level)

    @classmethod
    def highest(cls, M) -> "TensorVector":
        M = as_weights(M)
        return cls(M, {(0,) * M.n: 1}, 0)

    @classmethod
    def basis_vector(cls, M, J: TensorIndex, c=1) -> "TensorVector":
        return cls(M, {tuple(J): c}, sum(J))

    @classmethod
    def from_array(cls, M, basis: Sequence, values: Iterable) -> "TensorVector":
        M = as_weights(M)
        level = sum(basis[0]) if len(basis) else 0
        return cls(M, dict(zip(basis, values)), level)

    def to_array(self, basis: Sequence | None = None) -> np.ndarray:
        basis = level_basis(self.weights, self.level) if basis is None else basis
        return np.array([complex(self.coords.get(J, 0)) for J in basis])

    @property
    def is_zero(self) -> bool:
        return not self.coords

    def _check_compatible(self, other: "TensorVector"):
        if other.weights != self.weights:
            raise PreconditionError("vectors live in different tensor products")

    def __add__(self, other: "TensorVector") -> "TensorVector":
        self._check_compatible(other)
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        if other.level != self.level:
            raise PreconditionError("cannot add vectors of different weight")
        coords = dict(self.coords)
        for J, c in other.coords.items():
            coords[J] = coords.get(J, 0) + c
        return TensorVector(self.weights, coords, self.level)

    def __neg__(self):
        return TensorVector(self.weights, {J: -c for J, c in self.coords.items()}, self.level)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return TensorVector(self.weights, {J: c * v for J, v in self.coords.items()}, self.level)

    __rmul__ = __mul__

    def isclose(self, other: "TensorVector", tol: float = 1e-12) -> bool:
        keys = set(self.coords) | set(other.coords)
        return all(abs(complex(self.coords.get(J, 0)) - complex(other.coords.get(J, 0))) <= tol
                   for J in keys)

    def max_abs(self) -> float:
        return max((abs(complex(c)) for c in self.coords.values()), default=0.0)

    def to_json(self) -> dict:
        def enc(c):
            if isinstance(c, (int, Fraction)):
                c = Fraction(c)
                return f"{c.numerator}/{c.denominator}"
            c = complex(c)
            return [c.real, c.imag]

        return {"weights": list(self.weights.m), "level": self.level,
                "coords": [[list(J), enc(c)] for J, c in sorted(self.coords.items())]}

    @classmethod
    def from_json(cls, data: Mapping) -> "TensorVector":
        def dec(c):
            return Fraction(c) if isinstance(c, str) else complex(*c)

        return cls(WeightVector(tuple(data["weights"])),
                   {tuple(J): dec(c) for J, c in data["coords"]}, data["level"])

    def __repr__(self):
        return f"TensorVector(weights={self.weights.m}, level={self.level}, coords={self.coords})"


# -- generator actions ----------------------------------------------------------


def _factors(v: TensorVector, factor: int | None) -> range | tuple:
    if factor is None:
        return range(v.weights.n)
    if not 0 <= factor < v.weights.n:
        raise PreconditionError(f"factor {factor} out of range 0..{v.weights.n - 1}")
    return (factor,)


def act_e(v: TensorVector, factor: int | None = None) -> TensorVector:
    """Raising operator on one factor, or the total ``e`` when ``factor`` is None."""
    out: dict = {}
    for i in _factors(v, factor):
        m = v.weights.m[i]
        for J, c in v.coords.items():
            j = J[i]
            if j == 0:
                continue
            K = J[:i] + (j - 1,) + J[i + 1:]
            out[K] = out.get(K, 0) + j * (m - j + 1) * c
    return TensorVector(v.weights, out, v.level - 1)


def act_f(v: TensorVector, factor: int | None = None) -> TensorVector:
    out: dict = {}
    for i in _factors(v, factor):
        m = v.weights.m[i]
        for J, c in v.coords.items():
            j = J[i]
            if j == m:
                continue
            K = J[:i] + (j + 1,) + J[i + 1:]
            out[K] = out.get(K, 0) + c
    return TensorVector(v.weights, out, v.level + 1)


def act_h(v: TensorVector, factor: int | None = None) -> TensorVector:
    out: dict = {}
    for i in _factors(v, factor):
        m = v.weights.m[i]
        for J, c in v.coords.items():
            out[J] = out.get(J, 0) + (m - 2 * J[i]) * c
    return TensorVector(v.weights, out, v.level)


# -- singular vectors -----------------------------------------------------------


def raising_matrix(M, k: int) -> dict:
    """Sparse total ``e``: level ``k`` columns to level ``k - 1`` rows.

    Returned as ``{row: {col: value}}`` with integer entries.
    """
    M = as_weights(M)
    cols, rows = level_basis(M, k), level_basis(M, k - 1)
    index = {J: r for r, J in enumerate(rows)}
    mat: dict = {}
    for c, J in enumerate(cols):
        for i, m in enumerate(M.m):
            j = J[i]
            if j:
                r = index[J[:i] + (j - 1,) + J[i + 1:]]
                mat.setdefault(r, {})[c] = j * (m - j + 1)
    return mat


def _check_level(M: WeightVector, k: int):
    if not 0 <= 2 * k <= M.total:
        raise PreconditionError(f"need 0 <= k <= |M|/2, got k={k}, |M|={M.total}")


def singular_basis(M, k: int, exact: bool | None = None) -> list:
    """Basis of ``Sing_k``: kernel of total ``e`` on the level-``k`` weight space.

    Parameters
    ----------
    exact : bool, optional
        Use an exact rational nullspace (default when the weight space has at
        most ``EXACT_NULLSPACE_LIMIT`` vectors) or a floating SVD nullspace.
    """
    M = as_weights(M)
    _check_level(M, k)
    cols = level_basis(M, k)
    if k == 0:
        return [TensorVector.highest(M)]
    if exact is None:
        exact = len(cols) <= EXACT_NULLSPACE_LIMIT
    mat = raising_matrix(M, k)
    nrows = len(level_basis(M, k - 1))
    if exact:
        from sympy import QQ
        from sympy.polys.matrices import DomainMatrix
        from sympy.polys.matrices.sdm import SDM

        sdm = SDM({r: {c: QQ(v) for c, v in row.items()} for r, row in mat.items()},
                  (nrows, len(cols)), QQ)
        null = DomainMatrix.from_rep(sdm).nullspace().rep.to_sdm()
        vectors = []
        for r in sorted(null):
            coords = {cols[c]: Fraction(int(x.numerator), int(x.denominator))
                      for c, x in null[r].items()}
            vectors.append(TensorVector(M, coords, k))
        return vectors
    from scipy.linalg import null_space

    dense = np.zeros((nrows, len(cols)))
    for r, row in mat.items():
        for c, v in row.items():
            dense[r, c] = v
    null = null_space(dense)
    return [TensorVector(M, {J: float(x) for J, x in zip(cols, null[:, i])}, k)
            for i in range(null.shape[1])]


def binomial(a: int, b: int) -> int:
    """``C(a, b)`` with ``C(a, b) = 0`` whenever ``a < b``, negative ``a`` included."""
    if b < 0 or a < b:
        return 0
    return math.comb(a, b)


def dim_sing_formula(M, k: int) -> int:
    """Alternating-sum closed form for ``dim Sing_k``; needs ``n >= 2``."""
    M = as_weights(M)
    _check_level(M, k)
    n = M.n
    if n < 2:
        raise UnsupportedCaseError("the closed form needs at least two tensor factors")
    total = 0
    for q in range(n + 1):
        sign = -1 if q % 2 else 1
        for subset in itertools.combinations(M.m, q):
            total += sign * binomial(k + n - 2 - sum(subset) - q, n - 2)
    return total


@lru_cache(maxsize=4096)
def _level_sizes(m: tuple) -> tuple:
    counts = Counter(sum(J) for J in itertools.product(*(range(x + 1) for x in m)))
    return tuple(counts.get(i, 0) for i in range(sum(m) + 1))


def dim_sing_bruteforce(M, k: int) -> int:
    """``#{|J| = k} - #{|J| = k - 1}`` by enumerating all indices."""
    M = as_weights(M)
    _check_level(M, k)
    sizes = _level_sizes(M.m)
    return sizes[k] - (sizes[k - 1] if k >= 1 else 0)


# -- Clebsch-Gordan and special Schubert classes ---------------------------------


def tensor_pair(a: int, b: int) -> range:
    """Highest weights in ``L_a (x) L_b``: ``|a - b|, |a - b| + 2, ..., a + b``."""
    return range(abs(a - b), a + b + 1, 2)


@lru_cache(maxsize=65536)
def _decompose(q: tuple) -> tuple:
    if not q:
        return ((0, 1),)
    multiset = Counter({q[0]: 1})
    for b in q[1:]:
        nxt: Counter = Counter()
        for a, mult in multiset.items():
            for c in tensor_pair(a, b):
                nxt[c] += mult
        multiset = nxt
    return tuple(sorted(multiset.items()))


def decompose(q: Sequence[int]) -> dict:
    """Multiplicities of irreducibles in ``L_{q_1} (x) ... (x) L_{q_s}``."""
    if any(x < 0 for x in q):
        raise PreconditionError("highest weights must be nonnegative")
    return dict(_decompose(tuple(sorted(int(x) for x in q))))


def cg_multiplicity(q: Sequence[int], r: int) -> int:
    """Multiplicity of ``L_r`` in the tensor product of the ``L_{q_i}``."""
    if r < 0:
        raise PreconditionError("r must be nonnegative")
    return decompose(q).get(r, 0)


def _check_schubert(q: Sequence[int], d: int):
    if any(not 0 <= x <= d - 1 for x in q):
        raise PreconditionError(f"special classes need 0 <= q_i <= d - 1 = {d - 1}, got {tuple(q)}")
    if sum(q) != 2 * d - 2:
        raise PreconditionError(f"codimensions sum to {sum(q)}, expected 2d - 2 = {2 * d - 2}")


def schubert_special_intersection(q: Sequence[int], d: int) -> int:
    """Intersection number of special classes in ``G_2(C^{d+1})``, via sl2."""
    _check_schubert(q, d)
    return cg_multiplicity(q, 0)


def schubert_formula(q: Sequence[int], d: int) -> int:
    """Closed binomial form of the same intersection number.

    Only the first ``n = len(q) - 1`` classes enter the sum explicitly; the
    last one is fixed by the codimension constraint.
    """
    q = tuple(int(x) for x in q)
    n = len(q) - 1
    if n < 2:
        raise UnsupportedCaseError("the closed form needs at least three classes")
    _check_schubert(q, d)
    total = 0
    for size in range(1, n + 1):
        sign = -1 if (n - size) % 2 else 1
        for subset in itertools.combinations(q[:n], size):
            total += sign * binomial(sum(subset) + size - d - 1, n - 2)
    return total


def wronski_bound(M, k: int) -> int:
    """``sigma_{m_1} ... sigma_{m_n} sigma_{|M|-2k}`` in ``G_2(C^{|M|+2-k})``.

    A class ``sigma_q`` with ``q`` above the Grassmannian's range is zero, so
    such instances give 0 instead of a precondition error.
    """
    M = as_weights(M)
    q = tuple(M.m) + (M.total - 2 * k,)
    d = M.total + 1 - k
    if any(x > d - 1 for x in q):
        return 0
    return schubert_special_intersection(q, d)


# -- Shapovalov form ------------------------------------------------------------


@dataclass(frozen=True)
class ShapovalovData:
    """Diagonal Shapovalov norms ``B(f^j v_m, f^j v_m)`` for each factor."""

    norms: tuple

    def norm(self, J: TensorIndex) -> int:
        out = 1
        for i, j in enumerate(J):
            out *= self.norms[i][j]
        return out


def factor_norms(m: int) -> tuple:
    """``B(f^j v, f^j v) = B(f^{j-1} v, e f^j v) = j (m - j + 1) B(f^{j-1} v, f^{j-1} v)``."""
    norms = [1]
    for j in range(1, m + 1):
        norms.append(j * (m - j + 1) * norms[-1])
    return tuple(norms)


def shapovalov_data(M) -> ShapovalovData:
    return ShapovalovData(tuple(factor_norms(m) for m in as_weights(M).m))


def shapovalov_inner(u: TensorVector, v: TensorVector):
    """Bilinear (not sesquilinear) Shapovalov pairing of two vectors."""
    if u.weights != v.weights:
        raise PreconditionError("vectors live in different tensor products")
    data = shapovalov_data(u.weights)
    return sum((c * v.coords[J] * data.norm(J) for J, c in u.coords.items() if J in v.coords), 0)


def shapovalov_diagonal(M, basis: Sequence) -> np.ndarray:
    data = shapovalov_data(M)
    return np.array([float(data.norm(J)) for J in basis])
