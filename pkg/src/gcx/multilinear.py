"""Exact graded exterior algebra over a fixed complex cotangent space.

Mixed-degree forms on an n-dimensional cotangent space (2 <= n <= 4) are
stored densely: the coefficient of the basis monomial dx^{i1}^...^dx^{ik}
(indices strictly ascending) lives at the bitmask with bits i1-1,...,ik-1
set.  Every product sign is derived from transposition counting against
the ascending ordering, which keeps the wedge associative and graded
commutative.  Values are immutable after construction and all operations
are pure functions.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "Multiform",
    "GcVector",
    "clifford",
    "pairing",
    "pairing_gram",
    "exp_wedge",
    "action_matrix",
]


def _bit_indices(mask: int) -> tuple[int, ...]:
    """0-based positions of the set bits of ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _shuffle_sign(s: int, t: int) -> int:
    """Sign of merging the ascending factor lists of disjoint masks s, t."""
    sign = 1
    for b in _bit_indices(t):
        if bin(s >> (b + 1)).count("1") % 2:
            sign = -sign
    return sign


@dataclass(frozen=True)
class _Tables:
    dim: int
    degree: np.ndarray      # (2^n,) popcounts
    w_src1: np.ndarray      # flat wedge table over disjoint subset pairs
    w_src2: np.ndarray
    w_dst: np.ndarray
    w_sign: np.ndarray
    action: np.ndarray      # (2n, 2^n, 2^n); rows 0..n-1 interior, n..2n-1 wedge


@lru_cache(maxsize=None)
def _tables(n: int) -> _Tables:
    size = 1 << n
    degree = np.array([bin(s).count("1") for s in range(size)], dtype=np.int64)

    src1, src2, dst, sign = [], [], [], []
    for s in range(size):
        for t in range(size):
            if s & t:
                continue
            src1.append(s)
            src2.append(t)
            dst.append(s | t)
            sign.append(_shuffle_sign(s, t))

    action = np.zeros((2 * n, size, size))
    for i in range(n):
        bit = 1 << i
        for s in range(size):
            below = bin(s & (bit - 1)).count("1")
            sgn = -1.0 if below % 2 else 1.0
            if s & bit:
                action[i, s ^ bit, s] = sgn          # interior product by d/dx^{i+1}
            else:
                action[n + i, s | bit, s] = sgn      # wedge by dx^{i+1}

    return _Tables(
        dim=n,
        degree=degree,
        w_src1=np.array(src1, dtype=np.int64),
        w_src2=np.array(src2, dtype=np.int64),
        w_dst=np.array(dst, dtype=np.int64),
        w_sign=np.array(sign, dtype=np.float64),
        action=action,
    )


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class Multiform:
    """A mixed-degree complex exterior form on a fixed n-dim cotangent space."""

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim: int, coeffs=None):
        if not 2 <= dim <= 4:
            raise ValueError(f"dim must be 2..4, got {dim}")
        size = 1 << dim
        if coeffs is None:
            arr = np.zeros(size, dtype=complex)
        else:
            arr = np.array(coeffs, dtype=complex)
            if arr.shape != (size,):
                raise ValueError(f"expected {size} coefficients, got shape {arr.shape}")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "coeffs", _frozen(arr))

    def __setattr__(self, name, value):
        raise AttributeError("Multiform is immutable")

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "Multiform":
        return cls(dim)

    @classmethod
    def scalar(cls, dim: int, value: complex) -> "Multiform":
        c = np.zeros(1 << dim, dtype=complex)
        c[0] = value
        return cls(dim, c)

    @classmethod
    def basis(cls, dim: int, indices, coeff: complex = 1.0) -> "Multiform":
        """Monomial dx^{i1}^...^dx^{ik} for ascending 1-based indices."""
        mask = _indices_to_mask(dim, indices)
        c = np.zeros(1 << dim, dtype=complex)
        c[mask] = coeff
        return cls(dim, c)

    @classmethod
    def from_terms(cls, dim: int, terms: dict) -> "Multiform":
        """Build from a mapping {(i1,..,ik): coefficient} with 1-based indices."""
        c = np.zeros(1 << dim, dtype=complex)
        for indices, coeff in terms.items():
            c[_indices_to_mask(dim, indices)] += coeff
        return cls(dim, c)

    # -- linear structure -----------------------------------------------

    def _check(self, other: "Multiform") -> None:
        if not isinstance(other, Multiform):
            raise TypeError(f"expected Multiform, got {type(other).__name__}")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "Multiform") -> "Multiform":
        self._check(other)
        return Multiform(self.dim, self.coeffs + other.coeffs)

    def __sub__(self, other: "Multiform") -> "Multiform":
        self._check(other)
        return Multiform(self.dim, self.coeffs - other.coeffs)

    def __neg__(self) -> "Multiform":
        return Multiform(self.dim, -self.coeffs)

    def __mul__(self, scalar) -> "Multiform":
        return Multiform(self.dim, self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "Multiform":
        return Multiform(self.dim, self.coeffs / complex(scalar))

    # -- algebra ----------------------------------------------------------

    def wedge(self, other: "Multiform") -> "Multiform":
        self._check(other)
        t = _tables(self.dim)
        out = np.zeros(1 << self.dim, dtype=complex)
        np.add.at(out, t.w_dst, t.w_sign * self.coeffs[t.w_src1] * other.coeffs[t.w_src2])
        return Multiform(self.dim, out)

    def interior(self, vec) -> "Multiform":
        """Contraction with a tangent vector given as n complex components."""
        v = np.asarray(vec, dtype=complex)
        if v.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} vector components, got {v.shape}")
        t = _tables(self.dim)
        mat = np.tensordot(v, t.action[: self.dim], axes=1)
        return Multiform(self.dim, mat @ self.coeffs)

    def conjugate(self) -> "Multiform":
        return Multiform(self.dim, np.conj(self.coeffs))

    # -- structure queries -------------------------------------------------

    def degree_part(self, k: int) -> "Multiform":
        t = _tables(self.dim)
        return Multiform(self.dim, np.where(t.degree == k, self.coeffs, 0.0))

    def lowest_degree(self, tol: float = 0.0) -> int:
        """Lowest k with a degree-k coefficient exceeding tol; -1 if none."""
        t = _tables(self.dim)
        mags = np.abs(self.coeffs)
        for k in range(self.dim + 1):
            if mags[t.degree == k].max() > tol:
                return k
        return -1

    def top(self) -> complex:
        """Coefficient of the full top-degree monomial dx^1^...^dx^n."""
        return complex(self.coeffs[-1])

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def max_abs(self) -> float:
        return float(np.abs(self.coeffs).max())

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs() <= tol

    def is_real(self, tol: float = 1e-12) -> bool:
        return float(np.abs(self.coeffs.imag).max()) <= tol

    def real_part(self) -> "Multiform":
        return Multiform(self.dim, self.coeffs.real.astype(complex))

    def imag_part(self) -> "Multiform":
        return Multiform(self.dim, self.coeffs.imag.astype(complex))

    def allclose(self, other: "Multiform", tol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.abs(self.coeffs - other.coeffs).max() <= tol)

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        terms = []
        for mask in range(1 << self.dim):
            c = self.coeffs[mask]
            if c != 0:
                terms.append(
                    {
                        "indices": [i + 1 for i in _bit_indices(mask)],
                        "re": float(c.real),
                        "im": float(c.imag),
                    }
                )
        return {"dim": self.dim, "terms": terms}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Multiform":
        dim = int(data["dim"])
        form = np.zeros(1 << dim, dtype=complex)
        for term in data.get("terms", []):
            mask = _indices_to_mask(dim, term["indices"])
            form[mask] += complex(float(term.get("re", 0.0)), float(term.get("im", 0.0)))
        return cls(dim, form)

    def __repr__(self) -> str:
        parts = []
        for mask in range(1 << self.dim):
            c = self.coeffs[mask]
            if c == 0:
                continue
            label = "^".join(f"dx{i + 1}" for i in _bit_indices(mask)) or "1"
            parts.append(f"({c:.6g})*{label}")
        return "Multiform<" + (" + ".join(parts) if parts else "0") + ">"


def _indices_to_mask(dim: int, indices) -> int:
    mask = 0
    prev = 0
    for i in indices:
        i = int(i)
        if not 1 <= i <= dim:
            raise ValueError(f"index {i} out of range 1..{dim}")
        if i <= prev:
            raise ValueError(f"indices must be strictly ascending, got {list(indices)}")
        mask |= 1 << (i - 1)
        prev = i
    return mask


class GcVector:
    """An element X + xi of the complexified sum of tangent and cotangent spaces."""

    __slots__ = ("dim", "vec", "cov")

    def __init__(self, dim: int, vec=None, cov=None):
        if not 2 <= dim <= 4:
            raise ValueError(f"dim must be 2..4, got {dim}")

        def _arr(a):
            if a is None:
                return np.zeros(dim, dtype=complex)
            out = np.array(a, dtype=complex)
            if out.shape != (dim,):
                raise ValueError(f"expected {dim} components, got shape {out.shape}")
            return out

        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "vec", _frozen(_arr(vec)))
        object.__setattr__(self, "cov", _frozen(_arr(cov)))

    def __setattr__(self, name, value):
        raise AttributeError("GcVector is immutable")

    @classmethod
    def tangent(cls, dim: int, i: int, coeff: complex = 1.0) -> "GcVector":
        """coeff * d/dx^i (1-based i)."""
        v = np.zeros(dim, dtype=complex)
        v[i - 1] = coeff
        return cls(dim, vec=v)

    @classmethod
    def cotangent(cls, dim: int, i: int, coeff: complex = 1.0) -> "GcVector":
        """coeff * dx^i (1-based i)."""
        c = np.zeros(dim, dtype=complex)
        c[i - 1] = coeff
        return cls(dim, cov=c)

    @classmethod
    def from_array(cls, dim: int, arr) -> "GcVector":
        a = np.asarray(arr, dtype=complex)
        if a.shape != (2 * dim,):
            raise ValueError(f"expected {2 * dim} components, got shape {a.shape}")
        return cls(dim, vec=a[:dim], cov=a[dim:])

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.vec, self.cov])

    def conjugate(self) -> "GcVector":
        return GcVector(self.dim, np.conj(self.vec), np.conj(self.cov))

    def is_real(self, tol: float = 1e-12) -> bool:
        return (
            float(np.abs(self.vec.imag).max(initial=0.0)) <= tol
            and float(np.abs(self.cov.imag).max(initial=0.0)) <= tol
        )

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    def __add__(self, other: "GcVector") -> "GcVector":
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return GcVector(self.dim, self.vec + other.vec, self.cov + other.cov)

    def __sub__(self, other: "GcVector") -> "GcVector":
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return GcVector(self.dim, self.vec - other.vec, self.cov - other.cov)

    def __mul__(self, scalar) -> "GcVector":
        s = complex(scalar)
        return GcVector(self.dim, self.vec * s, self.cov * s)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"GcVector<vec={self.vec}, cov={self.cov}>"


def clifford(v: GcVector, rho: Multiform) -> Multiform:
    """Clifford action (X + xi) . rho = i_X rho + xi ^ rho."""
    if v.dim != rho.dim:
        raise ValueError(f"dimension mismatch: {v.dim} vs {rho.dim}")
    t = _tables(rho.dim)
    size = 1 << rho.dim
    mat = (np.concatenate([v.vec, v.cov]) @ t.action.reshape(2 * rho.dim, size * size)).reshape(
        size, size
    )
    return Multiform(rho.dim, mat @ rho.coeffs)


def action_matrix(rho: Multiform) -> np.ndarray:
    """(2^n, 2n) matrix whose j-th column is (basis generator j) . rho.

    Generators are ordered d/dx^1..d/dx^n, dx^1..dx^n, matching
    GcVector.as_array().
    """
    t = _tables(rho.dim)
    return np.einsum("jab,b->aj", t.action, rho.coeffs)


def pairing(u: GcVector, v: GcVector) -> complex:
    """Split-signature pairing <X+xi, Y+eta> = (eta(X) + xi(Y)) / 2."""
    if u.dim != v.dim:
        raise ValueError(f"dimension mismatch: {u.dim} vs {v.dim}")
    return complex(0.5 * (np.dot(v.cov, u.vec) + np.dot(u.cov, v.vec)))


def pairing_gram(dim: int) -> np.ndarray:
    """Gram matrix of the pairing on the 2n basis generators."""
    g = np.zeros((2 * dim, 2 * dim))
    g[:dim, dim:] = 0.5 * np.eye(dim)
    g[dim:, :dim] = 0.5 * np.eye(dim)
    return g


def exp_wedge(b: Multiform) -> Multiform:
    """Terminating wedge exponential of an even-degree form with no scalar part."""
    t = _tables(b.dim)
    bad = (t.degree == 0) | (t.degree % 2 == 1)
    if np.abs(b.coeffs[bad]).max() > 0:
        raise ValueError("exp_wedge requires an even-degree form with zero scalar part")
    out = Multiform.scalar(b.dim, 1.0)
    power = Multiform.scalar(b.dim, 1.0)
    factorial = 1.0
    for j in range(1, b.dim + 1):
        power = power.wedge(b)
        factorial *= j
        if power.is_zero():
            break
        out = out + power / factorial
    return out
