"""Concrete Hermitian positive Jordan triples of the classical domains.

Elements of ``V`` are plain complex numpy arrays whose last axis holds the
packed coordinates of a :class:`DomainSpec`; every routine broadcasts over
leading axes.  The triple product is normalized so that ``{ccc} = 2c`` for
tripotents, ``Q(x)y = {xyx}/2`` and ``B(x,y) = I - D(x,y) + Q(x)Q(y)``.

Packing
-------
typeI(p, q)       row-major ``p x q`` matrix
typeII(n)         strict upper triangle of an antisymmetric ``n x n`` matrix
typeIII(n)        upper triangle (diagonal included) of a symmetric matrix
typeIV(n)         ``C^n`` with the bilinear form ``q(x, z) = sum x_j z_j``
polydisc(n)       ``C^n`` with componentwise product
ball(n)           ``1 x n`` row vector (the Hermitian unit ball)
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np


class DomainKind(enum.Enum):
    TYPE_I = "typeI"
    TYPE_II = "typeII"
    TYPE_III = "typeIII"
    TYPE_IV = "typeIV"
    POLYDISC = "polydisc"
    HERMITIAN_BALL = "ball"


_ALIASES = {
    "i": DomainKind.TYPE_I, "typei": DomainKind.TYPE_I, "type1": DomainKind.TYPE_I,
    "ii": DomainKind.TYPE_II, "typeii": DomainKind.TYPE_II, "type2": DomainKind.TYPE_II,
    "iii": DomainKind.TYPE_III, "typeiii": DomainKind.TYPE_III, "type3": DomainKind.TYPE_III,
    "iv": DomainKind.TYPE_IV, "typeiv": DomainKind.TYPE_IV, "type4": DomainKind.TYPE_IV,
    "spin": DomainKind.TYPE_IV, "lie": DomainKind.TYPE_IV,
    "polydisc": DomainKind.POLYDISC,
    "ball": DomainKind.HERMITIAN_BALL, "hermitianball": DomainKind.HERMITIAN_BALL,
    "hermitian_ball": DomainKind.HERMITIAN_BALL,
}

_MATRIX_KINDS = (
    DomainKind.TYPE_I, DomainKind.TYPE_II, DomainKind.TYPE_III, DomainKind.HERMITIAN_BALL,
)


class DomainError(ValueError):
    """A point lies outside the region where an operation is defined."""


@dataclass(frozen=True)
class DomainSpec:
    kind: DomainKind
    dims: tuple
    dim: int
    rank: int
    mult_a: int
    mult_b: int
    tube: bool

    @property
    def name(self) -> str:
        return f"{self.kind.value}({','.join(str(d) for d in self.dims)})"

    @property
    def is_disc(self) -> bool:
        return self.dim == 1

    @property
    def matrix_shape(self):
        if self.kind is DomainKind.TYPE_I:
            return self.dims
        if self.kind is DomainKind.HERMITIAN_BALL:
            return (1, self.dims[0])
        if self.kind in (DomainKind.TYPE_II, DomainKind.TYPE_III):
            return (self.dims[0], self.dims[0])
        return None

    def __str__(self) -> str:
        return self.name

    def to_matrix(self, x):
        """Expand packed coordinates to matrices (matrix kinds only)."""
        x = as_element(self, x)
        shape = self.matrix_shape
        if shape is None:
            raise ValueError(f"{self.name} has no matrix model")
        if self.kind in (DomainKind.TYPE_I, DomainKind.HERMITIAN_BALL):
            return x.reshape(x.shape[:-1] + shape)
        iu, ju = _triangle(self)
        m = np.zeros(x.shape[:-1] + shape, dtype=complex)
        m[..., iu, ju] = x
        if self.kind is DomainKind.TYPE_II:
            m[..., ju, iu] = -x
        else:
            m[..., ju, iu] = x
        return m

    def from_matrix(self, m):
        m = np.asarray(m, dtype=complex)
        if self.kind in (DomainKind.TYPE_I, DomainKind.HERMITIAN_BALL):
            return m.reshape(m.shape[:-2] + (self.dim,))
        iu, ju = _triangle(self)
        return m[..., iu, ju]


@functools.lru_cache(maxsize=None)
def _triangle(spec: DomainSpec):
    n = spec.dims[0]
    k = 1 if spec.kind is DomainKind.TYPE_II else 0
    return np.triu_indices(n, k)


def make_domain(kind, *dims) -> DomainSpec:
    """Build a :class:`DomainSpec` from a kind name and its dimensions.

    ``make_domain("disc")`` is shorthand for ``typeI(1,1)``.
    """
    if isinstance(kind, str):
        key = kind.strip().lower().replace("-", "")
        if key == "disc":
            return make_domain(DomainKind.TYPE_I, 1, 1)
        if key not in _ALIASES:
            raise ValueError(f"unknown domain kind {kind!r}")
        kind = _ALIASES[key]
    if len(dims) == 1 and isinstance(dims[0], (tuple, list)):
        dims = tuple(dims[0])
    try:
        dims = tuple(int(d) for d in dims)
    except (TypeError, ValueError):
        raise ValueError(f"dimensions must be integers, got {dims!r}") from None

    expected = 2 if kind is DomainKind.TYPE_I else 1
    if len(dims) != expected:
        raise ValueError(f"{kind.value} takes {expected} dimension(s), got {len(dims)}")
    if any(d < 1 for d in dims):
        raise ValueError(f"{kind.value} dimensions must be >= 1, got {dims}")

    if kind is DomainKind.TYPE_I:
        p, q = dims
        r = min(p, q)
        dim, a, b = p * q, 2, abs(q - p)
    elif kind is DomainKind.TYPE_II:
        (n,) = dims
        if n < 2:
            raise ValueError("typeII(n) needs n >= 2 (typeII(1) is the zero space)")
        r = n // 2
        dim, a, b = n * (n - 1) // 2, 4, 2 * (n % 2)
    elif kind is DomainKind.TYPE_III:
        (n,) = dims
        r = n
        dim, a, b = n * (n + 1) // 2, 1, 0
    elif kind is DomainKind.TYPE_IV:
        (n,) = dims
        r = 1 if n == 1 else 2
        dim, a, b = n, max(n - 2, 0), 0
    elif kind is DomainKind.POLYDISC:
        (n,) = dims
        r = n
        dim, a, b = n, 0, 0
    else:
        (n,) = dims
        r = 1
        dim, a, b = n, 2, n - 1
    return DomainSpec(kind, dims, dim, r, a, b, b == 0)


def as_element(spec: DomainSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim == 0 or x.shape[-1] != spec.dim:
        raise ValueError(
            f"element with shape {x.shape} does not belong to {spec.name} (dim {spec.dim})"
        )
    return x


def basis(spec: DomainSpec) -> np.ndarray:
    return np.eye(spec.dim, dtype=complex)


def triple_product(spec: DomainSpec, x, y, z) -> np.ndarray:
    """``{xyz}``: complex bilinear symmetric in ``(x, z)``, antilinear in ``y``."""
    x, y, z = as_element(spec, x), as_element(spec, y), as_element(spec, z)
    kind = spec.kind
    if kind is DomainKind.POLYDISC:
        return 2.0 * x * y.conj() * z
    if kind is DomainKind.TYPE_IV:
        yc = y.conj()
        xy = np.sum(x * yc, axis=-1, keepdims=True)
        zy = np.sum(z * yc, axis=-1, keepdims=True)
        xz = np.sum(x * z, axis=-1, keepdims=True)
        return 2.0 * (xy * z + zy * x - xz * yc)
    xm, ym, zm = spec.to_matrix(x), spec.to_matrix(y), spec.to_matrix(z)
    ys = np.conj(np.swapaxes(ym, -1, -2))
    return spec.from_matrix(xm @ ys @ zm + zm @ ys @ xm)


def d_matrix(spec: DomainSpec, x, y) -> np.ndarray:
    """Matrices of ``D(x, y)``, batched over leading axes of ``x`` and ``y``."""
    x, y = as_element(spec, x), as_element(spec, y)
    cols = triple_product(spec, x[..., None, :], y[..., None, :], basis(spec))
    return np.swapaxes(cols, -1, -2)


def q_matrix(spec: DomainSpec, x) -> np.ndarray:
    """Matrices ``C`` with ``Q(x) z = C conj(z)``."""
    x = as_element(spec, x)
    xb = x[..., None, :]
    cols = 0.5 * triple_product(spec, xb, basis(spec), xb)
    return np.swapaxes(cols, -1, -2)


def bergman_matrix(spec: DomainSpec, x, y) -> np.ndarray:
    """Matrices of the complex-linear operator ``B(x, y)``."""
    d = d_matrix(spec, x, y)
    qq = q_matrix(spec, x) @ np.conj(q_matrix(spec, y))
    return np.eye(spec.dim) - d + qq


@dataclass(frozen=True, eq=False)
class RealLinearOp:
    """``z -> linear @ z + conj_part @ conj(z)`` on the packed coordinates of a domain."""

    spec: DomainSpec
    linear: np.ndarray
    conj_part: np.ndarray

    def __post_init__(self):
        n = self.spec.dim
        for m in (self.linear, self.conj_part):
            if np.shape(m) != (n, n):
                raise ValueError(f"operator blocks must be {n}x{n}, got {np.shape(m)}")

    @classmethod
    def identity(cls, spec):
        return cls(spec, np.eye(spec.dim, dtype=complex), np.zeros((spec.dim, spec.dim), complex))

    @classmethod
    def complex_linear(cls, spec, matrix):
        return cls(spec, np.asarray(matrix, dtype=complex), np.zeros((spec.dim, spec.dim), complex))

    @classmethod
    def conjugate_linear(cls, spec, matrix):
        return cls(spec, np.zeros((spec.dim, spec.dim), complex), np.asarray(matrix, dtype=complex))

    def __call__(self, z):
        z = as_element(self.spec, z)
        return z @ self.linear.T + np.conj(z) @ self.conj_part.T

    def _check(self, other):
        if not isinstance(other, RealLinearOp):
            return NotImplemented
        if other.spec != self.spec:
            raise ValueError(f"operators on {self.spec.name} and {other.spec.name} do not combine")
        return other

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        a1, c1, a2, c2 = self.linear, self.conj_part, other.linear, other.conj_part
        # conjugation swaps the roles of the inner operator's blocks
        return RealLinearOp(self.spec, a1 @ a2 + c1 @ np.conj(c2), a1 @ c2 + c1 @ np.conj(a2))

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return RealLinearOp(self.spec, self.linear + other.linear, self.conj_part + other.conj_part)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return RealLinearOp(self.spec, self.linear - other.linear, self.conj_part - other.conj_part)

    def __neg__(self):
        return RealLinearOp(self.spec, -self.linear, -self.conj_part)

    def __rmul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return RealLinearOp(self.spec, scalar * self.linear, scalar * self.conj_part)

    def realify(self) -> np.ndarray:
        """Real ``2n x 2n`` matrix acting on ``(Re z, Im z)``."""
        ar, ai = self.linear.real, self.linear.imag
        cr, ci = self.conj_part.real, self.conj_part.imag
        return np.block([[ar + cr, ci - ai], [ai + ci, ar - cr]])

    @classmethod
    def from_real(cls, spec, m):
        n = spec.dim
        m11, m12, m21, m22 = m[:n, :n], m[:n, n:], m[n:, :n], m[n:, n:]
        lin = 0.5 * (m11 + m22) + 0.5j * (m21 - m12)
        con = 0.5 * (m11 - m22) + 0.5j * (m21 + m12)
        return cls(spec, lin, con)

    def inverse(self):
        if not self.conj_part.any():
            return RealLinearOp.complex_linear(self.spec, np.linalg.inv(self.linear))
        return RealLinearOp.from_real(self.spec, np.linalg.inv(self.realify()))

    def max_abs(self) -> float:
        return float(max(np.abs(self.linear).max(initial=0.0), np.abs(self.conj_part).max(initial=0.0)))


def d_operator(spec: DomainSpec, x, y) -> RealLinearOp:
    return RealLinearOp.complex_linear(spec, d_matrix(spec, x, y))


def q_operator(spec: DomainSpec, x) -> RealLinearOp:
    return RealLinearOp.conjugate_linear(spec, q_matrix(spec, x))


def bergman_operator(spec: DomainSpec, x, y) -> RealLinearOp:
    """``B(x,y) = I - D(x,y) + Q(x)Q(y)``, assembled from the generic operators."""
    return RealLinearOp.identity(spec) - d_operator(spec, x, y) + q_operator(spec, x) @ q_operator(spec, y)


def hermitian_inner(spec: DomainSpec, x, y):
    """``(x|y) = tr D(x, y)``, linear in ``x`` and antilinear in ``y``."""
    return np.trace(d_matrix(spec, x, y), axis1=-2, axis2=-1)


@functools.lru_cache(maxsize=None)
def gram_matrix(spec: DomainSpec) -> np.ndarray:
    """``H`` with ``(x|y) = conj(y) @ H @ x``."""
    e = basis(spec)
    g = hermitian_inner(spec, e[:, None, :], e[None, :, :])
    # g[i, j] = (b_i | b_j) = H[j, i]
    h = g.T.copy()
    h.setflags(write=False)
    return h


def inner_fast(spec: DomainSpec, x, y):
    """Gram-matrix evaluation of :func:`hermitian_inner`."""
    x, y = as_element(spec, x), as_element(spec, y)
    return np.einsum("...i,ij,...j->...", np.conj(y), gram_matrix(spec), x)


def hermitian_norm(spec: DomainSpec, x):
    return np.sqrt(np.maximum(inner_fast(spec, x, x).real, 0.0))


@functools.lru_cache(maxsize=None)
def orthonormal_maps(spec: DomainSpec):
    """``(F, F_inv)`` with ``w = F z`` an isometry onto ``C^n`` with the standard norm."""
    chol = np.linalg.cholesky(gram_matrix(spec))
    f = chol.conj().T
    f_inv = np.linalg.inv(f)
    f.setflags(write=False)
    f_inv.setflags(write=False)
    return f, f_inv


def to_orthonormal(op: RealLinearOp):
    """Blocks of ``op`` in Hermitian-orthonormal coordinates."""
    f, f_inv = orthonormal_maps(op.spec)
    return f @ op.linear @ f_inv, f @ op.conj_part @ np.conj(f_inv)


@dataclass(frozen=True)
class IdentityResiduals:
    jordan: float
    fundamental: float
    bergman_q: float

    def max(self) -> float:
        return max(self.jordan, self.fundamental, self.bergman_q)


def identity_residuals(spec: DomainSpec, x, y, u, v, w) -> IdentityResiduals:
    """Max-norm residuals of the Jordan identity and of ``Q(Q(x)y) = Q(x)Q(y)Q(x)``,
    ``Q(B(x,y)u) = B(x,y)Q(u)B(y,x)``."""
    t = functools.partial(triple_product, spec)
    lhs = t(x, y, t(u, v, w)) - t(u, v, t(x, y, w))
    rhs = t(t(x, y, u), v, w) - t(u, t(v, x, y), w)
    jordan = float(np.abs(lhs - rhs).max(initial=0.0))

    qx, qy = q_operator(spec, x), q_operator(spec, y)
    qxy = 0.5 * t(x, y, x)
    fundamental = (q_operator(spec, qxy) - qx @ qy @ qx).max_abs()

    bxy = bergman_operator(spec, x, y)
    bergman_q = (q_operator(spec, bxy(u)) - bxy @ q_operator(spec, u) @ bergman_operator(spec, y, x)).max_abs()
    return IdentityResiduals(jordan, fundamental, bergman_q)
