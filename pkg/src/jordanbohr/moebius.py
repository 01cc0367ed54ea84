"""Quasi-inverse and the transitive automorphisms ``phi_u`` / ``psi_u``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jts_core import (
    DomainError,
    DomainKind,
    DomainSpec,
    RealLinearOp,
    as_element,
    bergman_matrix,
    triple_product,
)
from .spectral import (
    ProjectorFamily,
    bergman_power,
    beta_max_eig,
    op_norm_hermitian,
    peirce_data,
    spectral_norm,
)

COND_MAX = 1e12


def quasi_inverse(spec: DomainSpec, z, u, cond_max: float = COND_MAX) -> np.ndarray:
    """``z^u = B(z,u)^{-1} (z - Q(z)u)``, batched over leading axes of ``z``."""
    z, u = as_element(spec, z), as_element(spec, u)
    b = bergman_matrix(spec, z, u)
    cond = np.linalg.cond(b)
    if np.any(~np.isfinite(cond) | (cond > cond_max)):
        worst = float(np.max(np.where(np.isfinite(cond), cond, np.inf)))
        raise DomainError(
            f"B(z,u) is singular for the pair (z, u) on {spec.name} (condition number {worst:.3g})"
        )
    rhs = z - 0.5 * triple_product(spec, z, u, z)
    return np.linalg.solve(b, rhs[..., None])[..., 0]


def quasi_inverse_derivative(spec: DomainSpec, z, u) -> RealLinearOp:
    """``d(z -> z^u)(z) = B(z,u)^{-1}``."""
    return RealLinearOp.complex_linear(spec, np.linalg.inv(bergman_matrix(spec, z, u)))


@dataclass(frozen=True, eq=False)
class Automorphism:
    """``phi_u`` (``to_origin``) or ``psi_u`` (``from_origin``), optionally twisted.

    A twist ``k`` is applied last for ``to_origin`` (``k o phi_u``) and first
    for ``from_origin`` (``psi_u o k``), so the pair stays mutually inverse when
    the twists are.
    """

    spec: DomainSpec
    base_point: np.ndarray
    direction: str
    linear_twist: RealLinearOp | None
    _b_half: RealLinearOp
    _b_minus_half: RealLinearOp

    def __call__(self, z):
        return apply_automorphism(self, z)

    def inverse(self) -> "Automorphism":
        twist = None if self.linear_twist is None else self.linear_twist.inverse()
        other = "from_origin" if self.direction == "to_origin" else "to_origin"
        return Automorphism(self.spec, self.base_point, other, twist, self._b_half, self._b_minus_half)


def _twist_preserves_norm(spec, k, samples=16, tol=1e-9):
    rng = np.random.default_rng(20090409)
    z = rng.normal(size=(samples, spec.dim)) + 1j * rng.normal(size=(samples, spec.dim))
    before = spectral_norm(spec, z)
    after = spectral_norm(spec, k(z))
    return float(np.max(np.abs(after - before) / before)) <= tol


def make_automorphism(spec: DomainSpec, u, direction: str = "to_origin",
                      linear_twist: RealLinearOp | None = None) -> Automorphism:
    u = as_element(spec, u)
    if direction not in ("to_origin", "from_origin"):
        raise ValueError(f"direction must be 'to_origin' or 'from_origin', got {direction!r}")
    data = peirce_data(spec, u)
    if data[0].norm >= 1.0:
        raise DomainError(f"base point has ||u||_Omega = {data[0].norm:.17g} >= 1")
    if linear_twist is not None:
        if linear_twist.spec != spec:
            raise ValueError("linear twist acts on a different domain")
        if not _twist_preserves_norm(spec, linear_twist):
            raise ValueError("linear twist does not preserve the spectral norm")
    auto = Automorphism(
        spec, u.copy(), direction, linear_twist,
        bergman_power(spec, u, 0.5, data), bergman_power(spec, u, -0.5, data),
    )
    if direction == "to_origin":
        res = np.abs(auto(u)).max()
    else:
        res = np.abs(auto(np.zeros(spec.dim)) - u).max()
    if res > 1e-10:
        raise ArithmeticError(f"automorphism misses its base point by {res:.3g}")
    return auto


def apply_automorphism(auto: Automorphism, z) -> np.ndarray:
    spec = auto.spec
    z = as_element(spec, z)
    nz = spectral_norm(spec, z)
    if np.any(np.asarray(nz) >= 1.0):
        raise DomainError(f"point with ||z||_Omega = {np.max(nz):.17g} lies outside the domain")
    u = auto.base_point
    if auto.direction == "to_origin":
        w = auto._b_minus_half(z - u)
        out = quasi_inverse(spec, w, u)
        return out if auto.linear_twist is None else auto.linear_twist(out)
    if auto.linear_twist is not None:
        z = auto.linear_twist(z)
    return u + auto._b_half(quasi_inverse(spec, z, -u))


def automorphism_derivative(auto: Automorphism, z) -> RealLinearOp:
    """Chain-rule derivative of the automorphism at a single point ``z``."""
    spec = auto.spec
    z = as_element(spec, z)
    if spectral_norm(spec, z) >= 1.0:
        raise DomainError("point lies outside the domain")
    u = auto.base_point
    if auto.direction == "to_origin":
        w = auto._b_minus_half(z - u)
        d = quasi_inverse_derivative(spec, w, u) @ auto._b_minus_half
        return d if auto.linear_twist is None else auto.linear_twist @ d
    zt = z if auto.linear_twist is None else auto.linear_twist(z)
    d = auto._b_half @ quasi_inverse_derivative(spec, zt, -u)
    return d if auto.linear_twist is None else d @ auto.linear_twist


def finite_difference_derivative(spec: DomainSpec, f, z, step: float = 1e-5) -> RealLinearOp:
    """Central differences of ``f`` along every real coordinate direction at ``z``."""
    z = as_element(spec, z)
    n = spec.dim
    dirs = np.concatenate([np.eye(n), 1j * np.eye(n)])
    vals = (f(z + step * dirs) - f(z - step * dirs)) / (2 * step)
    # column k of the realified Jacobian is (Re, Im) of the k-th difference
    jac = np.concatenate([vals.real, vals.imag], axis=1).T
    return RealLinearOp.from_real(spec, jac)


def random_linear_automorphism(spec: DomainSpec, rng) -> RealLinearOp:
    """A random element of the isotropy group acting linearly on ``V``."""
    from .spectral import _random_unitary

    n = spec.dim
    kind = spec.kind
    cols = []
    if kind is DomainKind.POLYDISC:
        perm = rng.permutation(n)
        m = np.zeros((n, n), dtype=complex)
        m[perm, np.arange(n)] = np.exp(2j * np.pi * rng.random(n))
        return RealLinearOp.complex_linear(spec, m)
    if kind is DomainKind.TYPE_IV:
        o, _ = np.linalg.qr(rng.normal(size=(n, n)))
        return RealLinearOp.complex_linear(spec, np.exp(2j * np.pi * rng.random()) * o)
    if kind is DomainKind.HERMITIAN_BALL:
        return RealLinearOp.complex_linear(spec, _random_unitary(rng, n, 1)[0])
    e = np.eye(n, dtype=complex)
    if kind is DomainKind.TYPE_I:
        p, q = spec.dims
        a, b = _random_unitary(rng, p, 1)[0], _random_unitary(rng, q, 1)[0]
        cols = [spec.from_matrix(a @ spec.to_matrix(v) @ b) for v in e]
    else:
        a = _random_unitary(rng, spec.dims[0], 1)[0]
        cols = [spec.from_matrix(a @ spec.to_matrix(v) @ a.T) for v in e]
    return RealLinearOp.complex_linear(spec, np.array(cols).T)


@dataclass(frozen=True)
class DerivativeNorms:
    """Closed forms for ``||d phi(u)||``, ``||d phi(u) u||`` and ``||d phi(u)^{-1}||``
    (spectral operator norms), with brackets from direct evaluation."""

    dphi_norm: float
    dphi_u_image_norm: float
    inverse_norm: float
    dphi_norm_bracket: tuple
    dphi_u_image_direct: float
    inverse_norm_bracket: tuple

    def max_deviation(self) -> float:
        devs = [abs(self.dphi_u_image_direct - self.dphi_u_image_norm)]
        devs += [abs(v - self.dphi_norm) for v in self.dphi_norm_bracket]
        devs += [abs(v - self.inverse_norm) for v in self.inverse_norm_bracket]
        return max(devs)


def peirce_lower_bound(spec: DomainSpec, op: RealLinearOp, family: ProjectorFamily) -> float:
    """``max ||op v||_Omega / ||v||_Omega`` over frame-adapted test vectors.

    Exact for operators diagonal in the Peirce decomposition (e.g. ``B(u,u)^t``):
    every nonzero ``p_ij`` image is an eigenvector.
    """
    cands = list(family.frame) + [np.sum(family.frame, axis=0)]
    probe = np.eye(spec.dim, dtype=complex) + 0.37j * np.roll(np.eye(spec.dim), 1, axis=1)
    for p in family.projectors.values():
        imgs = p(probe)
        k = int(np.argmax(np.linalg.norm(imgs, axis=1)))
        if np.linalg.norm(imgs[k]) > 1e-8:
            cands.append(imgs[k])
    cands = np.array(cands)
    return float(np.max(spectral_norm(spec, op(cands)) / spectral_norm(spec, cands)))


def derivative_norms(spec: DomainSpec, u) -> DerivativeNorms:
    u = as_element(spec, u)
    sd, family = data = peirce_data(spec, u)
    n = sd.norm
    if n >= 1.0:
        raise DomainError(f"||u||_Omega = {n:.17g} >= 1")
    b_mh = bergman_power(spec, u, -0.5, data)
    b_h = bergman_power(spec, u, 0.5, data)
    beta = beta_max_eig(spec, u)
    return DerivativeNorms(
        dphi_norm=1.0 / (1.0 - n * n),
        dphi_u_image_norm=n / (1.0 - n * n),
        inverse_norm=float(np.sqrt(beta)),
        dphi_norm_bracket=(peirce_lower_bound(spec, b_mh, family), op_norm_hermitian(b_mh)),
        dphi_u_image_direct=float(spectral_norm(spec, b_mh(u))),
        inverse_norm_bracket=(peirce_lower_bound(spec, b_h, family), op_norm_hermitian(b_h)),
    )
