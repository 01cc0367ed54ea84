"""Spectral decomposition, Peirce projectors and operator norms.

Frames are built per domain kind (SVD, Takagi-type and antisymmetric
canonical forms, closed forms for the spin factor and the polydisc); every
quantity downstream of a frame only goes through the generic triple product.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .jts_core import (
    DomainError,
    DomainKind,
    DomainSpec,
    RealLinearOp,
    as_element,
    d_matrix,
    d_operator,
    orthonormal_maps,
    q_operator,
    to_orthonormal,
    triple_product,
)

MERGE_TOL = 1e-10
SNAP_TOL = 1e-8
FRAME_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """``x = sum values[i] * tripotents[i]`` with strictly decreasing positive values.

    ``frame`` is a full frame of primitive tripotents with ``frame_values``
    (zeros for the completed part), so ``x = sum frame_values[k] * frame[k]``.
    """

    spec: DomainSpec
    tripotents: tuple
    values: tuple
    frame: tuple
    frame_values: tuple
    merged_tolerance: float = MERGE_TOL

    @property
    def norm(self) -> float:
        return self.values[0] if self.values else 0.0

    @property
    def is_regular(self) -> bool:
        return len(self.values) == self.spec.rank

    def reconstruct(self) -> np.ndarray:
        out = np.zeros(self.spec.dim, dtype=complex)
        for lam, c in zip(self.values, self.tripotents):
            out += lam * c
        return out

    def maximal_tripotent(self) -> np.ndarray:
        return np.sum(self.frame, axis=0)


def _outer_frame(spec, left, right, values):
    frame = [spec.from_matrix(np.outer(left[:, i], right[i, :])) for i in range(len(values))]
    return frame, [float(v) for v in values]


def _complement(vectors, n):
    """Orthonormal basis of the orthogonal complement of ``vectors`` in ``C^n``."""
    if not vectors:
        return list(np.eye(n, dtype=complex))
    # rows conj(v): the null space is Hermitian-orthogonal to every v
    m = np.conj(np.array(vectors))
    _, _, vh = np.linalg.svd(m, full_matrices=True)
    return [vh[i].conj() for i in range(len(vectors), n)]


def _takagi_frame(a):
    n = a.shape[0]
    scale = np.linalg.norm(a, 2)
    rest = a.copy()
    us, vals = [], []
    for _ in range(n):
        u_, s, _ = np.linalg.svd(rest)
        sig = s[0]
        if scale == 0.0 or sig <= 1e-14 * scale:
            break
        v = u_[:, 0]
        w = rest @ v.conj() / sig
        # both candidates satisfy rest @ conj(u) = sig * u; keep the better-conditioned one
        c1, c2 = v + w, 1j * (v - w)
        u = c1 if np.linalg.norm(c1) >= np.linalg.norm(c2) else c2
        u = u / np.linalg.norm(u)
        for prev in us:
            u = u - np.vdot(prev, u) * prev
        u = u / np.linalg.norm(u)
        rest = rest - sig * np.outer(u, u)
        rest = 0.5 * (rest + rest.T)
        us.append(u)
        vals.append(float(sig))
    for u in _complement(us, n):
        us.append(u)
        vals.append(0.0)
    return [np.outer(u, u) for u in us], vals


def _antisymmetric_frame(a):
    n = a.shape[0]
    scale = np.linalg.norm(a, 2)
    rest = a.copy()
    vecs, tris, vals = [], [], []
    for _ in range(n // 2):
        u_, s, _ = np.linalg.svd(rest)
        sig = s[0]
        if scale == 0.0 or sig <= 1e-14 * scale:
            break
        u1 = u_[:, 0]
        for prev in vecs:
            u1 = u1 - np.vdot(prev, u1) * prev
        u1 = u1 / np.linalg.norm(u1)
        u2 = -(rest @ u1.conj()) / sig
        for prev in vecs + [u1]:
            u2 = u2 - np.vdot(prev, u2) * prev
        u2 = u2 / np.linalg.norm(u2)
        c = np.outer(u1, u2) - np.outer(u2, u1)
        rest = rest - sig * c
        rest = 0.5 * (rest - rest.T)
        vecs += [u1, u2]
        tris.append(c)
        vals.append(float(sig))
    comp = _complement(vecs, n)
    for i in range(0, len(comp) - 1, 2):
        u1, u2 = comp[i], comp[i + 1]
        tris.append(np.outer(u1, u2) - np.outer(u2, u1))
        vals.append(0.0)
    return tris, vals


def _spin_frame(x):
    n = x.shape[0]
    if n == 1:
        mod = abs(x[0])
        return [np.array([x[0] / mod if mod > 0 else 1.0 + 0j])], [float(mod)]
    qv = np.sum(x * x)
    phase = np.exp(0.5j * np.angle(qv)) if abs(qv) > 0 else 1.0
    y = x / phase
    a, b = y.real, y.imag
    na = np.linalg.norm(a)
    if na <= 1e-300:
        ahat = np.eye(n)[0]
    else:
        ahat = a / na
    b = b - np.dot(b, ahat) * ahat
    nb = np.linalg.norm(b)
    if nb <= 1e-15 * max(na, 1e-300):
        # any real unit vector orthogonal to ahat completes the frame
        k = int(np.argmin(np.abs(ahat)))
        bhat = np.eye(n)[k] - ahat[k] * ahat
        bhat = bhat / np.linalg.norm(bhat)
        nb = 0.0
    else:
        bhat = b / nb
    c1 = phase * (ahat + 1j * bhat) / 2
    c2 = phase * (ahat - 1j * bhat) / 2
    return [c1, c2], [float(na + nb), float(max(na - nb, 0.0))]


def _polydisc_frame(x):
    mods = np.abs(x)
    order = np.argsort(-mods, kind="stable")
    frame, vals = [], []
    for j in order:
        e = np.zeros(x.shape[0], dtype=complex)
        e[j] = x[j] / mods[j] if mods[j] > 0 else 1.0
        frame.append(e)
        vals.append(float(mods[j]))
    return frame, vals


def _frame_of(spec: DomainSpec, x):
    kind = spec.kind
    if kind in (DomainKind.TYPE_I, DomainKind.HERMITIAN_BALL):
        u, s, vh = np.linalg.svd(spec.to_matrix(x), full_matrices=False)
        return _outer_frame(spec, u, vh, s)
    if kind is DomainKind.TYPE_III:
        mats, vals = _takagi_frame(spec.to_matrix(x))
        return [spec.from_matrix(m) for m in mats], vals
    if kind is DomainKind.TYPE_II:
        mats, vals = _antisymmetric_frame(spec.to_matrix(x))
        return [spec.from_matrix(m) for m in mats], vals
    if kind is DomainKind.TYPE_IV:
        return _spin_frame(x)
    if kind is DomainKind.POLYDISC:
        return _polydisc_frame(x)
    raise NotImplementedError(f"spectral decomposition unavailable for kind {getattr(kind, 'value', kind)!r}")


def spectral_decompose(spec: DomainSpec, x, merge_tol: float = MERGE_TOL) -> SpectralDecomposition:
    """Spectral decomposition of a single element ``x``.

    Frame values whose relative gap is below ``merge_tol`` are merged into one
    spectral value; the corresponding tripotents are summed.
    """
    x = as_element(spec, x)
    if x.ndim != 1:
        raise ValueError("spectral_decompose takes a single element")
    frame, fvals = _frame_of(spec, x)
    order = np.argsort(-np.asarray(fvals), kind="stable")
    frame = [frame[i] for i in order]
    fvals = [fvals[i] for i in order]

    top = fvals[0] if fvals else 0.0
    tris, vals, counts = [], [], []
    for lam, e in zip(fvals, frame):
        if top == 0.0 or lam <= merge_tol * top:
            break
        if vals and vals[-1] - lam <= merge_tol * top:
            counts[-1] += 1
            vals[-1] += (lam - vals[-1]) / counts[-1]
            tris[-1] = tris[-1] + e
        else:
            tris.append(e.copy())
            vals.append(lam)
            counts.append(1)
    return SpectralDecomposition(
        spec, tuple(tris), tuple(float(v) for v in vals), tuple(frame), tuple(fvals), merge_tol
    )


def spectral_norm(spec: DomainSpec, x):
    """``||x||_Omega``; broadcasts over leading axes."""
    x = as_element(spec, x)
    kind = spec.kind
    if kind is DomainKind.POLYDISC:
        out = np.abs(x).max(axis=-1)
    elif kind is DomainKind.TYPE_IV:
        if spec.dim == 1:
            out = np.abs(x[..., 0])
        else:
            # rotate so q(y) >= 0, then lambda_1 = |Re y| + |Im y projected off Re y|;
            # stable where sqrt(s + sqrt(s^2 - |q|^2)) loses half the digits
            m = np.abs(x).max(axis=-1)
            safe = np.where(m > 0, m, 1.0)
            y = x / safe[..., None]
            phase = np.exp(-0.5j * np.angle(np.sum(y * y, axis=-1)))
            y = y * phase[..., None]
            a, b = y.real, y.imag
            na = np.linalg.norm(a, axis=-1)
            ahat = a / np.where(na > 0, na, 1.0)[..., None]
            b = b - np.sum(b * ahat, axis=-1)[..., None] * ahat
            out = m * (na + np.linalg.norm(b, axis=-1))
    elif kind is DomainKind.HERMITIAN_BALL:
        m = np.abs(x).max(axis=-1)
        safe = np.where(m > 0, m, 1.0)
        out = m * np.linalg.norm(x / safe[..., None], axis=-1)
    else:
        out = np.linalg.norm(spec.to_matrix(x), ord=2, axis=(-2, -1))
    return float(out) if np.ndim(out) == 0 else out


def op_norm_hermitian(op: RealLinearOp) -> float:
    """Operator norm of an R-linear map for the Hermitian norm ``||z||^2 = tr D(z,z)``."""
    a, c = to_orthonormal(op)
    real = RealLinearOp(op.spec, a, c).realify()
    return float(np.linalg.norm(real, 2))


def spectral_norm_via_q(spec: DomainSpec, x) -> float:
    """``sqrt(||Q(x)||)``: the operator route to the spectral norm."""
    return float(np.sqrt(op_norm_hermitian(q_operator(spec, x))))


@dataclass(frozen=True, eq=False)
class ProjectorFamily:
    spec: DomainSpec
    frame: tuple
    projectors: dict = field(default_factory=dict)

    def combine(self, weights) -> RealLinearOp:
        """``sum weights[(i, j)] * p_ij`` as one operator."""
        n = self.spec.dim
        lin = np.zeros((n, n), dtype=complex)
        for key, w in weights.items():
            lin += w * self.projectors[key].linear
        return RealLinearOp.complex_linear(self.spec, lin)

    def subspace_dims(self) -> dict:
        return {k: int(round(np.trace(p.linear).real)) for k, p in self.projectors.items()}


def check_frame(spec: DomainSpec, frame, tol: float = FRAME_TOL) -> None:
    """Raise ``ValueError`` unless ``frame`` is ``rank`` orthogonal primitive tripotents."""
    if len(frame) != spec.rank:
        raise ValueError(f"a frame of {spec.name} has {spec.rank} elements, got {len(frame)}")
    for k, e in enumerate(frame):
        e = as_element(spec, e)
        res = np.abs(triple_product(spec, e, e, e) - 2 * e).max()
        if res > tol:
            raise ValueError(f"frame element {k} is not a tripotent (residual {res:.3g})")
        for m in range(k):
            res = np.abs(d_matrix(spec, e, frame[m])).max()
            if res > tol:
                raise ValueError(f"frame elements {m} and {k} are not orthogonal (residual {res:.3g})")


def _eigen_projectors(spec, dk, k):
    f, f_inv = orthonormal_maps(spec)
    h = f @ dk @ f_inv
    h = 0.5 * (h + h.conj().T)
    w, v = np.linalg.eigh(h)
    snapped = np.rint(w)
    bad = (np.abs(w - snapped) > SNAP_TOL) | (snapped < 0) | (snapped > 2)
    if bad.any():
        raise ValueError(f"D(e_{k},e_{k}) has eigenvalue {w[bad][0]:.6g} outside {{0,1,2}}; not a frame")
    if np.count_nonzero(snapped == 2) != 1:
        raise ValueError(f"frame element {k} is not a primitive tripotent")
    out = {}
    for mu in (0, 1, 2):
        sel = v[:, snapped == mu]
        out[mu] = f_inv @ (sel @ sel.conj().T) @ f
    return out


def peirce_projectors(spec: DomainSpec, frame) -> ProjectorFamily:
    """Joint Peirce projectors ``p_ij`` (``0 <= i <= j <= r``) of a frame."""
    frame = tuple(as_element(spec, e) for e in frame)
    check_frame(spec, frame)
    r = spec.rank
    eig = [_eigen_projectors(spec, d_matrix(spec, e, e), k + 1) for k, e in enumerate(frame)]
    projectors = {}
    for i in range(r + 1):
        for j in range(i, r + 1):
            p = np.eye(spec.dim, dtype=complex)
            for k in range(1, r + 1):
                p = p @ eig[k - 1][(k == i) + (k == j)]
            projectors[(i, j)] = RealLinearOp.complex_linear(spec, p)
    return ProjectorFamily(spec, frame, projectors)


def peirce_data(spec: DomainSpec, u):
    """Spectral decomposition of ``u`` with the Peirce family of its frame."""
    sd = spectral_decompose(spec, u)
    return sd, peirce_projectors(spec, sd.frame)


def frame_function_operator(family: ProjectorFamily, frame_values, fn) -> RealLinearOp:
    """``sum fn(lambda_i) fn(lambda_j) p_ij`` with ``lambda_0 = 0``."""
    lam = [0.0] + [float(v) for v in frame_values]
    g = [fn(v) for v in lam]
    return family.combine({(i, j): g[i] * g[j] for (i, j) in family.projectors})


def bergman_power(spec: DomainSpec, u, t: float, data=None) -> RealLinearOp:
    """``B(u,u)^t`` through the Peirce decomposition of ``u``'s frame."""
    sd, family = data if data is not None else peirce_data(spec, u)
    if sd.norm >= 1.0:
        raise DomainError(f"||u||_Omega = {sd.norm:.17g} >= 1: B(u,u)^t undefined")
    return frame_function_operator(family, sd.frame_values, lambda v: (1.0 - v * v) ** t)


def bergman_power_eig(spec: DomainSpec, u, t: float) -> RealLinearOp:
    """Oracle for :func:`bergman_power`: Hermitian eigendecomposition of ``B(u,u)``."""
    from .jts_core import bergman_matrix

    f, f_inv = orthonormal_maps(spec)
    h = f @ bergman_matrix(spec, u, u) @ f_inv
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    if w.min() <= 0:
        raise DomainError("B(u,u) is not positive definite")
    return RealLinearOp.complex_linear(spec, f_inv @ (v * w**t) @ v.conj().T @ f)


def _beta_formula(spec: DomainSpec, sd: SpectralDecomposition) -> float:
    n2 = sd.norm ** 2
    lam_r = sd.frame_values[-1]
    if spec.dim == 1:
        return (1.0 - n2) ** 2
    if spec.rank == 1:
        return 1.0 - n2
    if spec.tube:
        return (1.0 - lam_r ** 2) ** 2
    return 1.0 - lam_r ** 2


def beta_numeric(spec: DomainSpec, u) -> float:
    """Largest eigenvalue of the assembled ``B(u,u)``."""
    from .jts_core import bergman_matrix

    f, f_inv = orthonormal_maps(spec)
    h = f @ bergman_matrix(spec, u, u) @ f_inv
    return float(np.linalg.eigvalsh(0.5 * (h + h.conj().T)).max())


def beta_max_eig(spec: DomainSpec, u, agree_tol: float = 1e-10) -> float:
    """Greatest eigenvalue of ``B(u,u)`` from the rank/tube case formula,
    checked against the eigenvalues of the assembled operator."""
    sd = spectral_decompose(spec, u)
    if sd.norm >= 1.0:
        raise DomainError(f"||u||_Omega = {sd.norm:.17g} >= 1")
    formula = _beta_formula(spec, sd)
    numeric = beta_numeric(spec, u)
    if abs(formula - numeric) > agree_tol:
        raise ArithmeticError(
            f"beta(u) case formula {formula!r} disagrees with eigenvalue {numeric!r} on {spec.name}"
        )
    return formula


# -- sampled operator norm for the spectral norm -----------------------------

def _random_unitary(rng, n, size):
    z = rng.normal(size=(size, n, n)) + 1j * rng.normal(size=(size, n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


def random_maximal_tripotents(spec: DomainSpec, count: int, rng) -> np.ndarray:
    """``count`` random maximal tripotents (points with all spectral values 1)."""
    kind = spec.kind
    if kind is DomainKind.POLYDISC:
        return np.exp(2j * np.pi * rng.random((count, spec.dim)))
    if kind is DomainKind.HERMITIAN_BALL:
        z = rng.normal(size=(count, spec.dim)) + 1j * rng.normal(size=(count, spec.dim))
        return z / np.linalg.norm(z, axis=-1, keepdims=True)
    if kind is DomainKind.TYPE_IV:
        x = rng.normal(size=(count, spec.dim))
        x /= np.linalg.norm(x, axis=-1, keepdims=True)
        return x * np.exp(2j * np.pi * rng.random((count, 1)))
    if kind is DomainKind.TYPE_I:
        p, q = spec.dims
        r = spec.rank
        u = _random_unitary(rng, p, count)[:, :, :r]
        w = _random_unitary(rng, q, count)[:, :, :r]
        return spec.from_matrix(u @ np.conj(np.swapaxes(w, -1, -2)))
    n = spec.dims[0]
    u = _random_unitary(rng, n, count)
    if kind is DomainKind.TYPE_III:
        return spec.from_matrix(u @ np.swapaxes(u, -1, -2))
    j = np.zeros((n, n))
    for i in range(n // 2):
        j[2 * i, 2 * i + 1], j[2 * i + 1, 2 * i] = 1.0, -1.0
    return spec.from_matrix(u @ j @ np.swapaxes(u, -1, -2))


def _real_adjoint(op: RealLinearOp) -> RealLinearOp:
    """Adjoint for the real inner product ``Re(x|y)``."""
    a, c = to_orthonormal(op)
    f, f_inv = orthonormal_maps(op.spec)
    # in orthonormal coordinates the adjoint of (A, C) is (A^H, C^T)
    return RealLinearOp(op.spec, f_inv @ a.conj().T @ f, f_inv @ c.T @ np.conj(f))


@dataclass(frozen=True)
class NormEstimate:
    value: float
    budget: int
    refine_steps: int


def op_norm_spectral(spec: DomainSpec, op: RealLinearOp, budget: int = 4096,
                     refine_steps: int = 200, rng=None, starts: int = 4,
                     details: bool = False):
    """Lower estimate of ``sup ||op z||_Omega`` over ``||z||_Omega = 1``.

    ``budget`` random maximal tripotents are scored; the best ``starts`` are
    refined by support-point ascent (each step jumps to the maximal tripotent
    that maximizes the linearized objective, so the value never decreases).
    Steps are spent by successive halving: every live start gets a short burst,
    the worse half is dropped, and the survivor uses the remaining steps.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    cands = random_maximal_tripotents(spec, budget, rng)
    scores = spectral_norm(spec, op(cands))
    adj = _real_adjoint(op)

    def ascend(z, val, steps):
        for _ in range(steps):
            sd = spectral_decompose(spec, op(z))
            if not sd.tripotents:
                return z, val, True
            z_new = spectral_decompose(spec, adj(sd.tripotents[0])).maximal_tripotent()
            new = float(spectral_norm(spec, op(z_new)))
            if new <= val * (1 + 1e-15):
                return z, val, True
            z, val = z_new, new
        return z, val, False

    live = [(cands[i], float(scores[i]), False) for i in np.argsort(-scores)[:max(1, starts)]]
    best = float(np.max(scores))
    steps_left = refine_steps
    burst = max(1, refine_steps // (4 * len(live)))
    while steps_left > 0 and not all(done for _, _, done in live):
        nxt = []
        for z, val, done in live:
            if not done and steps_left > 0:
                n = steps_left if len(live) == 1 else min(burst, steps_left)
                steps_left -= n
                z, val, done = ascend(z, val, n)
            nxt.append((z, val, done))
        nxt.sort(key=lambda t: -t[1])
        best = max(best, nxt[0][1])
        live = nxt[: max(1, len(nxt) // 2)]
    if details:
        return NormEstimate(best, budget, refine_steps)
    return best
