"""Validated dense quantum-state types and the matrix kernels beneath them.

Everything here is dense complex128.  Objects are immutable: arrays are
copied on construction and flagged read-only, and the eigendecomposition
of a :class:`HermitianOperator` is computed once, under a lock, on first
use.
"""
from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidDensityMatrix,
    NonHermitianInput,
    UndeclaredFactorization,
)

log = logging.getLogger(__name__)

TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-9
TOL_RECON = 1e-10
TOL_IMAG = 1e-10


def _frozen(a, dtype=np.complex128):
    arr = np.array(a, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


def dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def hermiticity_residual(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a - dagger(a)))) if a.size else 0.0


@dataclass(frozen=True)
class HilbertSpace:
    """A finite Hilbert space, optionally declared as a tensor product.

    ``factors`` lists the dimensions of the tensor factors (leftmost factor
    first, matching ``np.kron`` ordering); their product must equal
    ``dimension``.
    """

    dimension: int
    labels: tuple[str, ...] | None = None
    factors: tuple[int, ...] | None = None

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dimension!r}")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != self.dimension:
                raise ValueError("number of labels must equal the dimension")
        if self.factors is not None:
            object.__setattr__(self, "factors", tuple(int(f) for f in self.factors))
            if int(np.prod(self.factors)) != self.dimension:
                raise ValueError("factor dimensions do not multiply to the dimension")

    @classmethod
    def product(cls, *spaces: "HilbertSpace") -> "HilbertSpace":
        dims = []
        for s in spaces:
            dims.extend(s.factors if s.factors else (s.dimension,))
        labels = None
        if all(s.labels for s in spaces):
            labels = [""]
            for s in spaces:
                labels = [a + b for a in labels for b in s.labels]
        return cls(int(np.prod(dims)), labels, tuple(dims))

    def index(self, label: str) -> int:
        if self.labels is None:
            raise KeyError("space has no labels")
        return self.labels.index(label)


def _space_for(data, space):
    if space is None:
        return HilbertSpace(data.shape[0])
    if space.dimension != data.shape[0]:
        raise DimensionMismatch(f"matrix is {data.shape[0]}-dimensional, space is {space.dimension}")
    return space


def _square(data):
    data = np.asarray(data)
    if data.ndim != 2 or data.shape[0] != data.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {data.shape}")
    return data


class HermitianOperator:
    """Hermitian matrix with a cached eigendecomposition."""

    def __init__(self, data, space: HilbertSpace | None = None, tol: float = TOL_HERM):
        data = _square(data)
        res = hermiticity_residual(data)
        if res > tol:
            raise NonHermitianInput(f"operator is not Hermitian: max|A - A^dag| = {res:.3e}")
        data = 0.5 * (data + dagger(data))
        self._data = _frozen(data)
        self.space = _space_for(self._data, space)
        self._eig = None
        self._lock = threading.Lock()

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dim(self) -> int:
        return self.space.dimension

    def eigh(self):
        if self._eig is None:
            with self._lock:
                if self._eig is None:
                    w, v = np.linalg.eigh(self._data)
                    self._eig = (_frozen(w, np.float64), _frozen(v))
        return self._eig

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eigh()[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.eigh()[1]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._data, dtype=dtype)

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim})"


def as_hermitian(op, space=None) -> HermitianOperator:
    if isinstance(op, HermitianOperator):
        return op
    return HermitianOperator(op, space)


def hermitian_eigendecompose(op) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and a unitary matrix of eigenvectors.

    Raises :class:`NonHermitianInput` for a non-Hermitian matrix.
    """
    return as_hermitian(op).eigh()


class DensityMatrix:
    """Unit-trace positive semidefinite matrix.

    Constructors reject violations instead of normalising.  Eigenvalues in
    ``[-TOL_PSD, 0)`` (integration dust) are accepted; the most negative
    one is kept in :attr:`psd_dust`.
    """

    def __init__(self, data, space: HilbertSpace | None = None, *,
                 tol_herm=TOL_HERM, tol_trace=TOL_TRACE, tol_psd=TOL_PSD):
        data = _square(data)
        res = hermiticity_residual(data)
        if res > tol_herm:
            raise InvalidDensityMatrix(f"not Hermitian (residual {res:.3e})")
        data = 0.5 * (data + dagger(data))
        tr = np.trace(data).real
        if abs(tr - 1.0) > tol_trace:
            raise InvalidDensityMatrix(f"trace is {tr!r}, expected 1")
        lam_min = float(np.linalg.eigvalsh(data)[0])
        if lam_min < -tol_psd:
            raise InvalidDensityMatrix(f"smallest eigenvalue {lam_min:.3e} below -{tol_psd:g}")
        self.psd_dust = min(lam_min, 0.0)
        if self.psd_dust < 0:
            log.debug("density matrix accepted with eigenvalue %.3e", lam_min)
        self._data = _frozen(data)
        self.space = _space_for(self._data, space)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dim(self) -> int:
        return self.space.dimension

    @classmethod
    def from_pure(cls, psi, space=None) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=np.complex128).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), space)

    @classmethod
    def maximally_mixed(cls, dim, space=None) -> "DensityMatrix":
        return cls(np.eye(dim) / dim, space)

    def with_space(self, space: HilbertSpace) -> "DensityMatrix":
        return DensityMatrix(self._data, space)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._data, dtype=dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


def _raw(x):
    if isinstance(x, (DensityMatrix, HermitianOperator)):
        return x.data
    return np.asarray(x)


def expectation(op, rho) -> complex:
    """``Tr(op rho)``."""
    a, r = _raw(op), _raw(rho)
    if a.shape != r.shape:
        raise DimensionMismatch(f"operator {a.shape} vs state {r.shape}")
    # Tr(AB) = sum_ij A_ij B_ji
    return complex(np.sum(a * r.T))


def real_expectation(op, rho, tol=TOL_IMAG) -> float:
    """Expectation of an operator that is Hermitian by construction."""
    val = expectation(op, rho)
    if abs(val.imag) > tol * max(1.0, abs(val.real)):
        raise NumericalImaginaryPart(val)
    return val.real


class NumericalImaginaryPart(InvalidDensityMatrix):
    def __init__(self, value):
        super().__init__(f"expectation of a Hermitian operator has imaginary part {value.imag:.3e}")


def tensor_product(*mats):
    """Kronecker product, leftmost factor first."""
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, _raw(m))
    return out


def partial_trace(rho, keep, dims: Sequence[int] | None = None) -> DensityMatrix:
    """Reduce a state on a declared product space.

    ``keep`` is a factor index or a sequence of them; ``"A"``/``"B"`` are
    accepted for bipartite spaces.  ``dims`` overrides the factorisation
    declared on ``rho.space``.
    """
    data = _raw(rho)
    if dims is None:
        space = getattr(rho, "space", None)
        dims = space.factors if space is not None else None
    if not dims:
        raise UndeclaredFactorization("state has no declared tensor factorisation")
    dims = tuple(int(d) for d in dims)
    if int(np.prod(dims)) != data.shape[0]:
        raise UndeclaredFactorization("declared factors do not match the state dimension")
    if isinstance(keep, str):
        keep = {"A": 0, "B": 1}[keep.upper()]
    keep = [keep] if np.isscalar(keep) else list(keep)
    n = len(dims)
    t = data.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # contract traced ket/bra indices pairwise, highest first so axes stay valid
    for i in sorted(traced, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + t.ndim // 2)
    kd = int(np.prod([dims[i] for i in keep]))
    reduced = t.reshape(kd, kd)
    return DensityMatrix(reduced, HilbertSpace(kd, factors=tuple(dims[i] for i in keep) if len(keep) > 1 else None))


# -- JSON matrix format ---------------------------------------------------

def matrix_to_json(m) -> dict:
    m = _raw(m)
    return {
        "dim": int(m.shape[0]),
        "re": [float(x) for x in np.real(m).ravel()],
        "im": [float(x) for x in np.imag(m).ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    d = int(obj["dim"])
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float)
    if re.size != d * d or im.size != d * d:
        raise DimensionMismatch("matrix payload size does not match dim")
    return (re + 1j * im).reshape(d, d)


# -- a few standard operators --------------------------------------------

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)  # |g><e| with basis (g, e)
SIGMA_PLUS = SIGMA_MINUS.T.copy()
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=np.complex128)  # +1 on |e>


def embed(op, site: int, n_sites: int, local_dim: int = 2):
    """``op`` acting on one site of an ``n_sites`` register."""
    eye = np.eye(local_dim, dtype=np.complex128)
    return tensor_product(*[op if k == site else eye for k in range(n_sites)])


def random_hermitian(dim, rng, scale=1.0):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (a + dagger(a))


def random_density_matrix(dim, rng, rank=None):
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real
