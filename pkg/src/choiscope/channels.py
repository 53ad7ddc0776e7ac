"""Quantum channels in Kraus, Liouville and Choi (dynamical-matrix) form.

A channel ``rho -> sum_j G_j rho G_j^dag`` from a ``d_in``- to a
``d_out``-dimensional system is carried by its Liouville matrix ``L``
(``vec(sigma) = L vec(rho)``, shape ``d_out^2 x d_in^2``) as the
canonical representation.  The dynamical matrix is the realignment
``D = R(L)``, a ``(d_out * d_in)``-square bipartite operator with the
output system as party A and the input system as party B.  ``D`` is kept
unnormalized: ``Tr D = d_in`` for trace-preserving maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, NotCompletelyPositive, ShapeMismatch
from .numerics import (DEFAULT_TOL, Tolerance, as_matrix, eig_hermitian,
                       hs_inner)
from .reshape import (BipartiteShape, devectorize, middle_swap,
                      partial_trace_A, partial_trace_B, realign, swap_operator,
                      tensor, vectorize)


def _liouville_choi_permute(M: np.ndarray, d_in: int, d_out: int,
                            to_choi: bool) -> np.ndarray:
    """The L <-> D index permutation D[u*dout+m, v*dout+n] = L[n*dout+m, v*din+u]."""
    if to_choi:
        four = M.reshape(d_out, d_out, d_in, d_in)  # (n, m, v, u)
        return four.transpose(3, 1, 2, 0).reshape(d_out * d_in, d_out * d_in)
    four = M.reshape(d_in, d_out, d_in, d_out)  # (u, m, v, n)
    return four.transpose(3, 1, 2, 0).reshape(d_out ** 2, d_in ** 2)


def kraus_to_liouville(operators: Sequence[np.ndarray]) -> np.ndarray:
    """L = sum_j G_j (x) G_j^* (type-I tensor)."""
    ops = [as_matrix(G) for G in operators]
    if not ops:
        raise ShapeMismatch("empty Kraus set")
    if any(G.shape != ops[0].shape for G in ops):
        raise ShapeMismatch("Kraus operators differ in shape")
    d_out, d_in = ops[0].shape
    L = np.zeros((d_out ** 2, d_in ** 2), dtype=complex)
    for G in ops:
        L += tensor(G, G.conj())
    return L


def liouville_to_choi(L: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    L = as_matrix(L)
    if L.shape != (d_out ** 2, d_in ** 2):
        raise ShapeMismatch(f"Liouville matrix is {L.shape}, expected {(d_out ** 2, d_in ** 2)}")
    return _liouville_choi_permute(L, d_in, d_out, to_choi=True)


def choi_to_liouville(D: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    D = as_matrix(D)
    n = d_out * d_in
    if D.shape != (n, n):
        raise ShapeMismatch(f"Choi matrix is {D.shape}, expected {(n, n)}")
    return _liouville_choi_permute(D, d_in, d_out, to_choi=False)


def choi_to_kraus(D: np.ndarray, d_in: int, d_out: int,
                  tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """Kraus operators from the eigendecomposition of a PSD Choi matrix.

    Eigenvalues in [-atol, atol] are discarded; anything below -atol means
    the map is not CP and raises.
    """
    w, V = eig_hermitian(D, tol)
    if w[0] < -tol.atol:
        raise NotCompletelyPositive(f"Choi matrix has eigenvalue {w[0]:.3e} < -atol")
    ops = []
    for k in range(w.size - 1, -1, -1):
        if w[k] > tol.atol:
            ops.append(devectorize(np.sqrt(w[k]) * V[:, k], d_out, d_in))
    if not ops:
        ops.append(np.zeros((d_out, d_in), dtype=complex))
    return ops


@dataclass(frozen=True)
class Channel:
    """A linear map on states, canonically stored as its Liouville matrix.

    The Choi matrix is computed eagerly so instances are immutable and
    freely shareable.  ``kraus`` is kept when the channel was built from
    (or converted to) an operator-sum form.
    """

    liouville: np.ndarray
    d_in: int
    d_out: int
    choi: np.ndarray
    kraus: Optional[tuple] = None

    @classmethod
    def from_liouville(cls, L, d_in: int, d_out: int) -> "Channel":
        L = as_matrix(L)
        return cls(L, d_in, d_out, liouville_to_choi(L, d_in, d_out))

    @classmethod
    def from_kraus(cls, operators: Sequence[np.ndarray], d_in: int = 0,
                   d_out: int = 0) -> "Channel":
        ops = tuple(as_matrix(G) for G in operators)
        L = kraus_to_liouville(ops)
        shape_out, shape_in = ops[0].shape
        if (d_in and d_in != shape_in) or (d_out and d_out != shape_out):
            raise DimensionMismatch(
                f"Kraus operators are {ops[0].shape}, expected "
                f"({d_out or shape_out}, {d_in or shape_in})")
        return cls(L, shape_in, shape_out,
                   liouville_to_choi(L, shape_in, shape_out), kraus=ops)

    @classmethod
    def from_choi(cls, D, d_in: int, d_out: int) -> "Channel":
        D = as_matrix(D)
        return cls(choi_to_liouville(D, d_in, d_out), d_in, d_out, D)

    @property
    def choi_shape(self) -> BipartiteShape:
        """Bipartite shape of the Choi matrix: A = output, B = input."""
        return BipartiteShape(self.d_out, self.d_in)

    def kraus_operators(self, tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
        if self.kraus is not None:
            return list(self.kraus)
        return choi_to_kraus(self.choi, self.d_in, self.d_out, tol)

    def with_kraus(self, tol: Tolerance = DEFAULT_TOL) -> "Channel":
        if self.kraus is not None:
            return self
        return Channel(self.liouville, self.d_in, self.d_out, self.choi,
                       kraus=tuple(choi_to_kraus(self.choi, self.d_in, self.d_out, tol)))


def identity_channel(N: int) -> Channel:
    return Channel.from_kraus([np.eye(N)])


def transpose_channel(N: int) -> Channel:
    """The transpose map rho -> rho^t; Liouville matrix is the swap operator."""
    return Channel.from_liouville(swap_operator(N), N, N)


def apply(channel: Channel, rho, route: str = "auto") -> np.ndarray:
    """Apply the channel to a state.

    ``route`` selects the evaluation path: ``"kraus"`` (operator sum,
    default when available), ``"liouville"`` (``vec`` action) or
    ``"choi"`` (partial trace over the input copy).
    """
    rho = as_matrix(rho)
    if rho.shape != (channel.d_in, channel.d_in):
        raise ShapeMismatch(f"state is {rho.shape}, channel input dim is {channel.d_in}")
    if route == "auto":
        route = "kraus" if channel.kraus is not None else "liouville"
    if route == "kraus":
        ops = channel.kraus_operators()
        out = np.zeros((channel.d_out, channel.d_out), dtype=complex)
        for G in ops:
            out += G @ rho @ G.conj().T
        return out
    if route == "liouville":
        return devectorize(channel.liouville @ vectorize(rho),
                           channel.d_out, channel.d_out)
    if route == "choi":
        block = channel.choi @ tensor(np.eye(channel.d_out), rho.T)
        return partial_trace_B(block, channel.choi_shape)
    raise ValueError(f"unknown route {route!r}")


@dataclass(frozen=True)
class ValidationReport:
    hermiticity_preserving: bool
    trace_preserving: bool
    trace_nonincreasing: bool
    completely_positive: bool
    choi_trace: float
    min_choi_eigenvalue: float

    @property
    def is_channel(self) -> bool:
        return (self.hermiticity_preserving and self.trace_preserving
                and self.completely_positive)


def validate(channel: Channel, tol: Tolerance = DEFAULT_TOL) -> ValidationReport:
    """Diagnose the channel; never raises, the report carries the findings."""
    D = channel.choi
    L = channel.liouville
    hermiticity = bool(np.max(np.abs(D - D.conj().T)) <= tol.atol)
    tr_A = partial_trace_A(D, channel.choi_shape)
    trace_preserving = bool(np.max(np.abs(tr_A - np.eye(channel.d_in))) <= tol.atol)
    # sum_j G_j^dag G_j is the dual map applied to the identity
    unital_image = devectorize(L.conj().T @ vectorize(np.eye(channel.d_out)),
                               channel.d_in, channel.d_in)
    gap = np.eye(channel.d_in) - (unital_image + unital_image.conj().T) / 2.0
    trace_nonincreasing = bool(np.linalg.eigvalsh(gap)[0] >= -tol.atol)
    w = np.linalg.eigvalsh((D + D.conj().T) / 2.0)
    completely_positive = hermiticity and bool(w[0] >= -tol.atol)
    return ValidationReport(
        hermiticity_preserving=hermiticity,
        trace_preserving=trace_preserving,
        trace_nonincreasing=trace_nonincreasing,
        completely_positive=completely_positive,
        choi_trace=float(np.trace(D).real),
        min_choi_eigenvalue=float(w[0]),
    )


def dual(channel: Channel) -> Channel:
    """Adjoint with respect to the Hilbert-Schmidt inner product."""
    kraus = None
    if channel.kraus is not None:
        kraus = tuple(G.conj().T for G in channel.kraus)
    L = channel.liouville.conj().T
    return Channel(L, channel.d_out, channel.d_in,
                   liouville_to_choi(L, channel.d_out, channel.d_in), kraus=kraus)


def compose(phi: Channel, psi: Channel) -> Channel:
    """phi after psi: L = L_phi L_psi."""
    if phi.d_in != psi.d_out:
        raise ShapeMismatch(
            f"cannot compose: inner dimensions {phi.d_in} != {psi.d_out}")
    return Channel.from_liouville(phi.liouville @ psi.liouville,
                                  psi.d_in, phi.d_out)


def compose_choi(D_phi: np.ndarray, D_psi: np.ndarray, d: int) -> np.ndarray:
    """Choi matrix of the composition via the double-realignment formula."""
    sh = BipartiteShape(d, d)
    return realign(realign(D_phi, sh) @ realign(D_psi, sh), sh)


def mix(coeffs: Sequence[float], channels: Sequence[Channel]) -> Channel:
    if len(coeffs) != len(channels) or not channels:
        raise ShapeMismatch("need one coefficient per channel")
    d_in, d_out = channels[0].d_in, channels[0].d_out
    if any((c.d_in, c.d_out) != (d_in, d_out) for c in channels):
        raise ShapeMismatch("mixed channels must share dimensions")
    L = sum(r * c.liouville for r, c in zip(coeffs, channels))
    return Channel.from_liouville(L, d_in, d_out)


def tensor_channels(phi: Channel, psi: Channel) -> Channel:
    """Product channel phi (x) psi on two identical N-dimensional systems.

    Liouville route: ``(I(x)S(x)I)(L_phi (x) L_psi)(I(x)S(x)I)``.  Kraus
    operators, when both factors carry them, are the pairwise type-I
    tensors.
    """
    N = phi.d_in
    if not (phi.d_in == phi.d_out == psi.d_in == psi.d_out):
        raise DimensionMismatch("tensor_channels requires square channels")
    if psi.d_in != N:
        raise DimensionMismatch("tensor_channels requires equal subsystem dimensions")
    P = middle_swap(N)
    L = P @ tensor(phi.liouville, psi.liouville) @ P
    kraus = None
    if phi.kraus is not None and psi.kraus is not None:
        kraus = tuple(tensor(G, H) for G in phi.kraus for H in psi.kraus)
    return Channel(L, N * N, N * N, liouville_to_choi(L, N * N, N * N), kraus=kraus)


def realign_image_identity_check(phi: Channel, psi: Channel, rho,
                                 atol: float = 1e-9) -> bool:
    """Check R(sigma) = L_phi R(rho) L_psi^t for sigma = (phi (x) psi)(rho)."""
    N = phi.d_in
    sh = BipartiteShape(N, N)
    rho = as_matrix(rho)
    sigma = apply(tensor_channels(phi, psi), rho, route="liouville")
    lhs = realign(sigma, sh)
    rhs = phi.liouville @ realign(rho, sh) @ psi.liouville.T
    return float(np.max(np.abs(lhs - rhs))) <= atol


def transpose_conjugations(channel: Channel, mode: str) -> Channel:
    """Conjugate the channel by the transpose map.

    ``left``: T o phi (L -> S L); ``right``: phi o T (L -> L S);
    ``both``: T o phi o T (L -> S L S = L^*).
    """
    if channel.d_in != channel.d_out:
        raise ShapeMismatch("transpose conjugation requires a square channel")
    S = swap_operator(channel.d_in)
    if mode == "left":
        L = S @ channel.liouville
    elif mode == "right":
        L = channel.liouville @ S
    elif mode == "both":
        L = S @ channel.liouville @ S
    else:
        raise ValueError(f"mode must be 'left', 'right' or 'both', got {mode!r}")
    return Channel.from_liouville(L, channel.d_in, channel.d_out)


def choi_from_definition(operators: Sequence[np.ndarray]) -> np.ndarray:
    """Choi matrix by direct evaluation of (phi (x) id)(|I>><<I|).

    Builds ``sum_{uv} phi(|u><v|) (x) |u><v|`` from the Kraus action; an
    independent oracle for the ``D = R(L)`` convention.
    """
    ops = [as_matrix(G) for G in operators]
    d_out, d_in = ops[0].shape
    D = np.zeros((d_out * d_in, d_out * d_in), dtype=complex)
    for u in range(d_in):
        for v in range(d_in):
            E = np.zeros((d_in, d_in), dtype=complex)
            E[u, v] = 1.0
            image = np.zeros((d_out, d_out), dtype=complex)
            for G in ops:
                image += G @ E @ G.conj().T
            D += tensor(image, E)
    return D


def superop_hs_inner(phi: Channel, psi: Channel) -> complex:
    """<L_phi, L_psi>, equal to <D_phi, D_psi> (the realignment is isometric)."""
    return hs_inner(phi.liouville, psi.liouville)
