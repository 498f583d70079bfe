"""Conjugate-symmetric embeddings of C^n and their left inverses.

Three layouts are provided, all producing odd-length vectors ``v`` with
``v == conj_reverse(v)`` (so ``dft(v)`` is real):

``plain``  length 2n-1: ``(x_0, ..., x_{n-1}, conj(x_{n-1}), ..., conj(x_1))``
``"A"``    length 4n-3: the plain layout applied to ``x`` padded with n-1 zeros.
           Requires a real ``x_0``.
``"B"``    length 4n-1: ``(0_n, x_0, ..., x_{n-1}, conj(x_{n-1}), ..., conj(x_0), 0_{n-1})``.
           Any complex ``x``.
"""

from dataclasses import dataclass

import numpy as np

from .core import as_vector, conj_reverse
from .errors import MetadataError, NonRealLeadingEntry

__all__ = [
    "VARIANTS",
    "SymmetrizedVector",
    "symmetrized_length",
    "data_mask",
    "zero_block",
    "in_c0",
    "symmetrize",
    "symmetrize_padded_A",
    "symmetrize_padded_B",
    "symmetrize_padded",
    "extract",
    "is_conjugate_symmetric",
]

VARIANTS = ("A", "B")

# |Im x_0| <= this * ||x|| counts as real
C0_TOL = 1e-12


@dataclass(frozen=True)
class SymmetrizedVector:
    entries: np.ndarray
    variant: str
    origin_n: int

    def __post_init__(self):
        expected = symmetrized_length(self.origin_n, self.variant)
        if len(self.entries) != expected:
            raise MetadataError(
                f"variant {self.variant!r} with n={self.origin_n} needs length "
                f"{expected}, got {len(self.entries)}"
            )

    def __len__(self):
        return len(self.entries)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def symmetrized_length(n, variant):
    n = int(n)
    if n < 1:
        raise MetadataError("origin dimension must be >= 1")
    if variant == "plain":
        return 2 * n - 1
    if variant == "A":
        return 4 * n - 3
    if variant == "B":
        return 4 * n - 1
    raise MetadataError(f"unknown variant {variant!r}")


def data_mask(n, variant):
    """Boolean mask of the positions that may be nonzero in the given layout."""
    m = symmetrized_length(n, variant)
    mask = np.zeros(m, dtype=bool)
    if variant == "B":
        mask[n:3 * n] = True
    else:
        mask[:n] = True
        mask[m - n + 1:] = True
    return mask


def zero_block(n, variant):
    """Indices of the forced zeros, listed in cyclic order as one contiguous block."""
    m = symmetrized_length(n, variant)
    if variant == "A":
        return np.arange(n, 3 * n - 2)
    if variant == "B":
        return np.arange(3 * n, 3 * n + 2 * n - 1) % m
    raise MetadataError("only padded variants carry a zero block")


def in_c0(x, tol=C0_TOL):
    """True when ``x_0`` is real to within ``tol * ||x||``."""
    x = as_vector(x, "x")
    return abs(x[0].imag) <= tol * np.linalg.norm(x)


def symmetrize(x):
    x = as_vector(x, "x")
    out = np.concatenate([x, np.conj(x[:0:-1])])
    return SymmetrizedVector(out, "plain", x.size)


def symmetrize_padded_A(x, tol=C0_TOL):
    """Zero-pad ``x`` to length 2n-1, then symmetrize: a vector in C^{4n-3}.

    Raises
    ------
    NonRealLeadingEntry
        If ``|Im x_0| > tol * ||x||``.
    """
    x = as_vector(x, "x")
    if not in_c0(x, tol):
        raise NonRealLeadingEntry(
            f"x[0] = {complex(x[0])} is not real; use variant 'B' for complex x[0]"
        )
    n = x.size
    padded = np.concatenate([x, np.zeros(n - 1, dtype=np.complex128)])
    return SymmetrizedVector(symmetrize(padded).entries, "A", n)


def symmetrize_padded_B(x):
    x = as_vector(x, "x")
    n = x.size
    out = np.zeros(4 * n - 1, dtype=np.complex128)
    out[n:2 * n] = x
    out[2 * n:3 * n] = np.conj(x[::-1])
    return SymmetrizedVector(out, "B", n)


def symmetrize_padded(x, variant):
    if variant == "A":
        return symmetrize_padded_A(x)
    if variant == "B":
        return symmetrize_padded_B(x)
    raise MetadataError(f"unknown variant {variant!r}")


def extract(s):
    """Left inverse of the symmetrizations.

    Each entry of ``x`` appears twice in ``s`` (once conjugated); the two
    copies are averaged, which is the orthogonal projection onto the
    symmetric subspace. On exactly symmetric input this returns the
    original ``x`` bit for bit.
    """
    if not isinstance(s, SymmetrizedVector):
        raise MetadataError("extract needs a SymmetrizedVector carrying its variant")
    v = np.asarray(s.entries, dtype=np.complex128)
    n = s.origin_n
    avg = 0.5 * (v + conj_reverse(v))
    if s.variant == "B":
        return avg[n:2 * n].copy()
    x = avg[:n].copy()
    # index 0 is its own mirror; averaging would drop Im(x_0) in the plain layout
    x[0] = v[0]
    return x


def is_conjugate_symmetric(v, tol=1e-10):
    """True iff ``||v - conj_reverse(v)|| <= tol * ||v||``."""
    v = as_vector(np.asarray(v))
    return np.linalg.norm(v - conj_reverse(v)) <= tol * np.linalg.norm(v)
