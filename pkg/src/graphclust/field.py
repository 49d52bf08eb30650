"""Exact dense linear algebra over the prime field F_d.

Matrices and vectors are integer numpy arrays with entries reduced mod d.
All routines are deterministic: row reduction scans columns left to right,
and particular solutions set every free variable to zero, so inverses,
right inverses and kernel bases are reproducible run to run.
"""

from __future__ import annotations

import numpy as np

from .errors import NotInvertible, NotSurjective


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def check_modulus(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or not is_prime(int(d)):
        raise ValueError(f"modulus must be a prime integer, got {d!r}")


def as_field(a, d: int) -> np.ndarray:
    """Copy `a` into an int64 array with entries reduced mod d."""
    return np.asarray(a, dtype=np.int64) % d


def rref(m, d: int) -> tuple[np.ndarray, list[int], int]:
    """Reduced row echelon form over F_d.

    Returns:
        (r, pivot_cols, rank): r is row-equivalent to m with unit leading
        entries and zeros above and below each pivot; pivot_cols is strictly
        increasing; rank == len(pivot_cols).
    """
    check_modulus(d)
    r = as_field(m, d)
    if r.ndim != 2:
        raise ValueError("expected a 2-d array")
    nrows, ncols = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(ncols):
        if row == nrows:
            break
        hits = np.nonzero(r[row:, col])[0]
        if hits.size == 0:
            continue
        lead = row + int(hits[0])
        if lead != row:
            r[[row, lead]] = r[[lead, row]]
        r[row] = (r[row] * pow(int(r[row, col]), -1, d)) % d
        for i in np.nonzero(r[:, col])[0]:
            if i != row:
                r[i] = (r[i] - r[i, col] * r[row]) % d
        pivots.append(col)
        row += 1
    return r, pivots, len(pivots)


def rank(m, d: int) -> int:
    return rref(m, d)[2]


def is_invertible(m, d: int) -> bool:
    m = as_field(m, d)
    return m.shape[0] == m.shape[1] and rank(m, d) == m.shape[0]


def kernel_basis(m, d: int) -> list[np.ndarray]:
    """Basis of ker(m) over F_d, one vector per non-pivot column.

    The basis vector for free column f has a 1 at f, so the list is in
    increasing free-column order and spans the kernel; its length equals
    ncols - rank(m).
    """
    r, pivots, _ = rref(m, d)
    ncols = r.shape[1]
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = np.zeros(ncols, dtype=np.int64)
        v[f] = 1
        for i, p in enumerate(pivots):
            v[p] = (-r[i, f]) % d
        basis.append(v)
    return basis


def kernel_elements(m, d: int) -> np.ndarray:
    """All d**k kernel vectors as rows, k = dim ker(m), in coefficient order.

    Row j is the combination of basis vectors with coefficients given by the
    base-d digits of j (least significant digit = first basis vector).
    """
    m = as_field(m, d)
    basis = kernel_basis(m, d)
    if not basis:
        return np.zeros((1, m.shape[1]), dtype=np.int64)
    k = len(basis)
    coeffs = configurations(d, k)
    return (coeffs @ np.array(basis)) % d


def inverse(m, d: int) -> np.ndarray:
    """Two-sided inverse of a square matrix over F_d.

    Raises:
        NotInvertible: if m is not square or rank-deficient.
    """
    a = as_field(m, d)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotInvertible(f"matrix of shape {a.shape} is not square")
    n = a.shape[0]
    r, pivots, rk = rref(np.hstack([a, np.eye(n, dtype=np.int64)]), d)
    if rk < n or any(p >= n for p in pivots[:n]):
        raise NotInvertible("matrix is singular over F_d")
    return r[:, n:]


def right_inverse(m, d: int) -> np.ndarray:
    """Canonical right inverse R with m @ R == identity on the rows.

    R is the particular solution with all free variables zero, so the
    choice is deterministic.

    Raises:
        NotSurjective: if rank(m) < number of rows.
    """
    a = as_field(m, d)
    rows, cols = a.shape
    r, pivots, rk = rref(np.hstack([a, np.eye(rows, dtype=np.int64)]), d)
    if rk < rows or any(p >= cols for p in pivots):
        raise NotSurjective("matrix has no right inverse over F_d")
    out = np.zeros((cols, rows), dtype=np.int64)
    for j, p in enumerate(pivots):
        out[p] = r[j, cols:]
    return out


def solve(m, b, d: int) -> np.ndarray | None:
    """One solution of m x = b over F_d (free variables zero), or None.

    Returns None exactly when the system is inconsistent.
    """
    a = as_field(m, d)
    rhs = as_field(b, d).reshape(-1, 1)
    if rhs.shape[0] != a.shape[0]:
        raise ValueError("right-hand side length does not match row count")
    r, pivots, _ = rref(np.hstack([a, rhs]), d)
    if any(p == a.shape[1] for p in pivots):
        return None
    x = np.zeros(a.shape[1], dtype=np.int64)
    for j, p in enumerate(pivots):
        x[p] = r[j, -1]
    return x


def inverse_mod(m, modulus: int) -> np.ndarray:
    """Inverse of an integer matrix modulo an arbitrary modulus.

    Used for the mod-2d loop bookkeeping (modulus = 2d); pivots must be
    units modulo `modulus`.

    Raises:
        NotInvertible: when no unit pivot can be found for some column.
    """
    a = np.asarray(m, dtype=np.int64) % modulus
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotInvertible(f"matrix of shape {a.shape} is not square")
    n = a.shape[0]
    r = np.hstack([a, np.eye(n, dtype=np.int64)])
    row = 0
    for col in range(n):
        piv = None
        for i in range(row, n):
            if np.gcd(int(r[i, col]), modulus) == 1:
                piv = i
                break
        if piv is None:
            raise NotInvertible(f"no unit pivot in column {col} mod {modulus}")
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        r[row] = (r[row] * pow(int(r[row, col]), -1, modulus)) % modulus
        for i in range(n):
            if i != row and r[i, col]:
                r[i] = (r[i] - r[i, col] * r[row]) % modulus
        row += 1
    return r[:, n:]


def configurations(d: int, n: int) -> np.ndarray:
    """All of F_d^n as an array of shape (d**n, n).

    Row k holds the digits of k in base d, least significant first, so
    configurations(d, n)[k] @ d**arange(n) == k.  This fixed little-endian
    order is the indexing convention for every dense vector and matrix in
    the package.
    """
    out = np.empty((d**n, n), dtype=np.int64)
    for i in range(n):
        out[:, i] = (np.arange(d**n) // d**i) % d
    return out
