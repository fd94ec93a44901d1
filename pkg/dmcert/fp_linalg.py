"""Dense exact linear algebra over the prime field F_p.

Matrices are numpy ``int64`` arrays holding residues in ``[0, p)``.  Every
matrix and scalar carries its own modulus; combining two values with
different moduli raises :class:`ModulusMismatchError` instead of silently
reducing.  Elimination pivots on the first nonzero entry in column order, so
kernels and echelon forms are deterministic.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

log = logging.getLogger("dmcert.fp_linalg")


class FpLinalgError(RuntimeError):
    """Base exception for F_p linear algebra failures."""
    pass


class ModulusMismatchError(FpLinalgError):
    """Two operands live over different prime fields."""
    pass


class ShapeError(FpLinalgError):
    """Matrix dimensions do not compose."""
    pass


class NotAComplexError(FpLinalgError):
    """d_out . d_in is not zero."""
    pass


class InvalidPrimeError(ValueError):
    """The modulus is not a prime >= 2."""
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def require_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool) or not is_prime(int(p)):
        raise InvalidPrimeError(f"p must be prime, got {p!r}")
    return int(p)


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FpScalar:
    value: int
    modulus: int

    def __post_init__(self) -> None:
        require_prime(self.modulus)
        object.__setattr__(self, "value", int(self.value) % self.modulus)

    def _coerce(self, other: Union["FpScalar", int]) -> "FpScalar":
        if isinstance(other, FpScalar):
            if other.modulus != self.modulus:
                raise ModulusMismatchError(f"F_{self.modulus} vs F_{other.modulus}")
            return other
        return FpScalar(int(other), self.modulus)

    def __add__(self, other: Union["FpScalar", int]) -> "FpScalar":
        o = self._coerce(other)
        return FpScalar(self.value + o.value, self.modulus)

    __radd__ = __add__

    def __sub__(self, other: Union["FpScalar", int]) -> "FpScalar":
        o = self._coerce(other)
        return FpScalar(self.value - o.value, self.modulus)

    def __rsub__(self, other: int) -> "FpScalar":
        return self._coerce(other) - self

    def __mul__(self, other: Union["FpScalar", int]) -> "FpScalar":
        o = self._coerce(other)
        return FpScalar(self.value * o.value, self.modulus)

    __rmul__ = __mul__

    def __neg__(self) -> "FpScalar":
        return FpScalar(-self.value, self.modulus)

    def inverse(self) -> "FpScalar":
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.modulus}")
        return FpScalar(pow(self.value, -1, self.modulus), self.modulus)

    def __truediv__(self, other: Union["FpScalar", int]) -> "FpScalar":
        return self * self._coerce(other).inverse()

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0


# ---------------------------------------------------------------------------
# Vectors and matrices
# ---------------------------------------------------------------------------


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FpVector:
    modulus: int
    data: np.ndarray

    def __post_init__(self) -> None:
        require_prime(self.modulus)
        arr = np.asarray(self.data, dtype=np.int64).reshape(-1) % self.modulus
        object.__setattr__(self, "data", _frozen(arr))

    def __len__(self) -> int:
        return int(self.data.shape[0])

    @property
    def entries(self) -> Tuple[int, ...]:
        return tuple(int(x) for x in self.data)

    def is_zero(self) -> bool:
        return not bool(self.data.any())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FpVector):
            return NotImplemented
        return self.modulus == other.modulus and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.modulus, self.entries))

    def __repr__(self) -> str:
        return f"FpVector(F_{self.modulus}, {list(self.entries)})"


@dataclass(frozen=True, eq=False)
class FpMatrix:
    modulus: int
    data: np.ndarray

    def __post_init__(self) -> None:
        require_prime(self.modulus)
        arr = np.asarray(self.data, dtype=np.int64)
        if arr.ndim != 2:
            raise ShapeError(f"expected a 2-d array, got shape {arr.shape}")
        object.__setattr__(self, "data", _frozen(arr % self.modulus))

    # --- constructors ---

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], modulus: int, *, cols: int | None = None) -> "FpMatrix":
        if not rows:
            return cls.zeros(0, cols or 0, modulus)
        width = len(rows[0])
        for r in rows:
            if len(r) != width:
                raise ShapeError("ragged row lengths")
        return cls(modulus, np.array(rows, dtype=np.int64).reshape(len(rows), width))

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: int) -> "FpMatrix":
        return cls(modulus, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, n: int, modulus: int) -> "FpMatrix":
        return cls(modulus, np.eye(n, dtype=np.int64))

    @classmethod
    def permutation(cls, perm: Sequence[int], modulus: int) -> "FpMatrix":
        """Matrix sending basis vector ``i`` to basis vector ``perm[i]``."""
        n = len(perm)
        arr = np.zeros((n, n), dtype=np.int64)
        for i, j in enumerate(perm):
            arr[j, i] = 1
        return cls(modulus, arr)

    @classmethod
    def block_diagonal(cls, blocks: Iterable["FpMatrix"], modulus: int) -> "FpMatrix":
        blocks = list(blocks)
        for b in blocks:
            _check_modulus(modulus, b.modulus)
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        arr = np.zeros((rows, cols), dtype=np.int64)
        r = c = 0
        for b in blocks:
            arr[r:r + b.rows, c:c + b.cols] = b.data
            r += b.rows
            c += b.cols
        return cls(modulus, arr)

    # --- shape / access ---

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def cols(self) -> int:
        return int(self.data.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def to_lists(self) -> List[List[int]]:
        return [[int(x) for x in row] for row in self.data]

    def column(self, j: int) -> FpVector:
        return FpVector(self.modulus, self.data[:, j])

    def is_zero(self) -> bool:
        return not bool(self.data.any())

    # --- arithmetic ---

    def __matmul__(self, other: Union["FpMatrix", FpVector]) -> Union["FpMatrix", FpVector]:
        _check_modulus(self.modulus, other.modulus)
        if isinstance(other, FpVector):
            if self.cols != len(other):
                raise ShapeError(f"{self.shape} @ vector of length {len(other)}")
            return FpVector(self.modulus, (self.data @ other.data) % self.modulus)
        if self.cols != other.rows:
            raise ShapeError(f"{self.shape} @ {other.shape}")
        return FpMatrix(self.modulus, (self.data @ other.data) % self.modulus)

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        _check_modulus(self.modulus, other.modulus)
        if self.shape != other.shape:
            raise ShapeError(f"{self.shape} + {other.shape}")
        return FpMatrix(self.modulus, self.data + other.data)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        _check_modulus(self.modulus, other.modulus)
        if self.shape != other.shape:
            raise ShapeError(f"{self.shape} - {other.shape}")
        return FpMatrix(self.modulus, self.data - other.data)

    def __neg__(self) -> "FpMatrix":
        return FpMatrix(self.modulus, -self.data)

    def power(self, k: int) -> "FpMatrix":
        if self.rows != self.cols:
            raise ShapeError(f"power of non-square matrix {self.shape}")
        result = FpMatrix.identity(self.rows, self.modulus)
        base = self
        while k > 0:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return (
            self.modulus == other.modulus
            and self.shape == other.shape
            and np.array_equal(self.data, other.data)
        )

    def __hash__(self) -> int:
        return hash((self.modulus, self.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"FpMatrix(F_{self.modulus}, {self.to_lists()})"


def _check_modulus(a: int, b: int) -> None:
    if a != b:
        raise ModulusMismatchError(f"F_{a} vs F_{b}")


# ---------------------------------------------------------------------------
# Elimination
# ---------------------------------------------------------------------------


def row_echelon(m: FpMatrix) -> Tuple[FpMatrix, List[int]]:
    """Reduced row-echelon form over F_p.

    Args:
        m: Input matrix.

    Returns:
        ``(R, pivots)`` with ``R`` in reduced echelon form and ``pivots`` the
        pivot column indices in increasing order.
    """
    p = m.modulus
    R = m.data.copy()
    n_rows, n_cols = R.shape

    pivots: List[int] = []
    r = 0
    for col in range(n_cols):
        if r >= n_rows:
            break
        nz = np.nonzero(R[r:, col])[0]
        if nz.size == 0:
            continue
        found = r + int(nz[0])
        if found != r:
            R[[r, found]] = R[[found, r]]
        inv = FpScalar(int(R[r, col]), p).inverse()
        R[r] = (R[r] * int(inv)) % p
        others = np.nonzero(R[:, col])[0]
        others = others[others != r]
        if others.size:
            R[others] = (R[others] - np.outer(R[others, col], R[r])) % p
        pivots.append(col)
        r += 1
    return FpMatrix(p, R), pivots


def rank(m: FpMatrix) -> int:
    """F_p rank of ``m``."""
    if m.rows == 0 or m.cols == 0:
        return 0
    _, pivots = row_echelon(m)
    return len(pivots)


def kernel_basis(m: FpMatrix) -> List[FpVector]:
    """Basis of ``{v : m v = 0}``, one vector per free column in increasing order."""
    p = m.modulus
    if m.rows == 0:
        return [FpVector(p, np.eye(m.cols, dtype=np.int64)[j]) for j in range(m.cols)]
    R, pivots = row_echelon(m)
    pivot_set = set(pivots)
    basis: List[FpVector] = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = np.zeros(m.cols, dtype=np.int64)
        v[free] = 1
        for row, pc in enumerate(pivots):
            v[pc] = (-R.data[row, free]) % p
        basis.append(FpVector(p, v))
    return basis


def nullity(m: FpMatrix) -> int:
    return m.cols - rank(m)


def cohomology_dim(d_in: FpMatrix, d_out: FpMatrix) -> int:
    """dim ker(d_out) / im(d_in) for ``C_prev --d_in--> C --d_out--> C_next``."""
    _check_modulus(d_in.modulus, d_out.modulus)
    if d_in.rows != d_out.cols:
        raise ShapeError(f"d_in {d_in.shape} does not compose with d_out {d_out.shape}")
    if d_in.cols and d_out.rows and not (d_out @ d_in).is_zero():
        raise NotAComplexError("d_out . d_in != 0")
    return nullity(d_out) - rank(d_in)


def cyclic_shift(n: int, modulus: int) -> FpMatrix:
    """The regular-representation generator: e_i -> e_{i+1 mod n}."""
    return FpMatrix.permutation([(i + 1) % n for i in range(n)], modulus)


def norm_matrix(sigma: FpMatrix, order: int) -> FpMatrix:
    """N = 1 + sigma + ... + sigma^(order-1)."""
    n = sigma.rows
    total = FpMatrix.zeros(n, n, sigma.modulus)
    power = FpMatrix.identity(n, sigma.modulus)
    for _ in range(order):
        total = total + power
        power = power @ sigma
    return total
