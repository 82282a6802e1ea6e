"""Exact sparse linear algebra over Q and F_p.

Matrices are stored row-wise as dicts of nonzero entries.  Scalars are
``Fraction`` over Q and plain ints in ``[0, p)`` over F_p; every arithmetic
result is passed through ``Field.norm`` so both cases share one code path.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple


class CompositionNonzero(ValueError):
    """Raised when d_out * d_in is not the zero matrix."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class Field:
    """The rationals (``p=None``) or the prime field F_p."""

    def __init__(self, p: Optional[int] = None):
        if p is not None and not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.zero = self.norm(0)
        self.one = self.norm(1)

    def norm(self, x):
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def __call__(self, x):
        if isinstance(x, str):
            x = Fraction(x)
        return self.norm(x)

    def div(self, a, b):
        if self.p is None:
            return a / b
        return a * pow(b, -1, self.p) % self.p

    def neg(self, a):
        return self.norm(-a)

    def to_str(self, a) -> str:
        return str(a)

    @property
    def name(self) -> str:
        return "Q" if self.p is None else f"F{self.p}"

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return f"Field({self.name})"


QQ = Field()


def parse_field(spec: str) -> Field:
    """Parse ``q`` or ``fp:P``."""
    spec = spec.strip().lower()
    if spec in ("q", "qq", "rational"):
        return QQ
    if spec.startswith("fp:"):
        return Field(int(spec[3:]))
    raise ValueError(f"unknown field {spec!r}; expected 'q' or 'fp:P'")


Vector = Dict[int, object]  # sparse vector: index -> nonzero scalar


class SparseMatrix:
    """Immutable sparse matrix over a field."""

    __slots__ = ("nrows", "ncols", "field", "rows")

    def __init__(self, nrows: int, ncols: int, field: Field = QQ,
                 rows: Optional[Dict[int, Dict[int, object]]] = None):
        self.nrows = nrows
        self.ncols = ncols
        self.field = field
        clean = {}
        for r, row in (rows or {}).items():
            if not 0 <= r < nrows:
                raise IndexError(f"row {r} out of range {nrows}")
            kept = {}
            for c, v in row.items():
                if not 0 <= c < ncols:
                    raise IndexError(f"column {c} out of range {ncols}")
                v = field.norm(v)
                if v != 0:
                    kept[c] = v
            if kept:
                clean[r] = kept
        self.rows = clean

    # construction
    @classmethod
    def zero(cls, nrows, ncols, field=QQ):
        return cls(nrows, ncols, field)

    @classmethod
    def identity(cls, n, field=QQ):
        return cls(n, n, field, {i: {i: 1} for i in range(n)})

    @classmethod
    def from_entries(cls, nrows, ncols, entries: Iterable[Tuple[int, int, object]], field=QQ):
        rows: Dict[int, Dict[int, object]] = {}
        for r, c, v in entries:
            row = rows.setdefault(r, {})
            if c in row:
                raise ValueError(f"duplicate entry ({r},{c})")
            row[c] = field(v) if isinstance(v, str) else v
        return cls(nrows, ncols, field, rows)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], field=QQ, ncols=None):
        nrows = len(data)
        if ncols is None:
            ncols = len(data[0]) if nrows else 0
        rows = {r: {c: v for c, v in enumerate(row) if v != 0} for r, row in enumerate(data)}
        return cls(nrows, ncols, field, rows)

    @classmethod
    def from_columns(cls, cols: Sequence[Vector], nrows: int, field=QQ):
        rows: Dict[int, Dict[int, object]] = {}
        for c, col in enumerate(cols):
            for r, v in col.items():
                rows.setdefault(r, {})[c] = v
        return cls(nrows, len(cols), field, rows)

    # access
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def entries(self) -> List[Tuple[int, int, object]]:
        return [(r, c, v) for r in sorted(self.rows) for c, v in sorted(self.rows[r].items())]

    def get(self, r, c):
        return self.rows.get(r, {}).get(c, self.field.zero)

    def to_dense(self):
        out = [[self.field.zero] * self.ncols for _ in range(self.nrows)]
        for r, row in self.rows.items():
            for c, v in row.items():
                out[r][c] = v
        return out

    def is_zero(self) -> bool:
        return not self.rows

    def column(self, c) -> Vector:
        return {r: row[c] for r, row in self.rows.items() if c in row}

    def columns(self) -> List[Vector]:
        cols: List[Vector] = [{} for _ in range(self.ncols)]
        for r, row in self.rows.items():
            for c, v in row.items():
                cols[c][r] = v
        return cols

    # algebra
    def transpose(self):
        rows: Dict[int, Dict[int, object]] = {}
        for r, row in self.rows.items():
            for c, v in row.items():
                rows.setdefault(c, {})[r] = v
        return SparseMatrix(self.ncols, self.nrows, self.field, rows)

    def scale(self, s):
        s = self.field.norm(s)
        norm = self.field.norm
        return SparseMatrix(self.nrows, self.ncols, self.field,
                            {r: {c: norm(s * v) for c, v in row.items()} for r, row in self.rows.items()})

    def __neg__(self):
        return self.scale(-1)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        norm = self.field.norm
        rows = {r: dict(row) for r, row in self.rows.items()}
        for r, row in other.rows.items():
            tgt = rows.setdefault(r, {})
            for c, v in row.items():
                tgt[c] = norm(tgt.get(c, 0) + v)
        return SparseMatrix(self.nrows, self.ncols, self.field, rows)

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        norm = self.field.norm
        rows: Dict[int, Dict[int, object]] = {}
        for r, row in self.rows.items():
            acc: Dict[int, object] = {}
            for k, a in row.items():
                orow = other.rows.get(k)
                if not orow:
                    continue
                for c, b in orow.items():
                    acc[c] = acc.get(c, 0) + a * b
            acc = {c: norm(v) for c, v in acc.items()}
            rows[r] = acc
        return SparseMatrix(self.nrows, other.ncols, self.field, rows)

    def apply(self, vec: Vector) -> Vector:
        norm = self.field.norm
        out: Dict[int, object] = {}
        for r, row in self.rows.items():
            s = 0
            for c, v in row.items():
                x = vec.get(c)
                if x is not None:
                    s += v * x
            s = norm(s)
            if s != 0:
                out[r] = s
        return out

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]):
        rpos = {r: i for i, r in enumerate(row_idx)}
        cpos = {c: j for j, c in enumerate(col_idx)}
        rows: Dict[int, Dict[int, object]] = {}
        for r, row in self.rows.items():
            if r not in rpos:
                continue
            kept = {cpos[c]: v for c, v in row.items() if c in cpos}
            if kept:
                rows[rpos[r]] = kept
        return SparseMatrix(len(row_idx), len(col_idx), self.field, rows)

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix) and self.shape == other.shape
                and self.rows == other.rows)

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, {self.field.name}, nnz={sum(map(len, self.rows.values()))})"


def block_matrix(blocks: Sequence[Sequence[Optional[SparseMatrix]]], row_sizes, col_sizes, field=QQ):
    """Assemble a block matrix; ``None`` blocks are zero."""
    roff = [0]
    for s in row_sizes:
        roff.append(roff[-1] + s)
    coff = [0]
    for s in col_sizes:
        coff.append(coff[-1] + s)
    rows: Dict[int, Dict[int, object]] = {}
    for bi, brow in enumerate(blocks):
        for bj, blk in enumerate(brow):
            if blk is None:
                continue
            if blk.shape != (row_sizes[bi], col_sizes[bj]):
                raise ValueError(f"block ({bi},{bj}) has shape {blk.shape}, "
                                 f"expected {(row_sizes[bi], col_sizes[bj])}")
            for r, row in blk.rows.items():
                tgt = rows.setdefault(roff[bi] + r, {})
                for c, v in row.items():
                    tgt[coff[bj] + c] = v
    return SparseMatrix(roff[-1], coff[-1], field, rows)


class Reducer:
    """Incremental echelon form of a list of sparse vectors.

    Each stored row remembers how it was built from the inserted vectors,
    so ``express`` can write a vector in terms of the inserted ones.
    """

    def __init__(self, field: Field = QQ, track: bool = True):
        self.field = field
        self.track = track
        self.pivots: Dict[int, Tuple[Vector, Vector]] = {}  # pivot col -> (row, combo)
        self.count = 0

    def _reduce(self, vec: Vector, combo: Optional[Vector]):
        f = self.field
        norm = f.norm
        vec = dict(vec)
        combo = dict(combo) if combo is not None else None
        # clear pivot columns left to right; a pivot row only has entries
        # at or beyond its pivot, so cleared columns never come back
        floor = -1
        while True:
            hit = None
            for c in vec:
                if c > floor and c in self.pivots and (hit is None or c < hit):
                    hit = c
            if hit is None:
                return vec, combo
            floor = hit
            prow, pcombo = self.pivots[hit]
            factor = vec[hit]  # pivot rows are normalized to 1
            for c, v in prow.items():
                nv = norm(vec.get(c, 0) - factor * v)
                if nv == 0:
                    vec.pop(c, None)
                else:
                    vec[c] = nv
            if combo is not None:
                for c, v in pcombo.items():
                    nv = norm(combo.get(c, 0) - factor * v)
                    if nv == 0:
                        combo.pop(c, None)
                    else:
                        combo[c] = nv

    def add(self, vec: Vector) -> bool:
        """Insert ``vec``; return True iff it was independent of earlier ones."""
        idx = self.count
        self.count += 1
        combo = {idx: self.field.one} if self.track else None
        vec, combo = self._reduce(vec, combo)
        if not vec:
            return False
        piv = min(vec)
        inv = self.field.div(self.field.one, vec[piv])
        norm = self.field.norm
        vec = {c: norm(v * inv) for c, v in vec.items()}
        if combo is not None:
            combo = {c: norm(v * inv) for c, v in combo.items()}
        self.pivots[piv] = (vec, combo)
        return True

    def contains(self, vec: Vector) -> bool:
        rest, _ = self._reduce(vec, None)
        return not rest

    def express(self, vec: Vector) -> Optional[Vector]:
        """Coefficients over inserted vectors summing to ``vec``, or None."""
        if not self.track:
            raise ValueError("reducer built without tracking")
        rest, combo = self._reduce(vec, {})
        if rest:
            return None
        return {c: self.field.neg(v) for c, v in combo.items() if v != 0}

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _row_echelon(M: SparseMatrix):
    red = Reducer(M.field, track=False)
    for r in sorted(M.rows):
        red.add(M.rows[r])
    return red


def rank(M: SparseMatrix) -> int:
    """Rank over the matrix's field."""
    return _row_echelon(M).rank


def rref(M: SparseMatrix) -> Tuple[List[int], Dict[int, Vector]]:
    """Reduced row echelon form: (pivot columns, pivot -> normalized row)."""
    red = _row_echelon(M)
    norm = M.field.norm
    piv = sorted(red.pivots)
    rows = {p: dict(red.pivots[p][0]) for p in piv}
    # back-substitute so that each pivot column has a single nonzero
    for p in reversed(piv):
        prow = rows[p]
        for q in piv:
            if q >= p:
                break
            qrow = rows[q]
            if p in qrow:
                factor = qrow[p]
                for c, v in prow.items():
                    nv = norm(qrow.get(c, 0) - factor * v)
                    if nv == 0:
                        qrow.pop(c, None)
                    else:
                        qrow[c] = nv
    return piv, rows


def kernel_basis(M: SparseMatrix) -> List[Vector]:
    """Basis of the right null space, one sparse vector per free column."""
    piv, rows = rref(M)
    pivset = set(piv)
    f = M.field
    basis = []
    for free in range(M.ncols):
        if free in pivset:
            continue
        vec = {free: f.one}
        for p in piv:
            v = rows[p].get(free)
            if v is not None:
                vec[p] = f.neg(v)
        basis.append(vec)
    return basis


def image_basis(M: SparseMatrix) -> List[Vector]:
    """Independent columns spanning the column space."""
    red = Reducer(M.field, track=False)
    out = []
    for col in M.columns():
        if col and red.add(col):
            out.append(col)
    return out


def solve(M: SparseMatrix, b: Vector) -> Optional[Vector]:
    """Some x with M x = b, or None."""
    red = Reducer(M.field)
    for col in M.columns():
        red.add(col)
    return red.express(b)


def cohomology_at(d_in: SparseMatrix, d_out: SparseMatrix):
    """Cohomology of  . --d_in--> V --d_out--> .  at the middle space V.

    Returns ``(dim, representatives)`` where the representatives are kernel
    vectors of ``d_out`` completing a basis of the image of ``d_in``.
    """
    if d_in.nrows != d_out.ncols:
        raise ValueError(f"middle dimensions differ: {d_in.nrows} vs {d_out.ncols}")
    if not (d_out @ d_in).is_zero():
        raise CompositionNonzero("d_out * d_in != 0")
    red = Reducer(d_in.field, track=False)
    for col in d_in.columns():
        if col:
            red.add(col)
    reps = []
    for z in kernel_basis(d_out):
        if red.add(z):
            reps.append(z)
    return len(reps), reps


def dense_vector(vec: Vector, n: int, field: Field = QQ):
    return [vec.get(i, field.zero) for i in range(n)]
