"""Exact integer linear algebra: sparse matrices, Smith normal form, cohomology.

Everything is over the integers with Python's arbitrary-precision ints.
The workhorse is :func:`_eliminate_units`, a sparse elimination that only
pivots on entries equal to +1 or -1.  Such a step splits off a ``[1]`` block
by unimodular operations, so it preserves invariant factors.  Coboundary
matrices are mostly +-1, which leaves a small residual for the dense Smith
normal form.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

from .errors import TruncationExceeded


class IntegerMatrix:
    """Sparse ``rows x cols`` integer matrix stored by columns.

    ``columns[j]`` maps row index to a nonzero entry.
    """

    def __init__(self, rows: int, cols: int, columns: Sequence[dict] | None = None):
        self.rows, self.cols = rows, cols
        if columns is None:
            columns = [{} for _ in range(cols)]
        if len(columns) != cols:
            raise ValueError("column count mismatch")
        self.columns = [{r: v for r, v in c.items() if v} for c in columns]
        self._cache: dict = {}

    @classmethod
    def from_dense(cls, rows_list: Sequence[Sequence[int]], cols: int | None = None):
        nr = len(rows_list)
        nc = len(rows_list[0]) if nr else (cols or 0)
        columns = [{} for _ in range(nc)]
        for i, row in enumerate(rows_list):
            for j, v in enumerate(row):
                if v:
                    columns[j][i] = v
        return cls(nr, nc, columns)

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: dict):
        columns = [{} for _ in range(cols)]
        for (i, j), v in entries.items():
            if v:
                columns[j][i] = v
        return cls(rows, cols, columns)

    @property
    def entries(self) -> dict[tuple[int, int], int]:
        return {(i, j): v for j, c in enumerate(self.columns) for i, v in c.items()}

    @property
    def shape(self):
        return self.rows, self.cols

    def nnz(self) -> int:
        return sum(len(c) for c in self.columns)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for j, c in enumerate(self.columns):
            for i, v in c.items():
                out[i][j] = v
        return out

    def is_zero(self) -> bool:
        return not any(self.columns)

    def apply(self, vec: dict[int, int]) -> dict[int, int]:
        """``self @ vec`` for a sparse vector ``{col: value}``."""
        out: dict[int, int] = defaultdict(int)
        for j, a in vec.items():
            for i, v in self.columns[j].items():
                out[i] += a * v
        return {i: v for i, v in out.items() if v}

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return IntegerMatrix(self.rows, other.cols, [self.apply(c) for c in other.columns])

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        cols = []
        for a, b in zip(self.columns, other.columns):
            c = dict(a)
            for i, v in b.items():
                c[i] = c.get(i, 0) + v
            cols.append(c)
        return IntegerMatrix(self.rows, self.cols, cols)

    def __neg__(self):
        return IntegerMatrix(self.rows, self.cols, [{i: -v for i, v in c.items()} for c in self.columns])

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k: int):
        return IntegerMatrix(self.rows, self.cols, [{i: k * v for i, v in c.items()} for c in self.columns])

    def __eq__(self, other):
        return isinstance(other, IntegerMatrix) and self.shape == other.shape and self.columns == other.columns

    __hash__ = None

    def transpose(self) -> "IntegerMatrix":
        cols = [{} for _ in range(self.rows)]
        for j, c in enumerate(self.columns):
            for i, v in c.items():
                cols[i][j] = v
        return IntegerMatrix(self.cols, self.rows, cols)

    def permuted(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "IntegerMatrix":
        """Rows and columns relabelled: old row ``i`` becomes ``row_perm[i]``."""
        cols = [None] * self.cols
        for j, c in enumerate(self.columns):
            cols[col_perm[j]] = {row_perm[i]: v for i, v in c.items()}
        return IntegerMatrix(self.rows, self.cols, cols)

    def __repr__(self):
        return f"IntegerMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


def identity(n: int) -> IntegerMatrix:
    return IntegerMatrix(n, n, [{j: 1} for j in range(n)])


# -- sparse unit elimination ---------------------------------------------

def _eliminate_units(m: IntegerMatrix) -> tuple[int, list[dict]]:
    """Pivot on +-1 entries until none are left.

    Returns the number of pivots and the residual columns (nonzero only).
    In each pass columns are visited by increasing length, and within a
    column the unit entry whose row is shortest is chosen.  That is a
    greedy Markowitz rule.
    """
    cols = {j: dict(c) for j, c in enumerate(m.columns) if c}
    rows: dict[int, set] = defaultdict(set)
    for j, c in cols.items():
        for r in c:
            rows[r].add(j)
    units = 0
    progress = True
    while progress:
        progress = False
        for j in sorted(cols, key=lambda j: len(cols[j])):
            c = cols.get(j)
            if c is None:
                continue
            best = None
            for r, v in c.items():
                if v == 1 or v == -1:
                    cnt = len(rows[r])
                    if best is None or cnt < best[0]:
                        best = (cnt, r, v)
            if best is None:
                continue
            _, r, v = best
            for k in list(rows[r]):
                if k == j:
                    continue
                ck = cols[k]
                f = ck[r] * v
                for rr, vv in c.items():
                    nv = ck.get(rr, 0) - f * vv
                    if nv:
                        if rr not in ck:
                            rows[rr].add(k)
                        ck[rr] = nv
                    elif rr in ck:
                        del ck[rr]
                        rows[rr].discard(k)
                if not ck:
                    del cols[k]
            for rr in c:
                rows[rr].discard(j)
            del cols[j]
            units += 1
            progress = True
    return units, [cols[j] for j in sorted(cols)]


def _residual_dense(columns: list[dict]) -> list[list[int]]:
    row_ids = sorted({r for c in columns for r in c})
    pos = {r: i for i, r in enumerate(row_ids)}
    A = [[0] * len(columns) for _ in row_ids]
    for j, c in enumerate(columns):
        for r, v in c.items():
            A[pos[r]][j] = v
    return A


class Echelon:
    """Incremental row-echelon basis over the rationals, kept integral.

    Vectors are sparse dicts.  :meth:`add` reports whether the span grew.
    """

    def __init__(self):
        self.pivots: dict[int, dict] = {}

    def __len__(self):
        return len(self.pivots)

    def reduce(self, v: dict) -> dict:
        v = {k: x for k, x in v.items() if x}
        while v:
            lead = min(v)
            b = self.pivots.get(lead)
            if b is None:
                break
            a, c = b[lead], v[lead]
            g = gcd(a, c)
            a, c = a // g, c // g
            w = {k: a * x for k, x in v.items()}
            for k, x in b.items():
                w[k] = w.get(k, 0) - c * x
            v = {k: x for k, x in w.items() if x}
            if v:
                g = 0
                for x in v.values():
                    g = gcd(g, x)
                if g > 1:
                    v = {k: x // g for k, x in v.items()}
        return v

    def add(self, v: dict) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        self.pivots[min(v)] = v
        return True


def _rank_columns(columns: list[dict]) -> int:
    e = Echelon()
    for c in columns:
        e.add(c)
    return len(e)


def rank(m: IntegerMatrix) -> int:
    """Rank over the rationals, computed exactly."""
    if "rank" not in m._cache:
        units, residual = _eliminate_units(m)
        m._cache["rank"] = units + _rank_columns(residual)
    return m._cache["rank"]


# -- dense Smith normal form --------------------------------------------

def _snf_dense(A: list[list[int]], track: bool = False):
    """Smith form of a dense matrix, in place on a copy.

    Returns ``(diag, U, V)`` with ``U @ A @ V`` diagonal.  ``U`` and ``V``
    are ``None`` unless ``track`` is set.
    """
    A = [row[:] for row in A]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if track else None

    def swap_rows(i, k):
        A[i], A[k] = A[k], A[i]
        if track:
            U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for row in A:
            row[j], row[k] = row[k], row[j]
        if track:
            for row in V:
                row[j], row[k] = row[k], row[j]

    def add_row(dst, src, q):  # row dst -= q * row src
        rs, rd = A[src], A[dst]
        for j in range(n):
            if rs[j]:
                rd[j] -= q * rs[j]
        if track:
            us, ud = U[src], U[dst]
            for j in range(m):
                if us[j]:
                    ud[j] -= q * us[j]

    def add_col(dst, src, q):  # col dst -= q * col src
        for row in A:
            if row[src]:
                row[dst] -= q * row[src]
        if track:
            for row in V:
                if row[src]:
                    row[dst] -= q * row[src]

    diag = []
    t = 0
    while t < min(m, n):
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                a = A[i][j]
                if a and (piv is None or abs(a) < piv[0]):
                    piv = (abs(a), i, j)
                    if piv[0] == 1:
                        break
            if piv and piv[0] == 1:
                break
        if piv is None:
            break
        swap_rows(t, piv[1])
        swap_cols(t, piv[2])
        while True:
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // A[t][t])
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // A[t][t])
            # a nonzero remainder is smaller than the pivot: move it up and repeat
            cand = None
            for i in range(t + 1, m):
                if A[i][t] and (cand is None or abs(A[i][t]) < cand[0]):
                    cand = (abs(A[i][t]), "r", i)
            for j in range(t + 1, n):
                if A[t][j] and (cand is None or abs(A[t][j]) < cand[0]):
                    cand = (abs(A[t][j]), "c", j)
            if cand is not None:
                if cand[1] == "r":
                    swap_rows(t, cand[2])
                else:
                    swap_cols(t, cand[2])
                continue
            p = A[t][t]
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad, -1)  # row t += row bad, then clear again
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if track:
                U[t] = [-x for x in U[t]]
        diag.append(A[t][t])
        t += 1
    return diag, U, V


def _det(A: list[list[int]]) -> int:
    """Determinant via fraction-free (Bareiss) elimination."""
    A = [row[:] for row in A]
    n = len(A)
    sign, prev = 1, 1
    for k in range(n):
        p = next((i for i in range(k, n) if A[i][k]), None)
        if p is None:
            return 0
        if p != k:
            A[k], A[p] = A[p], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[k][k] * A[i][j] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * (A[n - 1][n - 1] if n else 1)


@dataclass
class SmithForm:
    factors: list[int]
    U: list[list[int]] | None = None
    V: list[list[int]] | None = None


def _matmul_dense(A, B):
    if not A:
        return []
    nb = len(B[0]) if B else 0
    return [[sum(a * B[k][j] for k, a in enumerate(row) if a) for j in range(nb)] for row in A]


def smith_normal_form(m: IntegerMatrix, certificates: bool = False) -> SmithForm:
    """Invariant factors ``d1 | d2 | ... | dr`` of ``m`` (``r`` is the rank).

    With ``certificates`` the dense algorithm runs on the whole matrix and
    returns unimodular ``U``, ``V`` with ``U @ m @ V`` diagonal.  Both are
    checked before returning.  That path is meant for small matrices.

    >>> smith_normal_form(IntegerMatrix.from_dense([[2, 0], [0, 3]])).factors
    [1, 6]
    """
    if certificates:
        A = m.to_dense()
        diag, U, V = _snf_dense(A, track=True)
        D = _matmul_dense(_matmul_dense(U, A), V)
        for i, row in enumerate(D):
            for j, x in enumerate(row):
                want = diag[i] if i == j and i < len(diag) else 0
                if x != want:
                    raise ArithmeticError("Smith certificate failed: U m V is not the diagonal")
        if abs(_det(U)) != 1 or abs(_det(V)) != 1:
            raise ArithmeticError("Smith certificate failed: transform not unimodular")
        return SmithForm(diag, U, V)
    if "snf" not in m._cache:
        units, residual = _eliminate_units(m)
        diag, _, _ = _snf_dense(_residual_dense(residual)) if residual else ([], None, None)
        m._cache["snf"] = [1] * units + diag
        m._cache["rank"] = len(m._cache["snf"])
    return SmithForm(list(m._cache["snf"]))


# -- kernels -------------------------------------------------------------

def integer_kernel(m: IntegerMatrix) -> list[dict[int, int]]:
    """A basis of the integer lattice ``{v : m v = 0}`` as sparse vectors.

    Unimodular column operations bring ``m`` to column echelon form.  The
    transforms of the columns that become zero form the basis.
    """
    cols = [dict(c) for c in m.columns]
    trans = [{j: 1} for j in range(m.cols)]
    rows: dict[int, set] = defaultdict(set)
    for j, c in enumerate(cols):
        for r in c:
            rows[r].add(j)
    active = set(range(m.cols))

    def sub(dst, src, q):  # col dst -= q * col src, same on transforms
        for vec, is_col in ((cols, True), (trans, False)):
            d, s = vec[dst], vec[src]
            for k, x in s.items():
                nv = d.get(k, 0) - q * x
                if nv:
                    if is_col and k not in d:
                        rows[k].add(dst)
                    d[k] = nv
                elif k in d:
                    del d[k]
                    if is_col:
                        rows[k].discard(dst)

    for r in sorted(rows, key=lambda r: len(rows[r])):
        live = [j for j in rows[r] if j in active]
        while len(live) > 1:
            p = min(live, key=lambda j: (abs(cols[j][r]), len(cols[j]), j))
            for j in live:
                if j != p:
                    sub(j, p, cols[j][r] // cols[p][r])
            live = [j for j in live if cols[j].get(r)]
        if live:
            active.discard(live[0])
    return [trans[j] for j in sorted(active)]


# -- cochain complexes ---------------------------------------------------

@dataclass
class CochainComplex:
    """Cochain complex ``C^0 -> C^1 -> ... -> C^top``.

    ``d[n]`` maps level ``n`` coordinates to level ``n+1`` coordinates.
    ``max_dim`` is the highest degree whose cohomology is determined by
    the stored data.  ``vanishes_above`` says every level above the stored
    ones is zero, so all higher groups are zero.
    """
    dims: list[int]
    d: list[IntegerMatrix]
    basis: list[list] = field(default_factory=list)
    max_dim: int = 0
    vanishes_above: bool = False
    meta: dict = field(default_factory=dict)

    def check_shapes(self):
        for n, dn in enumerate(self.d):
            if dn.shape != (self.dims[n + 1], self.dims[n]):
                raise ValueError(f"d[{n}] has shape {dn.shape}, expected {(self.dims[n + 1], self.dims[n])}")


@dataclass(frozen=True)
class CohomologyGroup:
    dim: int
    free_rank: int
    torsion: tuple = ()

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


def _matrix(c: CochainComplex, n: int) -> IntegerMatrix | None:
    if n < 0:
        return None
    if n < len(c.d):
        return c.d[n]
    return None


def _in_range(c: CochainComplex, n: int) -> bool:
    if n < 0:
        raise ValueError("negative degree")
    if n <= c.max_dim:
        return True
    if c.vanishes_above:
        return False
    raise TruncationExceeded(f"degree {n} is above the truncation bound {c.max_dim}")


def cohomology(c: CochainComplex, n: int) -> CohomologyGroup:
    """``H^n``: free rank ``dim C^n - rank d[n] - rank d[n-1]``; torsion from ``d[n-1]``."""
    if not _in_range(c, n):
        return CohomologyGroup(n, 0, ())
    dim = c.dims[n] if n < len(c.dims) else 0
    out, inc = _matrix(c, n), _matrix(c, n - 1)
    r_out = rank(out) if out is not None else 0
    if inc is not None:
        factors = smith_normal_form(inc).factors
        r_in, torsion = len(factors), tuple(sorted(f for f in factors if f > 1))
    else:
        r_in, torsion = 0, ()
    return CohomologyGroup(n, dim - r_out - r_in, torsion)


def _reduce_job(args):
    kind, m = args
    return smith_normal_form(m).factors if kind == "snf" else rank(m)


def cohomology_range(c: CochainComplex, top: int, threads: int = 1) -> list[CohomologyGroup]:
    """``H^0 .. H^top``; with ``threads > 1`` the matrices reduce in parallel processes."""
    if threads > 1:
        jobs = []
        for n in range(min(top + 1, len(c.d))):
            m = c.d[n]
            if "snf" not in m._cache and m.cols and m.rows:
                jobs.append((n, "snf" if n < top else "rank", m))
        if len(jobs) > 1:
            from concurrent.futures import ProcessPoolExecutor
            with ProcessPoolExecutor(max_workers=threads) as ex:
                results = ex.map(_reduce_job, [(k, m) for _, k, m in jobs])
                for (n, kind, m), res in zip(jobs, results):
                    if kind == "snf":
                        m._cache["snf"], m._cache["rank"] = res, len(res)
                    else:
                        m._cache["rank"] = res
    return [cohomology(c, n) for n in range(top + 1)]


@dataclass
class CocycleBasis:
    """``kernel`` spans ``ker d[n]`` over the integers.  ``free`` holds
    cocycles whose classes span a complement of the torsion in ``H^n``,
    tensored with the rationals."""
    kernel: list[dict]
    free: list[dict]


def cocycle_representatives(c: CochainComplex, n: int) -> CocycleBasis:
    if not _in_range(c, n):
        return CocycleBasis([], [])
    dim = c.dims[n]
    out = _matrix(c, n)
    if out is None:
        out = IntegerMatrix(0, dim)
    kernel = integer_kernel(out)
    echelon = Echelon()
    inc = _matrix(c, n - 1)
    if inc is not None:
        for col in inc.columns:
            echelon.add(col)
    want = cohomology(c, n).free_rank
    free = []
    for v in kernel:
        if len(free) == want:
            break
        if echelon.add(v):
            free.append(v)
    return CocycleBasis(kernel, free)
