"""ECOC code matrices: construction, validation, analysis and text I/O.

A code matrix is a ``C x b`` table whose row ``i`` is the target codeword of
class ``i``. Entries are ``0``, ``1`` or :data:`DONT_CARE`; a don't-care entry
contributes neither training loss nor decoding distance.

Text format: one row per line, one character per entry (``'0'``, ``'1'``,
``'*'``), every line terminated by ``'\\n'``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import (
    GenerationFailed,
    InvalidClassCount,
    InvalidLabel,
    InvalidMatrix,
    ParseError,
    UnsupportedSize,
)

DONT_CARE = -1

_TRIT_CHARS = {0: "0", 1: "1", DONT_CARE: "*"}
_CHAR_TRITS = {c: t for t, c in _TRIT_CHARS.items()}

# primitive polynomials for GF(2^m), bit i = coefficient of x^i
_PRIMITIVE_POLYNOMIALS = {4: 0b10011, 5: 0b100101, 6: 0b1000011}
BCH_BLOCK_LENGTHS = (15, 31, 63)

DEFAULT_DENSE_LENGTH = 39
DEFAULT_SPARSE_LENGTH = 59


class CodeMatrix:
    """Immutable ``C x b`` table of trits.

    Construction only checks shape and alphabet; call :func:`validate` for the
    structural invariants every generator guarantees.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries):
        arr = np.array(entries, dtype=np.int8)
        if arr.ndim != 2 or arr.shape[0] < 2 or arr.shape[1] < 1:
            raise InvalidMatrix(f"code matrix must be 2-D with >= 2 rows, got shape {arr.shape}")
        if not np.isin(arr, (0, 1, DONT_CARE)).all():
            raise InvalidMatrix("code matrix entries must be 0, 1 or DONT_CARE")
        arr.setflags(write=False)
        self._entries = arr

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def class_count(self) -> int:
        return self._entries.shape[0]

    @property
    def code_length(self) -> int:
        return self._entries.shape[1]

    @property
    def shape(self):
        return self._entries.shape

    @property
    def active(self) -> np.ndarray:
        """Boolean ``C x b`` array, True where the entry is not a don't-care."""
        return self._entries != DONT_CARE

    @property
    def is_binary(self) -> bool:
        return bool(self.active.all())

    def __eq__(self, other):
        if not isinstance(other, CodeMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._entries, other._entries))

    def __hash__(self):
        return hash((self.shape, self._entries.tobytes()))

    def __repr__(self):
        return f"CodeMatrix(C={self.class_count}, b={self.code_length}, binary={self.is_binary})"


@dataclass(frozen=True)
class CodeAnalysis:
    min_row_distance: int
    correcting_capability: int


def pairwise_distances(matrix: CodeMatrix) -> np.ndarray:
    """Hamming distance between every pair of rows over mutually non-masked positions."""
    z = matrix.entries
    ones = (z == 1).astype(np.int64)
    zeros = (z == 0).astype(np.int64)
    return ones @ zeros.T + zeros @ ones.T


def _min_off_diagonal(dist):
    c = dist.shape[0]
    return int(dist[~np.eye(c, dtype=bool)].min())


def min_row_distance(matrix: CodeMatrix) -> int:
    return _min_off_diagonal(pairwise_distances(matrix))


def _problems(z: np.ndarray) -> list[str]:
    """Human-readable list of invariant violations for a raw trit array."""
    problems = []
    c, b = z.shape
    if c < 3:
        problems.append(f"class count {c} < 3")
    active = z != DONT_CARE
    if (~active).all(axis=1).any():
        problems.append("all-don't-care row")
    has_zero = (z == 0).any(axis=0)
    has_one = (z == 1).any(axis=0)
    bad_cols = np.flatnonzero(~(has_zero & has_one))
    if bad_cols.size:
        problems.append(f"columns without both a 0 and a 1: {bad_cols.tolist()}")
    ones = (z == 1).astype(np.int64)
    zeros = (z == 0).astype(np.int64)
    dist = ones @ zeros.T + zeros @ ones.T
    dup = [(i, j) for i, j in zip(*np.nonzero(np.triu(dist == 0, k=1)))]
    if dup:
        problems.append(f"indistinguishable rows: {dup[:5]}")
    if active.all():
        pairs = _column_clashes(z)
        if pairs:
            problems.append(f"identical or complementary columns: {pairs[:5]}")
    return problems


def _column_clashes(z):
    s = 2 * z.astype(np.int64) - 1
    gram = np.abs(s.T @ s)
    i, j = np.nonzero(np.triu(gram == z.shape[0], k=1))
    return list(zip(i.tolist(), j.tolist()))


def is_valid(matrix: CodeMatrix) -> bool:
    return not _problems(matrix.entries)


def validate(matrix: CodeMatrix) -> CodeMatrix:
    """Check the structural invariants and return ``matrix`` unchanged.

    Raises
    ------
    InvalidMatrix
        If there are fewer than three classes, an all-don't-care row, a column
        lacking either a 0 or a 1, two rows that agree on all shared positions,
        or (binary matrices only) identical or complementary columns.
    """
    problems = _problems(matrix.entries)
    if problems:
        raise InvalidMatrix("; ".join(problems))
    return matrix


def analyze(matrix: CodeMatrix) -> CodeAnalysis:
    d = min_row_distance(matrix)
    return CodeAnalysis(min_row_distance=d, correcting_capability=max((d - 1) // 2, 0))


def _check_class_count(class_count):
    if int(class_count) != class_count or class_count < 3:
        raise InvalidClassCount(f"class_count must be an integer >= 3, got {class_count!r}")


# ---------------------------------------------------------------------------
# deterministic constructions


def one_vs_all(class_count: int) -> CodeMatrix:
    _check_class_count(class_count)
    return CodeMatrix(np.eye(class_count, dtype=np.int8))


def one_vs_one(class_count: int) -> CodeMatrix:
    """One column per class pair ``(p, q)``, ``p < q``, in lexicographic order.

    Class ``p`` gets a 1, class ``q`` a 0 and every other class a don't-care.
    """
    _check_class_count(class_count)
    pairs = list(combinations(range(class_count), 2))
    z = np.full((class_count, len(pairs)), DONT_CARE, dtype=np.int8)
    for col, (p, q) in enumerate(pairs):
        z[p, col] = 1
        z[q, col] = 0
    return CodeMatrix(z)


def exhaustive(class_count: int) -> CodeMatrix:
    """All ``2**(C-1) - 1`` non-trivial two-way partitions of the classes.

    Row 0 is all ones; row ``i`` alternates runs of ``2**(C-1-i)`` zeros and
    ones.
    """
    _check_class_count(class_count)
    if class_count > 7:
        raise UnsupportedSize(f"exhaustive codes are limited to 3..7 classes, got {class_count}")
    b = 2 ** (class_count - 1) - 1
    cols = np.arange(b)
    z = np.ones((class_count, b), dtype=np.int8)
    for i in range(1, class_count):
        run = 2 ** (class_count - 1 - i)
        z[i] = (cols // run) % 2
    return CodeMatrix(z)


# ---------------------------------------------------------------------------
# random constructions


def _check_random_args(class_count, code_length, trials):
    _check_class_count(class_count)
    if code_length < int(np.ceil(np.log2(class_count))):
        raise UnsupportedSize(
            f"code_length {code_length} cannot separate {class_count} classes"
        )
    if trials < 1:
        raise UnsupportedSize("trials must be >= 1")


def _best_of_trials(draw, class_count, code_length, seed, trials):
    best, best_d = None, -1
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        z = draw(rng, (class_count, code_length))
        if _problems(z):
            continue
        m = CodeMatrix(z)
        d = min_row_distance(m)
        if d > best_d:
            best, best_d = m, d
    if best is None:
        raise GenerationFailed(f"no valid {class_count}x{code_length} matrix in {trials} trials")
    return best


def _draw_dense(rng, shape):
    return rng.integers(0, 2, size=shape).astype(np.int8)


def _draw_sparse(rng, shape):
    return rng.choice(
        np.array([0, 1, DONT_CARE], dtype=np.int8), size=shape, p=[0.25, 0.25, 0.5]
    )


def dense_random(class_count: int, code_length: int = DEFAULT_DENSE_LENGTH,
                 seed: int = 0, trials: int = 100) -> CodeMatrix:
    """Best of ``trials`` uniformly random binary matrices.

    Candidates failing :func:`validate` are discarded; the survivor with the
    largest minimum row distance wins, the earliest trial on ties. Trial ``t``
    draws from ``default_rng([seed, t])`` so results do not depend on the
    order in which trials are evaluated.
    """
    _check_random_args(class_count, code_length, trials)
    return _best_of_trials(_draw_dense, class_count, code_length, seed, trials)


def sparse_random(class_count: int, code_length: int = DEFAULT_SPARSE_LENGTH,
                  seed: int = 0, trials: int = 100) -> CodeMatrix:
    """Like :func:`dense_random` with entries 0/1/don't-care at rates 1/4, 1/4, 1/2."""
    _check_random_args(class_count, code_length, trials)
    return _best_of_trials(_draw_sparse, class_count, code_length, seed, trials)


# ---------------------------------------------------------------------------
# BCH


@lru_cache(maxsize=None)
def _gf_tables(m):
    size = 2 ** m
    exp = [0] * (2 * size)
    log = [0] * size
    x = 1
    for i in range(size - 1):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & size:
            x ^= _PRIMITIVE_POLYNOMIALS[m]
    for i in range(size - 1, 2 * size):
        exp[i] = exp[i - (size - 1)]
    return tuple(exp), tuple(log)


def _gf_mul(a, b, m):
    if a == 0 or b == 0:
        return 0
    exp, log = _gf_tables(m)
    return exp[log[a] + log[b]]


def _cyclotomic_coset(i, n):
    coset, j = [], i % n
    while j not in coset:
        coset.append(j)
        j = (2 * j) % n
    return tuple(sorted(coset))


def _minimal_polynomial(i, m):
    """Minimal polynomial of alpha**i over GF(2), as an int bitmask."""
    n = 2 ** m - 1
    exp, _ = _gf_tables(m)
    poly = [1]  # coefficients in GF(2^m), lowest degree first
    for j in _cyclotomic_coset(i, n):
        root = exp[j]
        nxt = [0] * (len(poly) + 1)
        for k, c in enumerate(poly):
            nxt[k + 1] ^= c
            nxt[k] ^= _gf_mul(c, root, m)
        poly = nxt
    if any(c not in (0, 1) for c in poly):
        raise ArithmeticError("minimal polynomial left GF(2)")
    return sum(c << k for k, c in enumerate(poly))


def _clmul(a, b):
    """Product of two GF(2) polynomials encoded as int bitmasks."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def bch_generator_polynomial(block_length: int, design_t: int) -> int:
    """Generator of the narrow-sense binary BCH code correcting ``design_t`` errors.

    Returned as an int whose bit ``i`` is the coefficient of ``x**i``.
    """
    if block_length not in BCH_BLOCK_LENGTHS:
        raise UnsupportedSize(f"BCH block length must be one of {BCH_BLOCK_LENGTHS}")
    m = block_length.bit_length()
    g, seen = 1, set()
    for i in range(1, 2 * design_t + 1):
        coset = _cyclotomic_coset(i, block_length)
        if coset in seen:
            continue
        seen.add(coset)
        g = _clmul(g, _minimal_polynomial(i, m))
    return g


@lru_cache(maxsize=None)
def bch_parameters(block_length: int) -> tuple[tuple[int, int, int], ...]:
    """Standard ``(k, t, generator)`` triples of length ``block_length``, k descending.

    For each message size the largest design error count is kept, so the
    design distance ``2t + 1`` is the best this construction certifies.
    """
    if block_length not in BCH_BLOCK_LENGTHS:
        raise UnsupportedSize(f"BCH block length must be one of {BCH_BLOCK_LENGTHS}")
    by_k = {}
    for t in range(1, block_length // 2 + 1):
        g = bch_generator_polynomial(block_length, t)
        k = block_length - (g.bit_length() - 1)
        if k < 1:
            break
        by_k[k] = (k, t, g)
    return tuple(sorted(by_k.values(), reverse=True))


def bch_codeword(message: int, generator: int, block_length: int) -> np.ndarray:
    c = _clmul(message, generator)
    return np.array([(c >> j) & 1 for j in range(block_length)], dtype=np.int8)


def _violation_count(z):
    const = int((z.min(axis=0) == z.max(axis=0)).sum())
    return const + len(_column_clashes(z))


def _repair_selection(book, selected):
    """Greedy codeword swaps until no constant or clashing columns remain.

    Each step takes the swap (selected slot, unused codeword) that lowers the
    violation count most, scanning slots and candidates in index order so the
    first best swap wins.
    """
    selected = list(selected)
    current = _violation_count(book[selected])
    while current:
        unused = [i for i in range(1, len(book)) if i not in selected]
        best = (current, None, None)
        for slot in range(len(selected)):
            for cand in unused:
                trial = selected.copy()
                trial[slot] = cand
                v = _violation_count(book[trial])
                if v < best[0]:
                    best = (v, slot, cand)
        if best[1] is None:
            raise GenerationFailed("greedy codeword swaps could not remove constant columns")
        current, slot, cand = best
        selected[slot] = cand
    return selected


def bch(class_count: int, block_length: int = 31) -> CodeMatrix:
    """Rows drawn from a binary BCH code of length 15, 31 or 63.

    Uses the smallest standard message size ``k`` with ``2**k >= C``. Row
    ``i`` starts as the codeword of message ``i + 1`` (non-systematic
    encoding ``m(x) g(x)``); rows are then swapped for unused codewords until
    :func:`validate` passes. Every row stays a nonzero codeword of a linear
    code, so the minimum row distance is at least the code's design distance.
    """
    _check_class_count(class_count)
    params = [p for p in bch_parameters(block_length) if 2 ** p[0] >= class_count]
    if not params:
        raise UnsupportedSize(
            f"no BCH code of length {block_length} has {class_count} codewords"
        )
    k, _, g = params[-1]
    book = np.array([bch_codeword(msg, g, block_length) for msg in range(2 ** k)])
    selected = _repair_selection(book, range(1, class_count + 1))
    matrix = CodeMatrix(book[selected])
    if not is_valid(matrix):
        raise GenerationFailed("; ".join(_problems(matrix.entries)))
    return matrix


# ---------------------------------------------------------------------------
# randomized hill climbing


def _score(z):
    ones = z.astype(np.int64)
    dist = ones @ (1 - ones).T
    dist = dist + dist.T
    np.fill_diagonal(dist, z.shape[1] + 1)
    d = int(dist.min())
    return d, -int((dist == d).sum())


def hill_climb_improve(matrix: CodeMatrix, iterations: int, seed: int = 0,
                       proposals: int = 4, on_accept=None) -> CodeMatrix:
    """Single-bit-flip hill climbing on a binary matrix.

    Each iteration draws ``proposals`` random entry flips. Flips that break
    :func:`validate` or lower the minimum row distance are dropped; of the
    rest, the one with the best ``(min distance, -pairs at min distance)``
    score is applied, so strictly improving flips win over neutral ones.
    ``on_accept(matrix)`` is called after every applied flip.
    """
    if not matrix.is_binary:
        raise InvalidMatrix("hill climbing needs a binary code matrix")
    validate(matrix)
    rng = np.random.default_rng(seed)
    z = matrix.entries.copy()
    c, b = z.shape
    current = _score(z)
    for _ in range(iterations):
        rows = rng.integers(0, c, size=proposals)
        cols = rng.integers(0, b, size=proposals)
        best = None
        for i, j in zip(rows, cols):
            z[i, j] ^= 1
            score = _score(z)
            if score[0] >= current[0] and (best is None or score > best[0]) and not _problems(z):
                best = (score, i, j)
            z[i, j] ^= 1
        if best is None:
            continue
        current, i, j = best
        z[i, j] ^= 1
        if on_accept is not None:
            on_accept(CodeMatrix(z))
    return CodeMatrix(z)


# ---------------------------------------------------------------------------
# targets and text I/O


def encode_targets(label: int, matrix: CodeMatrix) -> np.ma.MaskedArray:
    """Training target for ``label``: its codeword, don't-cares masked out."""
    if int(label) != label or not 0 <= label < matrix.class_count:
        raise InvalidLabel(f"label {label!r} outside 0..{matrix.class_count - 1}")
    row = matrix.entries[int(label)]
    return np.ma.MaskedArray(np.where(row == 1, 1.0, 0.0), mask=row == DONT_CARE)


def encode_labels(labels, matrix: CodeMatrix) -> np.ma.MaskedArray:
    """Stack :func:`encode_targets` over a label vector into an ``N x b`` array."""
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise InvalidLabel("labels must be a 1-D sequence")
    if labels.size and (labels.min() < 0 or labels.max() >= matrix.class_count
                        or not np.array_equal(labels, labels.astype(int))):
        raise InvalidLabel(f"labels must be integers in 0..{matrix.class_count - 1}")
    rows = matrix.entries[labels.astype(int)]
    return np.ma.MaskedArray(np.where(rows == 1, 1.0, 0.0), mask=rows == DONT_CARE)


def serialize(matrix: CodeMatrix) -> str:
    return "".join("".join(_TRIT_CHARS[int(v)] for v in row) + "\n" for row in matrix.entries)


def deserialize(text: str) -> CodeMatrix:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError("empty code matrix")
    width = len(lines[0])
    rows = []
    for lineno, line in enumerate(lines, start=1):
        if len(line) != width:
            raise ParseError(f"line {lineno}: expected {width} entries, got {len(line)}")
        try:
            rows.append([_CHAR_TRITS[ch] for ch in line])
        except KeyError as exc:
            raise ParseError(f"line {lineno}: unexpected character {exc.args[0]!r}") from None
    try:
        return CodeMatrix(rows)
    except InvalidMatrix as exc:
        raise ParseError(str(exc)) from None


def load(path) -> CodeMatrix:
    with open(path, encoding="ascii") as fh:
        return deserialize(fh.read())


def save(matrix: CodeMatrix, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(serialize(matrix))


GENERATORS = {
    "onevsall": one_vs_all,
    "onevsone": one_vs_one,
    "exhaustive": exhaustive,
    "dense": dense_random,
    "sparse": sparse_random,
    "bch": bch,
}
