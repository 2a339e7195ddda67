"""Bit-packed truth tables with Shannon cofactoring and cut-driven decomposition.

Minterm ``m`` of an ``n``-variable table lives at bit ``m`` of the packed word
array, with variable 0 as the least significant bit of the minterm index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

MAX_VARS = 16
DEFAULT_WORD_WIDTH = 64


class TruthTableError(ValueError):
    pass


def n_words_for(num_vars: int, word_width: int = DEFAULT_WORD_WIDTH) -> int:
    return max(1, (1 << num_vars) // word_width)


def _check_word_width(word_width: int) -> None:
    if word_width < 8 or word_width & (word_width - 1):
        raise TruthTableError(f"word width must be a power of two >= 8, got {word_width}")


def _pack(value: int, num_vars: int, word_width: int) -> tuple[int, ...]:
    mask = (1 << word_width) - 1
    return tuple((value >> (i * word_width)) & mask
                 for i in range(n_words_for(num_vars, word_width)))


@dataclass(frozen=True)
class TruthTable:
    """Boolean function over ``num_vars`` variables stored as fixed-width words."""

    num_vars: int
    words: tuple[int, ...]
    word_width: int = DEFAULT_WORD_WIDTH

    def __post_init__(self):
        if not 0 <= self.num_vars <= MAX_VARS:
            raise TruthTableError(f"num_vars must be in [0, {MAX_VARS}], got {self.num_vars}")
        _check_word_width(self.word_width)
        if len(self.words) != n_words_for(self.num_vars, self.word_width):
            raise TruthTableError(
                f"expected {n_words_for(self.num_vars, self.word_width)} words, got {len(self.words)}")
        size = 1 << self.num_vars
        for w in self.words:
            if not 0 <= w < (1 << self.word_width):
                raise TruthTableError("word out of range")
        if size < self.word_width and self.words[0] >> size:
            raise TruthTableError("padding bits beyond 2^n must be zero")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_int(cls, num_vars: int, value: int,
                 word_width: int = DEFAULT_WORD_WIDTH) -> TruthTable:
        if value < 0 or value >> (1 << num_vars):
            raise TruthTableError(f"value does not fit in {1 << num_vars} bits")
        _check_word_width(word_width)
        return cls(num_vars, _pack(value, num_vars, word_width), word_width)

    @classmethod
    def from_hex(cls, num_vars: int, text: str,
                 word_width: int = DEFAULT_WORD_WIDTH) -> TruthTable:
        """Parse a hex literal, most-significant minterm first (``"E8"`` is MAJ3)."""
        try:
            value = int(text, 16)
        except ValueError:
            raise TruthTableError(f"bad hex literal {text!r}") from None
        return cls.from_int(num_vars, value, word_width)

    @classmethod
    def from_minterms(cls, num_vars: int, minterms: Iterable[int],
                      word_width: int = DEFAULT_WORD_WIDTH) -> TruthTable:
        value = 0
        for m in minterms:
            if not 0 <= m < (1 << num_vars):
                raise TruthTableError(f"minterm {m} out of range")
            value |= 1 << m
        return cls.from_int(num_vars, value, word_width)

    @classmethod
    def from_function(cls, num_vars: int, fn: Callable[..., int],
                      word_width: int = DEFAULT_WORD_WIDTH) -> TruthTable:
        """Tabulate ``fn(x0, x1, ...)`` over every assignment."""
        value = 0
        for m in range(1 << num_vars):
            if fn(*((m >> i) & 1 for i in range(num_vars))):
                value |= 1 << m
        return cls.from_int(num_vars, value, word_width)

    @classmethod
    def constant(cls, bit: int, num_vars: int = 0,
                 word_width: int = DEFAULT_WORD_WIDTH) -> TruthTable:
        value = (1 << (1 << num_vars)) - 1 if bit else 0
        return cls.from_int(num_vars, value, word_width)

    # -- views ------------------------------------------------------------

    def to_int(self) -> int:
        value = 0
        for i, w in enumerate(self.words):
            value |= w << (i * self.word_width)
        return value

    def to_hex(self) -> str:
        digits = max(1, (1 << self.num_vars) // 4)
        return format(self.to_int(), f"0{digits}X")

    def bit(self, m: int) -> int:
        return (self.words[m // self.word_width] >> (m % self.word_width)) & 1

    def minterms(self) -> list[int]:
        out = []
        for wi, w in enumerate(self.words):
            base = wi * self.word_width
            while w:
                low = w & -w
                out.append(base + low.bit_length() - 1)
                w ^= low
        return out

    def popcount(self) -> int:
        return sum(bin(w).count("1") for w in self.words)

    def is_constant(self) -> Optional[int]:
        value = self.to_int()
        if value == 0:
            return 0
        if value == (1 << (1 << self.num_vars)) - 1:
            return 1
        return None

    def depends_on(self, p: int) -> bool:
        return shannon_cofactor(self, p, 0) != shannon_cofactor(self, p, 1)

    def __repr__(self):
        return f"TruthTable(n={self.num_vars}, 0x{self.to_hex()})"


def tt_eval(t: TruthTable, assignment: Sequence[int]) -> int:
    """Value of ``t`` at the minterm selected by ``assignment`` (variable i = assignment[i])."""
    if len(assignment) != t.num_vars:
        raise TruthTableError(
            f"assignment has {len(assignment)} bits, table has {t.num_vars} variables")
    m = 0
    for i, b in enumerate(assignment):
        if b:
            m |= 1 << i
    return t.bit(m)


def shannon_cofactor(t_src: TruthTable, p: int, v: int) -> TruthTable:
    """Restrict ``t_src`` to ``x_p = v``, collapsing bit ``p`` out of every minterm index."""
    n = t_src.num_vars
    if n == 0:
        raise TruthTableError("cannot cofactor a 0-variable table")
    if not 0 <= p < n:
        raise TruthTableError(f"variable position {p} out of range for {n} variables")
    if v not in (0, 1):
        raise TruthTableError(f"cofactor value must be 0 or 1, got {v}")
    ww = t_src.word_width
    dst = [0] * n_words_for(n - 1, ww)
    low_mask = (1 << p) - 1
    for m in t_src.minterms():
        if (m >> p) & 1 == v:
            m2 = (m & low_mask) | ((m >> (p + 1)) << p)
            dst[m2 // ww] |= 1 << (m2 % ww)
    return TruthTable(n - 1, tuple(dst), ww)


def concat_cofactors(t1: TruthTable, t0: TruthTable) -> TruthTable:
    """Rebuild an n-variable table whose new most-significant variable selects t1 over t0."""
    if t1.num_vars != t0.num_vars:
        raise TruthTableError(
            f"cofactor size mismatch: {t1.num_vars} vs {t0.num_vars} variables")
    if t1.word_width != t0.word_width:
        raise TruthTableError("cofactor word widths differ")
    n = t1.num_vars + 1
    if n > MAX_VARS:
        raise TruthTableError(f"result would exceed {MAX_VARS} variables")
    ww = t1.word_width
    half = 1 << (n - 1)
    if half >= ww:
        # both halves are whole words: plain block copy
        return TruthTable(n, t0.words + t1.words, ww)
    return TruthTable(n, ((t1.words[0] << half) | t0.words[0],), ww)


def permute(t: TruthTable, order: Sequence[int]) -> TruthTable:
    """Reorder variables: new variable j is old variable ``order[j]``."""
    n = t.num_vars
    if sorted(order) != list(range(n)):
        raise TruthTableError(f"{order!r} is not a permutation of {n} variables")
    value = 0
    for m_new in range(1 << n):
        m_old = 0
        for j, old in enumerate(order):
            if (m_new >> j) & 1:
                m_old |= 1 << old
        if t.bit(m_old):
            value |= 1 << m_new
    return TruthTable.from_int(n, value, t.word_width)


def move_to_msb(t: TruthTable, p: int) -> TruthTable:
    order = [i for i in range(t.num_vars) if i != p] + [p]
    return permute(t, order)


@dataclass(frozen=True)
class Cut:
    """A left/right cut pair; entries are global variable indices."""

    left_vars: tuple[int, ...]
    right_vars: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "left_vars", tuple(self.left_vars))
        object.__setattr__(self, "right_vars", tuple(self.right_vars))
        for side in (self.left_vars, self.right_vars):
            if len(set(side)) != len(side):
                raise TruthTableError(f"repeated variable in cut side {side!r}")

    def support(self) -> tuple[int, ...]:
        """Right variables followed by the left-only variables, in list order."""
        right = set(self.right_vars)
        return self.right_vars + tuple(v for v in self.left_vars if v not in right)


def find_split_var(cut: Cut, side: str) -> Optional[int]:
    if side == "right":
        mine, other = cut.right_vars, cut.left_vars
    elif side == "left":
        mine, other = cut.left_vars, cut.right_vars
    else:
        raise TruthTableError(f"side must be 'left' or 'right', got {side!r}")
    shared = set(other)
    for v in mine:
        if v not in shared:
            return v
    return None


@dataclass(frozen=True)
class SplitStep:
    side: str
    var: int
    position: int
    t1: TruthTable
    t0: TruthTable


@dataclass(frozen=True)
class DecomposeTrace:
    """Record of the splits performed and the variable binding before/after.

    ``binding_in[i]`` is the global variable bound to input ``i`` of the
    original table; ``binding_out`` is the same for the returned table.
    """

    steps: tuple[SplitStep, ...]
    binding_in: tuple[int, ...]
    binding_out: tuple[int, ...]


def truth_table_decompose(t: TruthTable, cut: Cut, counter: int,
                          threshold: int) -> tuple[TruthTable, DecomposeTrace]:
    """Shannon-split ``t`` once on each cut side when its net is active enough.

    ``t`` is bound to ``cut.support()``. Only nets whose toggle ``counter``
    strictly exceeds ``threshold`` are decomposed. Each split moves the split
    variable to the most-significant position of the rebuilt table.
    """
    if counter < 0 or threshold < 0:
        raise TruthTableError("counter and threshold must be nonnegative")
    binding = cut.support()
    if t.num_vars != len(binding):
        raise TruthTableError(
            f"table has {t.num_vars} variables but the cut binds {len(binding)}")
    if not counter > threshold:
        return t, DecomposeTrace((), binding, binding)

    steps = []
    for side in ("right", "left"):
        var = find_split_var(cut, side)
        if var is None:
            continue
        pos = binding.index(var)
        t0 = shannon_cofactor(t, pos, 0)
        t1 = shannon_cofactor(t, pos, 1)
        t = concat_cofactors(t1, t0)
        binding = binding[:pos] + binding[pos + 1:] + (var,)
        steps.append(SplitStep(side, var, pos, t1, t0))
    return t, DecomposeTrace(tuple(steps), cut.support(), binding)
