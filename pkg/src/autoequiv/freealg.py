"""Noncommutative polynomials in two letters and the commutator basis.

Words are packed bit sequences (x = 0, y = 1, leftmost letter in the most
significant position), so concatenation is a shift-or and comparison under
the length-then-lex order is integer comparison.  The basis normal form
rewrites yx into xy minus a frozen commutator factor until no inversion
outside a commutator remains.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .commalg import Scalar, as_scalar, format_comm  # noqa: F401  (shared coeff rendering)

X_LETTER = 0
Y_LETTER = 1


class Word:
    """A word over {x, y}; immutable."""

    __slots__ = ("length", "bits")

    def __init__(self, length: int, bits: int):
        self.length = length
        self.bits = bits

    @staticmethod
    def empty() -> "Word":
        return Word(0, 0)

    @staticmethod
    def from_letters(letters: Iterable[int]) -> "Word":
        bits = 0
        n = 0
        for l in letters:
            bits = (bits << 1) | l
            n += 1
        return Word(n, bits)

    @staticmethod
    def parse(text: str) -> "Word":
        return Word.from_letters(0 if ch == "x" else 1 for ch in text)

    def letters(self) -> list[int]:
        return [(self.bits >> (self.length - 1 - i)) & 1 for i in range(self.length)]

    def concat(self, other: "Word") -> "Word":
        return Word(self.length + other.length, (self.bits << other.length) | other.bits)

    def swap(self) -> "Word":
        """Exchange the two letters (the image under tau), order preserved."""
        mask = (1 << self.length) - 1
        return Word(self.length, self.bits ^ mask)

    def deg_y(self) -> int:
        return bin(self.bits).count("1")

    def deg_x(self) -> int:
        return self.length - self.deg_y()

    def key(self) -> tuple[int, int]:
        return (self.length, self.bits)

    def runs(self) -> list[tuple[int, int]]:
        """Maximal runs as (letter, count) pairs."""
        out: list[tuple[int, int]] = []
        for l in self.letters():
            if out and out[-1][0] == l:
                out[-1] = (l, out[-1][1] + 1)
            else:
                out.append((l, 1))
        return out

    def __eq__(self, other):
        return isinstance(other, Word) and self.length == other.length and self.bits == other.bits

    def __hash__(self):
        return hash((self.length, self.bits))

    def __lt__(self, other: "Word"):
        return self.key() < other.key()

    def __str__(self):
        if self.length == 0:
            return "1"
        parts = []
        for l, n in self.runs():
            name = "x" if l == X_LETTER else "y"
            parts.append(name if n == 1 else "%s^%d" % (name, n))
        return "*".join(parts)

    def __repr__(self):
        return "Word(%s)" % str(self)


class FreePoly:
    """Noncommutative polynomial: finite map from Word to nonzero Fraction."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[dict[Word, Fraction]] = None):
        self.terms = terms if terms is not None else {}

    @staticmethod
    def make(terms: dict[Word, Fraction | int]) -> "FreePoly":
        clean: dict[Word, Fraction] = {}
        for w, c in terms.items():
            c = as_scalar(c)
            if c != 0:
                clean[w] = clean.get(w, Fraction(0)) + c
                if clean[w] == 0:
                    del clean[w]
        return FreePoly(clean)

    @staticmethod
    def zero() -> "FreePoly":
        return FreePoly({})

    @staticmethod
    def const(c) -> "FreePoly":
        c = as_scalar(c)
        return FreePoly({Word.empty(): c} if c != 0 else {})

    @staticmethod
    def letter(l: int) -> "FreePoly":
        return FreePoly({Word(1, l): Fraction(1)})

    @staticmethod
    def word(w: Word) -> "FreePoly":
        return FreePoly({w: Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(w.length == 0 for w in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("not a constant")
        return next(iter(self.terms.values()))

    def max_degree(self) -> int:
        """Largest word length in the support, 0 for the zero polynomial."""
        return max((w.length for w in self.terms), default=0)

    def __eq__(self, other):
        if not isinstance(other, FreePoly):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other) -> "FreePoly":
        if isinstance(other, (int, Fraction)):
            other = FreePoly.const(other)
        terms = dict(self.terms)
        for w, c in other.terms.items():
            s = terms.get(w, Fraction(0)) + c
            if s == 0:
                terms.pop(w, None)
            else:
                terms[w] = s
        return FreePoly(terms)

    __radd__ = __add__

    def __neg__(self) -> "FreePoly":
        return FreePoly({w: -c for w, c in self.terms.items()})

    def __sub__(self, other) -> "FreePoly":
        if isinstance(other, (int, Fraction)):
            other = FreePoly.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "FreePoly":
        return (-self) + other

    def __mul__(self, other) -> "FreePoly":
        if isinstance(other, (int, Fraction)):
            c = as_scalar(other)
            if c == 0:
                return FreePoly.zero()
            return FreePoly({w: k * c for w, k in self.terms.items()})
        terms: dict[Word, Fraction] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1.concat(w2)
                s = terms.get(w, Fraction(0)) + c1 * c2
                if s == 0:
                    terms.pop(w, None)
                else:
                    terms[w] = s
        return FreePoly(terms)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "FreePoly":
        if k < 0:
            raise ValueError("negative exponent")
        out = FreePoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def swap_letters(self) -> "FreePoly":
        return FreePoly({w.swap(): c for w, c in self.terms.items()})

    def __str__(self) -> str:
        return format_free(self)

    def __repr__(self) -> str:
        return "FreePoly(%s)" % format_free(self)


FREE_X = FreePoly.letter(X_LETTER)
FREE_Y = FreePoly.letter(Y_LETTER)


def commutator() -> FreePoly:
    return FREE_X * FREE_Y - FREE_Y * FREE_X


_COMM_POWERS: dict[int, FreePoly] = {}


def comm_power(k: int) -> FreePoly:
    """The expanded k-th power of [x,y], memoized."""
    if k not in _COMM_POWERS:
        if k == 0:
            _COMM_POWERS[k] = FreePoly.const(1)
        else:
            _COMM_POWERS[k] = comm_power(k - 1) * commutator()
    return _COMM_POWERS[k]


def free_substitute(u: FreePoly, image_x: FreePoly, image_y: FreePoly) -> FreePoly:
    """Substitute images for the letters, letter by letter."""
    out = FreePoly.zero()
    pow_cache: dict[tuple[int, int], FreePoly] = {}
    images = (image_x, image_y)
    for w, c in u.terms.items():
        term = FreePoly.const(c)
        for l, n in w.runs():
            key = (l, n)
            p = pow_cache.get(key)
            if p is None:
                p = images[l] ** n
                pow_cache[key] = p
            term = term * p
        out = out + term
    return out


# -- commutator basis ------------------------------------------------------

# rewriting alphabet: 0 = x, 1 = y, 2 = frozen commutator factor
_C_SYMBOL = 2

_REWRITE_CACHE: dict[tuple[int, ...], dict[tuple[int, ...], Fraction]] = {}


def _rewrite(sym: tuple[int, ...]) -> dict[tuple[int, ...], Fraction]:
    """Normal form of a symbol string under yx -> xy - C, leftmost first."""
    cached = _REWRITE_CACHE.get(sym)
    if cached is not None:
        return cached
    pos = -1
    for i in range(len(sym) - 1):
        if sym[i] == Y_LETTER and sym[i + 1] == X_LETTER:
            pos = i
            break
    if pos < 0:
        result = {sym: Fraction(1)}
    else:
        swapped = sym[:pos] + (X_LETTER, Y_LETTER) + sym[pos + 2:]
        collapsed = sym[:pos] + (_C_SYMBOL,) + sym[pos + 2:]
        result = dict(_rewrite(swapped))
        for t, c in _rewrite(collapsed).items():
            s = result.get(t, Fraction(0)) - c
            if s == 0:
                result.pop(t, None)
            else:
                result[t] = s
    _REWRITE_CACHE[sym] = result
    return result


@dataclass(frozen=True)
class CommBasisTerm:
    """Basis element x^a1 y^b1 C x^a2 y^b2 ... C x^ar+1 y^br+1."""

    blocks: tuple[tuple[int, int], ...]

    @property
    def r(self) -> int:
        return len(self.blocks) - 1

    @property
    def degree(self) -> int:
        return sum(a + b for a, b in self.blocks) + 2 * self.r

    def is_pure_commutator(self) -> bool:
        return all(a == 0 and b == 0 for a, b in self.blocks)

    def sort_key(self):
        return (self.degree, self.r, self.blocks)

    def expand(self) -> FreePoly:
        out = FreePoly.const(1)
        for i, (a, b) in enumerate(self.blocks):
            if i > 0:
                out = out * commutator()
            out = out * FREE_X ** a * FREE_Y ** b
        return out

    def __str__(self):
        parts = []
        for i, (a, b) in enumerate(self.blocks):
            if i > 0:
                parts.append("C")
            if a:
                parts.append("x" if a == 1 else "x^%d" % a)
            if b:
                parts.append("y" if b == 1 else "y^%d" % b)
        if not parts:
            return "1"
        return "*".join(parts)


def _symbols_to_term(sym: tuple[int, ...]) -> CommBasisTerm:
    blocks = []
    a = b = 0
    for s in sym:
        if s == _C_SYMBOL:
            blocks.append((a, b))
            a = b = 0
        elif s == X_LETTER:
            assert b == 0, "unsorted block in rewriting output"
            a += 1
        else:
            b += 1
    blocks.append((a, b))
    return CommBasisTerm(tuple(blocks))


class CommBasisForm:
    """Linear combination of CommBasisTerm values."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[dict[CommBasisTerm, Fraction]] = None):
        self.terms = terms if terms is not None else {}

    def __eq__(self, other):
        if not isinstance(other, CommBasisForm):
            return NotImplemented
        return self.terms == other.terms

    def coefficient(self, t: CommBasisTerm) -> Fraction:
        return self.terms.get(t, Fraction(0))

    def __add__(self, other: "CommBasisForm") -> "CommBasisForm":
        terms = dict(self.terms)
        for t, c in other.terms.items():
            s = terms.get(t, Fraction(0)) + c
            if s == 0:
                terms.pop(t, None)
            else:
                terms[t] = s
        return CommBasisForm(terms)

    def scale(self, c) -> "CommBasisForm":
        c = as_scalar(c)
        if c == 0:
            return CommBasisForm()
        return CommBasisForm({t: k * c for t, k in self.terms.items()})

    def __str__(self) -> str:
        return format_basis(self)

    def __repr__(self) -> str:
        return "CommBasisForm(%s)" % format_basis(self)


def to_comm_basis(u: FreePoly) -> CommBasisForm:
    out: dict[CommBasisTerm, Fraction] = {}
    for w, c in u.terms.items():
        for sym, k in _rewrite(tuple(w.letters())).items():
            t = _symbols_to_term(sym)
            s = out.get(t, Fraction(0)) + c * k
            if s == 0:
                out.pop(t, None)
            else:
                out[t] = s
    return CommBasisForm(out)


def from_comm_basis(c: CommBasisForm) -> FreePoly:
    out = FreePoly.zero()
    for t, k in c.terms.items():
        out = out + t.expand() * k
    return out


def v_membership(u: FreePoly) -> Optional[list[Fraction]]:
    """Coefficients lambda_k with u = sum lambda_k [x,y]^k, or None."""
    form = to_comm_basis(u)
    lam: dict[int, Fraction] = {}
    for t, c in form.terms.items():
        if not t.is_pure_commutator():
            return None
        lam[t.r] = c
    top = max(lam, default=-1)
    return [lam.get(k, Fraction(0)) for k in range(top + 1)]


def v_split(u: FreePoly) -> tuple[FreePoly, dict[int, Fraction]]:
    """Canonical representative of the class of u, and the removed part.

    The removed part is returned as exponent-to-coefficient over powers of
    the commutator.
    """
    form = to_comm_basis(u)
    rep = CommBasisForm({t: c for t, c in form.terms.items() if not t.is_pure_commutator()})
    vpart = {t.r: c for t, c in form.terms.items() if t.is_pure_commutator()}
    return from_comm_basis(rep), vpart


def quotient_project(u: FreePoly) -> FreePoly:
    return v_split(u)[0]


def quotient_degrees(u: FreePoly) -> tuple[int, int, int, bool]:
    rep = quotient_project(u)
    if rep.is_zero():
        raise ValueError("element lies in V")
    d = rep.max_degree()
    dx = max(w.deg_x() for w in rep.terms)
    dy = max(w.deg_y() for w in rep.terms)
    lead = [w for w in rep.terms if w.length == d]
    lx = max(w.deg_x() for w in lead)
    ly = max(w.deg_y() for w in lead)
    return d, dx, dy, lx >= ly


# -- printing --------------------------------------------------------------


def _join_signed(parts: list[tuple[bool, str]]) -> str:
    out = []
    for i, (neg, body) in enumerate(parts):
        if i == 0:
            out.append("-" + body if neg else body)
        else:
            out.append(" - " + body if neg else " + " + body)
    return "".join(out)


def _coeff_body(c: Fraction, factors: str) -> str:
    mag = abs(c)
    if not factors:
        return _fmt_q(mag)
    if mag == 1:
        return factors
    return "%s*%s" % (_fmt_q(mag), factors)


def _fmt_q(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return "%d/%d" % (c.numerator, c.denominator)


def format_free(u: FreePoly) -> str:
    if u.is_zero():
        return "0"
    parts = []
    for w in sorted(u.terms, key=Word.key):
        c = u.terms[w]
        factors = str(w) if w.length else ""
        parts.append((c < 0, _coeff_body(c, factors)))
    return _join_signed(parts)


def format_basis(f: CommBasisForm) -> str:
    if not f.terms:
        return "0"
    parts = []
    for t in sorted(f.terms, key=CommBasisTerm.sort_key):
        c = f.terms[t]
        s = str(t)
        factors = s if s != "1" else ""
        parts.append((c < 0, _coeff_body(c, factors)))
    return _join_signed(parts)
