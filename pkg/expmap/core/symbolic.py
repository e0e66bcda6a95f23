import functools
import itertools
import math
import re
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Optional, Tuple

from expmap.core.dynamics import NumericalFailure

HALF = Fraction(1, 2)


class AmbiguousStrip(NumericalFailure):
    """The imaginary part is too close to a strip boundary to trust the strip index."""

    def __init__(self, z):
        self.z = z
        super().__init__(f"{z} lies on the boundary between two strips")


class PeriodMismatch(ValueError):
    pass


class AddressSyntaxError(ValueError):
    pass


class Order(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _primitive(block):
    for length in range(1, len(block) + 1):
        if len(block) % length == 0 and block == block[:length] * (len(block) // length):
            return block[:length]
    return block


def _canonical(preperiod, period):
    period = _primitive(tuple(period))
    preperiod = tuple(preperiod)
    while preperiod and preperiod[-1] == period[-1]:
        preperiod = preperiod[:-1]
        period = period[-1:] + period[:-1]
    return preperiod, period


@dataclass(frozen=True)
class ExternalAddress:
    """
    The eventually periodic sequence ``preperiod`` followed by ``period`` repeated forever.
    Instances are always stored in canonical form (primitive period, shortest preperiod),
    so equality of records is equality of sequences.
    """

    preperiod: Tuple[int, ...]
    period: Tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("the period of an external address must not be empty")
        for entry in itertools.chain(self.preperiod, self.period):
            if isinstance(entry, bool) or int(entry) != entry:
                raise ValueError(f"external address entries are integers, got {entry!r}")
        preperiod, period = _canonical(
            (int(entry) for entry in self.preperiod), (int(entry) for entry in self.period)
        )
        object.__setattr__(self, "preperiod", preperiod)
        object.__setattr__(self, "period", period)

    @classmethod
    def periodic(cls, *entries):
        return cls((), tuple(entries))

    @property
    def is_periodic(self):
        return not self.preperiod

    def entry(self, i):
        """The entry s_i, counted from 1."""
        if i < 1:
            raise IndexError("addresses are indexed from 1")
        if i <= len(self.preperiod):
            return self.preperiod[i - 1]
        return self.period[(i - len(self.preperiod) - 1) % len(self.period)]

    def prefix(self, n):
        return [self.entry(i) for i in range(1, n + 1)]

    def prepend(self, k):
        """The address k s."""
        return ExternalAddress((k,) + self.preperiod, self.period)

    def __str__(self):
        return format_address(self)


@dataclass(frozen=True)
class IntermediateAddress:
    """A finite address s_1 ... s_{n-1}, integers except for the final half-integer."""

    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        entries = tuple(Fraction(entry) for entry in self.entries)
        if not entries:
            raise ValueError("an intermediate address has at least one entry")
        if any(entry.denominator != 1 for entry in entries[:-1]):
            raise ValueError("only the last entry of an intermediate address is a half-integer")
        if entries[-1].denominator != 2:
            raise ValueError("the last entry of an intermediate address is a half-integer")
        object.__setattr__(self, "entries", entries)

    @property
    def period(self):
        """Period of the hyperbolic components labelled by this address."""
        return len(self.entries) + 1

    def entry(self, i):
        if i < 1:
            raise IndexError("addresses are indexed from 1")
        return self.entries[i - 1] if i <= len(self.entries) else None

    def prefix(self, n):
        return list(self.entries[:n])

    def __str__(self):
        return format_address(self)


@dataclass(frozen=True)
class Plain:
    k: int

    def __str__(self):
        return str(self.k)


@dataclass(frozen=True)
class Boundary:
    """The boundary symbol <k-1|k>."""

    k: int

    def __str__(self):
        return f"<{self.k - 1}|{self.k}>"


@dataclass(frozen=True)
class KneadingSequence:
    preperiod: tuple
    period: tuple

    def __post_init__(self):
        if not self.period:
            raise ValueError("the period of a kneading sequence must not be empty")
        preperiod, period = _canonical(self.preperiod, self.period)
        object.__setattr__(self, "preperiod", preperiod)
        object.__setattr__(self, "period", period)

    @property
    def is_periodic(self):
        return not self.preperiod

    @property
    def has_boundary_symbol(self):
        return any(
            isinstance(symbol, Boundary) for symbol in itertools.chain(self.preperiod, self.period)
        )

    def entry(self, i):
        if i < 1:
            raise IndexError("kneading sequences are indexed from 1")
        if i <= len(self.preperiod):
            return self.preperiod[i - 1]
        return self.period[(i - len(self.preperiod) - 1) % len(self.period)]

    def __str__(self):
        return format_kneading(self)


def shift(s):
    if s.preperiod:
        return ExternalAddress(s.preperiod[1:], s.period)
    return ExternalAddress((), s.period[1:] + s.period[:1])


def _comparison_length(a, b):
    finite = [len(x.entries) for x in (a, b) if isinstance(x, IntermediateAddress)]
    if finite:
        return min(finite)
    return (
        len(a.preperiod)
        + len(b.preperiod)
        + math.lcm(len(a.period), len(b.period))
        + 1
    )


def lex_compare(a, b):
    """
    Exact lexicographic comparison of external or intermediate addresses.
    Two eventually periodic sequences agreeing on the first
    len(pre_a) + len(pre_b) + lcm(|per_a|, |per_b|) positions agree everywhere; a half-integer
    entry lies strictly between its integer neighbours and ends the comparison.
    """
    for i in range(1, _comparison_length(a, b) + 1):
        x, y = a.entry(i), b.entry(i)
        if x < y:
            return Order.LESS
        if x > y:
            return Order.GREATER
    return Order.EQUAL


def lex_compare_bruteforce(a, b, length=64):
    """Compare explicit prefixes, independent of :func:`lex_compare`."""
    x, y = a.prefix(length), b.prefix(length)
    return Order((x > y) - (x < y))


lex_sort_key = functools.cmp_to_key(lex_compare)


def kneading_sequence(s):
    """
    K(s)_i = k iff sigma^(i-1)(s) lies in the open interval (ks, (k+1)s), and <k-1|k> iff
    sigma^(i-1)(s) = ks. With u = sigma^(i-1)(s) this only needs the comparison of sigma(u)
    with s: larger gives k = u_1, smaller gives k = u_1 - 1 and equality the boundary symbol.
    """
    if not isinstance(s, ExternalAddress):
        raise TypeError("kneading sequences are defined for external addresses only")
    symbols = []
    u = s
    for _ in range(len(s.preperiod) + len(s.period)):
        order = lex_compare(shift(u), s)
        first = u.entry(1)
        if order == Order.GREATER:
            symbols.append(Plain(first))
        elif order == Order.LESS:
            symbols.append(Plain(first - 1))
        else:
            symbols.append(Boundary(first))
        u = shift(u)
    return KneadingSequence(
        tuple(symbols[: len(s.preperiod)]), tuple(symbols[len(s.preperiod) :])
    )


@dataclass(frozen=True)
class Disagreement:
    index: int
    boundary_compatible: bool


def _compatible(x, y):
    if isinstance(x, Plain):
        x, y = y, x
    return isinstance(x, Boundary) and isinstance(y, Plain) and y.k in (x.k - 1, x.k)


def first_kneading_disagreement(first, second) -> Optional[Disagreement]:
    """
    First position where K(first) and K(second) differ, or ``None`` when they agree forever.
    A boundary symbol never equals a plain one; ``boundary_compatible`` tells whether the
    plain entry is one of the two integers the boundary symbol straddles.
    """
    if first == second:
        raise ValueError("the kneading sequences of equal addresses never disagree")
    k1, k2 = kneading_sequence(first), kneading_sequence(second)
    length = len(k1.preperiod) + len(k2.preperiod) + math.lcm(len(k1.period), len(k2.period))
    for i in range(1, length + 1):
        x, y = k1.entry(i), k2.entry(i)
        if x != y:
            return Disagreement(index=i, boundary_compatible=_compatible(x, y))
    return None


def sector_almost_equal(kneading, sectors, q):
    """
    Whether K agrees with the sector sequence (k_1 ... k_n) repeated, except at multiples of
    q*n where it carries <k_i - 1|k_i> or <k_i|k_i + 1>.
    """
    n = len(sectors)
    if n < 1 or q < 1:
        raise ValueError("need a nonempty sector sequence and q >= 1")
    if not kneading.is_periodic or (q * n) % len(kneading.period):
        raise PeriodMismatch(
            f"kneading sequence {kneading} is not periodic of period {q * n}"
        )
    for i in range(1, q * n + 1):
        k = sectors[(i - 1) % n]
        symbol = kneading.entry(i)
        if i % (q * n) == 0:
            if symbol not in (Boundary(k), Boundary(k + 1)):
                return False
        elif symbol != Plain(k):
            return False
    return True


def strip_index(z, tolerance=1e-3):
    """Index of the horizontal strip of height 2*pi around 2*pi*k that contains z."""
    x = z.imag / (2 * math.pi)
    if abs(abs(x - math.floor(x)) - 0.5) < tolerance:
        raise AmbiguousStrip(z)
    return math.floor(x + 0.5)


def address_of_escape(points, tolerance=1e-3):
    """Itinerary s_{j+1} = strip of z_j of an escaping orbit."""
    return [strip_index(z, tolerance) for z in points]


def half_integer_index(z):
    """Nearest half-integer k + 1/2 to Im(z) / 2*pi."""
    return Fraction(math.floor(z.imag / (2 * math.pi)) * 2 + 1, 2)


def periodic_addresses(entries, max_period):
    """Every primitive periodic address with period at most ``max_period`` over ``entries``."""
    seen = set()
    for length in range(1, max_period + 1):
        for block in itertools.product(entries, repeat=length):
            if _primitive(block) != block:
                continue
            address = ExternalAddress((), block)
            if address not in seen:
                seen.add(address)
                yield address


ADDRESS_PATTERN = re.compile(r"^\[(?P<body>[^\[\]]*)\]$")


def _entries(text, context):
    if not text.strip():
        return []
    try:
        return [Fraction(item.strip()) for item in text.split(",")]
    except (ValueError, ZeroDivisionError) as e:
        raise AddressSyntaxError(f"cannot read the entries of {context!r}") from e


def parse_address(text):
    """
    Read ``[p1,...;q1,...]`` as an external address (preperiod before the semicolon) and
    ``[s1,...,k+1/2]`` as an intermediate address.
    """
    match = ADDRESS_PATTERN.match(text.strip())
    if match is None:
        raise AddressSyntaxError(f"{text!r} is not of the form [p1,...;q1,...] or [s1,...,k/2]")
    body = match.group("body")
    if ";" in body:
        preperiod_text, _, period_text = body.partition(";")
        if ";" in period_text:
            raise AddressSyntaxError(f"{text!r} contains more than one semicolon")
        preperiod, period = _entries(preperiod_text, text), _entries(period_text, text)
        if not period:
            raise AddressSyntaxError(f"the period of {text!r} is empty")
        if any(entry.denominator != 1 for entry in preperiod + period):
            raise AddressSyntaxError(f"external address {text!r} must have integer entries")
        return ExternalAddress(
            tuple(int(entry) for entry in preperiod), tuple(int(entry) for entry in period)
        )
    try:
        return IntermediateAddress(tuple(_entries(body, text)))
    except ValueError as e:
        raise AddressSyntaxError(str(e)) from e


def format_address(address):
    if isinstance(address, IntermediateAddress):
        return "[" + ",".join(str(entry) for entry in address.entries) + "]"
    return (
        "["
        + ",".join(str(entry) for entry in address.preperiod)
        + ";"
        + ",".join(str(entry) for entry in address.period)
        + "]"
    )


def format_kneading(kneading):
    period = ",".join(str(symbol) for symbol in kneading.period)
    if kneading.is_periodic:
        return f"{period} (period {len(kneading.period)})"
    preperiod = ",".join(str(symbol) for symbol in kneading.preperiod)
    return (
        f"{preperiod};{period} "
        f"(preperiod {len(kneading.preperiod)}, period {len(kneading.period)})"
    )
