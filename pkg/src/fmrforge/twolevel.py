"""Truth tables, cubes, prime implicants and minimum covers.

Vectors are integers read most-significant-bit first in variable order: for
variables ``A B C D`` the vector ``0101`` is ``5`` and ``A`` is bit 3.
A cube is a ``(care, value)`` pair of bit masks over the same layout.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .circuit import Netlist, exhaustive_input_words, simulate, unpack_bits
from .errors import ParseError

MAX_EXACT_INPUTS = 16
MAX_EXACT_PRIMES = 24


@dataclass(frozen=True)
class Cube:
    n: int
    care: int
    value: int

    def __post_init__(self):
        full = (1 << self.n) - 1
        if self.care & ~full or self.value & ~self.care:
            raise ValueError("cube value bits must lie inside the care mask")

    @classmethod
    def universal(cls, n: int) -> "Cube":
        return cls(n, 0, 0)

    @classmethod
    def from_literals(cls, n: int, literals: Iterable[tuple[int, bool]]) -> "Cube":
        care = value = 0
        for var, positive in literals:
            bit = 1 << (n - 1 - var)
            if care & bit and bool(value & bit) != positive:
                raise ValueError("contradictory literals in cube")
            care |= bit
            if positive:
                value |= bit
        return cls(n, care, value)

    @classmethod
    def parse(cls, text: str, names: Sequence[str]) -> "Cube":
        """Parse ``"BD"``, ``"~A·B"``, ``"A*~C"`` or ``"1"`` over ``names``."""
        text = text.strip()
        if text in ("1", ""):
            return cls.universal(len(names))
        index = {name: i for i, name in enumerate(names)}
        literals = []
        for token in re.split(r"[·*&\s]+", text):
            if not token:
                continue
            literals.extend(_parse_token(token, index, text))
        return cls.from_literals(len(names), literals)

    def literals(self) -> list[tuple[int, bool]]:
        """``(variable index, positive)`` in variable order."""
        out = []
        for var in range(self.n):
            bit = 1 << (self.n - 1 - var)
            if self.care & bit:
                out.append((var, bool(self.value & bit)))
        return out

    @property
    def num_literals(self) -> int:
        return bin(self.care).count("1")

    def contains(self, vector: int) -> bool:
        return (vector & self.care) == self.value

    def minterms(self) -> list[int]:
        free = [b for b in range(self.n) if not (self.care >> b) & 1]
        out = []
        for k in range(1 << len(free)):
            v = self.value
            for j, b in enumerate(free):
                if (k >> j) & 1:
                    v |= 1 << b
            out.append(v)
        return sorted(out)

    def sort_key(self):
        """Fewest literals first, then lexicographic over (variable, polarity)."""
        return (self.num_literals, tuple((v, not pos) for v, pos in self.literals()))

    def render(self, names: Sequence[str]) -> str:
        lits = self.literals()
        if not lits:
            return "1"
        parts = [names[v] if pos else "~" + names[v] for v, pos in lits]
        if all(pos for _, pos in lits) and all(len(names[v]) == 1 for v, _ in lits):
            return "".join(parts)
        return "·".join(parts)


def _parse_token(token: str, index: dict[str, int], whole: str):
    name = token.lstrip("~")
    negated = (len(token) - len(name)) % 2 == 1
    if name in index:
        return [(index[name], not negated)]
    # run of single-character names, e.g. "BD" or "A~B"
    out = []
    for m in re.finditer(r"(~*)([^~])", token):
        tilde, ch = m.groups()
        if ch not in index:
            raise ValueError(f"unknown variable in cube {whole!r}: {ch!r}")
        out.append((index[ch], len(tilde) % 2 == 0))
    if "".join(m.group(0) for m in re.finditer(r"(~*)([^~])", token)) != token or not out:
        raise ValueError(f"cannot parse cube {whole!r}")
    return out


@dataclass(frozen=True)
class TruthTable:
    names: tuple[str, ...]
    onset: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "onset", frozenset(self.onset))
        if any(not 0 <= v < (1 << self.n) for v in self.onset):
            raise ValueError("onset vector out of range")

    @property
    def n(self) -> int:
        return len(self.names)

    def __call__(self, vector: int) -> bool:
        return vector in self.onset

    @classmethod
    def from_function(cls, names: Sequence[str], fn) -> "TruthTable":
        n = len(names)
        return cls(tuple(names), frozenset(v for v in range(1 << n) if fn(v)))


@dataclass(frozen=True)
class Cover:
    n: int
    cubes: tuple[Cube, ...]
    optimal: bool = True

    def __call__(self, vector: int) -> bool:
        return any(c.contains(vector) for c in self.cubes)

    def __iter__(self):
        return iter(self.cubes)

    def __len__(self):
        return len(self.cubes)

    def render(self, names: Sequence[str]) -> str:
        if not self.cubes:
            return "0"
        return " + ".join(c.render(names) for c in self.cubes)


def _check_size(tt: TruthTable):
    if tt.n > MAX_EXACT_INPUTS:
        raise ValueError(f"exact two-level operations support at most {MAX_EXACT_INPUTS} inputs")


def prime_implicants(tt: TruthTable) -> list[Cube]:
    """All prime implicants by Quine-McCluskey tabulation, in ``sort_key`` order."""
    _check_size(tt)
    n = tt.n
    full = (1 << n) - 1
    level = {full: set(tt.onset)} if tt.onset else {}
    primes = []
    while level:
        nxt: dict[int, set[int]] = {}
        for care, values in level.items():
            merged = set()
            for v in values:
                bits = care
                while bits:
                    b = bits & -bits
                    bits ^= b
                    partner = v ^ b
                    if partner in values:
                        merged.add(v)
                        nxt.setdefault(care ^ b, set()).add(v & ~b)
            primes.extend(Cube(n, care, v) for v in values - merged)
        level = nxt
    return sorted(primes, key=Cube.sort_key)


def is_implicant(c: Cube, tt: TruthTable) -> bool:
    if c.n != tt.n:
        raise ValueError("cube arity does not match the truth table")
    return all(v in tt.onset for v in c.minterms())


def _cover_key(cubes):
    return (len(cubes), sum(c.num_literals for c in cubes), tuple(sorted(c.sort_key() for c in cubes)))


def minimal_cover(tt: TruthTable) -> Cover:
    """Minimum-cardinality prime cover.

    Exact branch and bound when there are at most 24 primes, greedy otherwise
    (then ``optimal`` is False).  Ties prefer fewer literals, then
    lexicographic cube order.
    """
    primes = prime_implicants(tt)
    n = tt.n
    if not primes:
        return Cover(n, ())
    covers = {v: [i for i, p in enumerate(primes) if p.contains(v)] for v in tt.onset}
    minterms = [frozenset(p.minterms()) for p in primes]

    chosen: set[int] = set()
    uncovered = set(tt.onset)
    for v in sorted(tt.onset):
        if len(covers[v]) == 1:
            chosen.add(covers[v][0])
    for i in chosen:
        uncovered -= minterms[i]

    if len(primes) <= MAX_EXACT_PRIMES:
        best = [None]

        def search(picked: frozenset, todo: frozenset):
            cubes = [primes[i] for i in picked]
            if best[0] is not None and len(picked) > len(best[0]):
                return
            if not todo:
                if best[0] is None or _cover_key(cubes) < _cover_key([primes[i] for i in best[0]]):
                    best[0] = picked
                return
            if best[0] is not None and len(picked) + 1 > len(best[0]):
                return
            pivot = min(todo, key=lambda v: (len(covers[v]), v))
            for i in covers[pivot]:
                search(picked | {i}, todo - minterms[i])

        search(frozenset(chosen), frozenset(uncovered))
        picked, optimal = best[0], True
    else:
        picked = set(chosen)
        todo = set(uncovered)
        while todo:
            # primes are in sort_key order and max() keeps the first maximum
            i = max(range(len(primes)), key=lambda i: len(todo & minterms[i]))
            picked.add(i)
            todo -= minterms[i]
        optimal = False
    return Cover(n, tuple(sorted((primes[i] for i in picked), key=Cube.sort_key)), optimal)


def netlist_truth_table(net: Netlist, output: str) -> TruthTable:
    """Exhaustive fault-free truth table of one primary output."""
    if output not in net.outputs:
        raise KeyError(f"unknown primary output {output!r}")
    if net.n > MAX_EXACT_INPUTS:
        raise ValueError(f"truth tables support at most {MAX_EXACT_INPUTS} inputs")
    total = 1 << net.n
    values = simulate(net, exhaustive_input_words(net))
    bits = unpack_bits(values[net.net_index[output]], total)
    return TruthTable(net.inputs, frozenset(int(v) for v in bits.nonzero()[0]))


# ---------------------------------------------------------------------------
# Berkeley PLA subset


def read_pla(text: str) -> TruthTable:
    """Read a single-output PLA; rows with output ``1`` form the onset."""
    n = None
    names = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        locus = f"line {lineno}"
        if line.startswith("."):
            key, *args = line.split()
            if key == ".i":
                n = int(args[0])
            elif key == ".o":
                if int(args[0]) != 1:
                    raise ParseError("only single-output PLAs are supported", locus)
            elif key == ".ilb":
                names = tuple(args)
            elif key == ".e":
                break
            elif key in (".ob", ".p", ".type"):
                pass
            else:
                raise ParseError(f"unsupported directive {key}", locus)
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("expected '<input cube> <output>'", locus)
        cube, out = parts
        if n is None:
            raise ParseError(".i must precede cube rows", locus)
        if len(cube) != n or set(cube) - set("01-"):
            raise ParseError(f"bad input cube {cube!r}", locus)
        if out not in ("0", "1", "-", "~"):
            raise ParseError(f"bad output value {out!r}", locus)
        if out == "1":
            rows.append(cube)
    if n is None:
        raise ParseError("missing .i directive")
    if names is None:
        names = tuple(f"x{i}" for i in range(n))
    if len(names) != n:
        raise ParseError(".ilb name count does not match .i")
    onset = set()
    for cube in rows:
        care = int("".join("0" if c == "-" else "1" for c in cube), 2)
        value = int(cube.replace("-", "0"), 2)
        onset.update(Cube(n, care, value).minterms())
    return TruthTable(names, frozenset(onset))


def write_pla(cover: Cover, names: Sequence[str], output: str = "f") -> str:
    lines = [f".i {cover.n}", ".o 1", ".ilb " + " ".join(names), f".ob {output}", f".p {len(cover)}"]
    for c in cover:
        row = "".join(
            "-" if not (c.care >> (cover.n - 1 - i)) & 1 else str((c.value >> (cover.n - 1 - i)) & 1)
            for i in range(cover.n)
        )
        lines.append(f"{row} 1")
    lines.append(".e")
    return "\n".join(lines) + "\n"
