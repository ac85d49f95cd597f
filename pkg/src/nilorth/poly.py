"""Tiny multivariate polynomials, used to compile orbit step maps.

The generic algebra routines in :mod:`nilorth.liealg` are written over
whatever coefficient arithmetic the vectors carry.  Feeding them vectors
whose "coordinates" are Poly objects turns a pipeline of bracket/BCH/
coordinate-conversion calls into explicit polynomial maps, which the
dynamics layer then evaluates over numpy blocks.  Only the operations that
pipeline needs are implemented.
"""

from __future__ import annotations

from fractions import Fraction


class Poly:
    """Polynomial in ``nvars`` variables; terms maps exponent tuples to
    coefficients (Fraction or float, never mixed within one Poly)."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms = {}
        if terms:
            for e, c in terms.items():
                if c:
                    self.terms[e] = c

    @staticmethod
    def const(nvars: int, c) -> "Poly":
        p = Poly(nvars)
        if c:
            p.terms[(0,) * nvars] = c
        return p

    @staticmethod
    def var(nvars: int, i: int, one=Fraction(1)) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return Poly(nvars, {tuple(e): one})

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, Poly):
            out: dict = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    s = out.get(e, 0) + c1 * c2
                    if s:
                        out[e] = s
                    else:
                        out.pop(e, None)
            return Poly(self.nvars, out)
        if not other:
            return Poly(self.nvars)
        return Poly(self.nvars, {e: c * other for e, c in self.terms.items()})

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if not other:
            return not self.terms
        return self.terms == {(0,) * self.nvars: other}

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.terms.items()))))

    def __abs__(self):
        # only meaningful for constants; used by exactness diagnostics
        if not self.terms:
            return 0
        ((e, c),) = list(self.terms.items())[:1]
        if any(e):
            raise TypeError("abs of a non-constant polynomial")
        return abs(c)

    def evaluate(self, vals):
        total = 0.0
        for e, c in self.terms.items():
            t = float(c)
            for v, p in zip(vals, e):
                if p:
                    t *= v**p
            total += t
        return total

    def term_list(self):
        """[(float coeff, ((var, exp), ...)), ...] sorted deterministically."""
        out = []
        for e, c in sorted(self.terms.items()):
            out.append((float(c), tuple((i, p) for i, p in enumerate(e) if p)))
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(
                f"t{i}" + (f"^{p}" if p > 1 else "") for i, p in enumerate(e) if p
            )
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(bits)
