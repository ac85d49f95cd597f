"""Bundled lattices/systems and the plain-text system description format.

A system description names an algebra, gives the translation element u in
second-kind coordinates, and optionally a derivation matrix B with rational
entries:

    algebra heisenberg
    u sqrt(2) sqrt(3) 0
    B 0 1 0 / 0 0 0 / 0 1/2 0

Coordinate tokens are decimal strings, rationals p/q, or the symbolic
tokens sqrt(k), golden, pi, optionally negated; symbolic tokens convert to
the nearest float64 (math.sqrt etc.), which is the documented meaning of
"irrational" everywhere in this package.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from . import liealg, nilmanifold
from .dynamics import AffineSystem
from .liealg import DerivationSpec
from .nilmanifold import LatticeSpec

_TOKEN_RE = re.compile(r"^(-)?(sqrt\((\d+)\)|golden|pi|\d+/\d+|\d+\.?\d*|\.\d+)$")


def parse_scalar(token: str):
    """Token -> Fraction (exact forms) or float (symbolic/decimal forms)."""
    m = _TOKEN_RE.match(token.strip())
    if not m:
        raise ValueError(f"cannot parse coordinate token {token!r}")
    sign, body, sqrt_arg = m.group(1), m.group(2), m.group(3)
    if sqrt_arg is not None:
        val = math.sqrt(int(sqrt_arg))
    elif body == "golden":
        val = (1 + math.sqrt(5)) / 2
    elif body == "pi":
        val = math.pi
    elif "/" in body:
        val = Fraction(body)
    elif "." in body:
        val = float(body)
    else:
        val = Fraction(int(body))
    return -val if sign else val


def _all_exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


# ---------------------------------------------------------------------------
# bundled lattice registry
# ---------------------------------------------------------------------------

_LATTICES: dict[str, LatticeSpec] = {}


def lattice(name: str) -> LatticeSpec:
    """Bundled lattice by name: heisenberg, free_class3, abelian<d>,
    susp_heisenberg (the dim-4 class-3 suspension extension)."""
    lat = _LATTICES.get(name)
    if lat is not None:
        return lat
    if name == "heisenberg":
        lat = LatticeSpec(liealg.heisenberg())
    elif name == "free_class3":
        lat = LatticeSpec(liealg.free_class3())
    elif name == "susp_heisenberg":
        lat = heisenberg_suspension().extended
    elif name.startswith("abelian"):
        d = int(name[len("abelian"):])
        lat = LatticeSpec(liealg.abelian(d))
    else:
        raise ValueError(f"unknown bundled algebra {name!r}")
    _LATTICES[name] = lat
    return lat


def heisenberg_shear() -> DerivationSpec:
    """The integral unipotent automorphism of the Heisenberg lattice
    (b -> ab on generators): B(X2) = X1 + X3/2."""
    return DerivationSpec.from_rows(
        [[0, 1, 0], [0, 0, 0], [0, Fraction(1, 2), 0]]
    )


_HEIS_SUSP = None


def heisenberg_suspension() -> nilmanifold.SuspensionContext:
    global _HEIS_SUSP
    if _HEIS_SUSP is None:
        _HEIS_SUSP = nilmanifold.build_suspension(lattice("heisenberg"), heisenberg_shear())
    return _HEIS_SUSP


# ---------------------------------------------------------------------------
# system descriptions
# ---------------------------------------------------------------------------


def build_system(
    algebra: str, u_tokens, B_rows=None, name: str = ""
) -> AffineSystem:
    """Assemble an affine system from description components.

    ``u_tokens``: second-kind coordinate tokens (strings or numbers);
    ``B_rows``: rows of rational entries, or None for a translation.
    """
    lat = lattice(algebra)
    coords = [parse_scalar(t) if isinstance(t, str) else t for t in u_tokens]
    if len(coords) != lat.dim:
        raise ValueError(
            f"u has {len(coords)} coordinates, algebra {algebra} has dim {lat.dim}"
        )
    flavor = "exact" if _all_exact(coords) else "float"
    if flavor == "float":
        coords = [float(c) for c in coords]
    u = nilmanifold.point_from_second_kind(lat, coords, flavor)
    B = None
    if B_rows is not None:
        B = DerivationSpec.from_rows([[Fraction(str(x)) for x in row] for row in B_rows])
        if all(all(x == 0 for x in row) for row in B.matrix):
            B = None
    return AffineSystem(lat, u, B, name=name or algebra)


def parse_system_file(text: str, name: str = "") -> AffineSystem:
    """Parse the documented plain-text system description."""
    algebra = None
    u_tokens = None
    B_rows = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "algebra":
            algebra = rest.strip()
        elif head == "u":
            u_tokens = rest.split()
        elif head == "B":
            # rows separated by space-delimited slashes; bare "/" would
            # collide with rational entries like 1/2
            B_rows = [chunk.split() for chunk in re.split(r"\s/\s", rest)]
        else:
            raise ValueError(f"line {lineno}: unknown directive {head!r}")
    if algebra is None or u_tokens is None:
        raise ValueError("system description needs 'algebra' and 'u' lines")
    return build_system(algebra, u_tokens, B_rows, name=name)


def dump_system_file(sys: AffineSystem) -> str:
    lat_name = sys.lattice.name or "algebra"
    t = nilmanifold.second_kind(sys.u)
    u_line = " ".join(str(c) for c in t.coords)
    lines = [f"algebra {lat_name}", f"u {u_line}"]
    if not sys.is_translation:
        rows = " / ".join(" ".join(str(x) for x in row) for row in sys.B.matrix)
        lines.append(f"B {rows}")
    return "\n".join(lines) + "\n"
