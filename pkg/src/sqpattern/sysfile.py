"""Line-oriented system files.

::

    # comment
    field p=5 k=1
    ambient projective 2
    vars x0 x1 x2
    poly C = x0^2 + x1^2 - x2^2
    poly D = x0^2 + 2*x1^2 + x2^2
    option seed=0

Recognised options: ``nu`` (a non-square override), ``C_user``, ``seed``,
``ceiling``, ``workers``, ``quadric_constants`` (comma-separated, one per
polynomial, for character-mode classification), ``patterns`` (comma-separated
pattern strings that ``verify`` and ``sweep`` restrict to).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field

from .counting import AFFINE, PROJECTIVE, PolySystem
from .errors import ParseError, SqpatternError
from .ff import FieldElement, FieldSpec, element, make_field
from .poly import Poly
from .polyparse import parse_poly

OPTION_TYPES = {
    "nu": str,
    "C_user": float,
    "seed": int,
    "ceiling": int,
    "workers": int,
    "quadric_constants": str,
    "patterns": str,
}

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_RESERVED = re.compile(r"^s[1-9]$")


@dataclass
class SystemFile:
    field: FieldSpec
    ambient: str
    n: int
    var_names: tuple[str, ...]
    poly_names: tuple[str, ...]
    polys: tuple[Poly, ...]
    options: dict = dc_field(default_factory=dict)

    def system(self) -> PolySystem:
        return PolySystem(self.field, self.ambient, self.n, self.polys, self.poly_names, self.var_names)

    def option(self, key, default=None):
        return self.options.get(key, default)

    @property
    def nu(self) -> FieldElement | None:
        raw = self.options.get("nu")
        return None if raw is None else element(self.field, raw)

    def quadric_constants(self):
        raw = self.options.get("quadric_constants")
        if raw is None:
            return (None,) * len(self.polys)
        parts = [p.strip() for p in raw.split(",")]
        if len(parts) != len(self.polys):
            raise SqpatternError("quadric_constants needs one value per polynomial")
        return tuple(element(self.field, p) for p in parts)

    def patterns(self):
        from .counting import PatternSpec

        raw = self.options.get("patterns")
        if raw is None:
            return None
        return [PatternSpec.parse(p.strip()) for p in raw.split(",")]

    def serialize(self) -> str:
        lines = [
            f"field p={self.field.p} k={self.field.k}",
            f"ambient {self.ambient} {self.n}",
            "vars " + " ".join(self.var_names),
        ]
        for name, f in zip(self.poly_names, self.polys):
            lines.append(f"poly {name} = {f.to_text(self.var_names)}")
        for key in sorted(self.options):
            lines.append(f"option {key}={self.options[key]}")
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        return (
            isinstance(other, SystemFile)
            and self.field == other.field
            and self.ambient == other.ambient
            and self.n == other.n
            and self.var_names == other.var_names
            and self.poly_names == other.poly_names
            and self.polys == other.polys
            and self.options == other.options
        )


def _kv(tokens, line_no, line):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ParseError(f"expected key=value, got {tok!r}", line_no, line.find(tok) + 1)
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def parse_system(text: str) -> SystemFile:
    fld = ambient = n = None
    names = None
    polys: list[tuple[str, str, int, int]] = []
    options: dict = {}
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        head, _, rest = line.strip().partition(" ")
        col = line.find(head) + 1
        if head == "field":
            kv = _kv(rest.split(), line_no, line)
            try:
                p, k = int(kv.pop("p")), int(kv.pop("k", "1"))
            except (KeyError, ValueError):
                raise ParseError("field line needs integer p= and k=", line_no, col) from None
            if kv:
                raise ParseError(f"unknown field keys {sorted(kv)}", line_no, col)
            try:
                fld = make_field(p, k)
            except SqpatternError as exc:
                raise ParseError(str(exc), line_no, col) from exc
        elif head == "ambient":
            parts = rest.split()
            if len(parts) != 2 or parts[0] not in (AFFINE, PROJECTIVE) or not parts[1].isdigit():
                raise ParseError("expected 'ambient affine <n>' or 'ambient projective <n>'", line_no, col)
            ambient, n = parts[0], int(parts[1])
            if n < 1:
                raise ParseError("ambient dimension must be >= 1", line_no, col)
        elif head == "vars":
            names = rest.split()
            for v in names:
                if not _NAME.match(v) or v == "g" or _RESERVED.match(v):
                    raise ParseError(f"{v!r} cannot be used as a variable name", line_no, line.find(v) + 1)
            if len(set(names)) != len(names):
                raise ParseError("duplicate variable names", line_no, col)
        elif head == "poly":
            name, eq, expr = rest.partition("=")
            name = name.strip()
            if not eq or not _NAME.match(name):
                raise ParseError("expected 'poly <name> = <expression>'", line_no, col)
            polys.append((name, expr, line_no, line.index("=") + 1))
        elif head == "option":
            kv = _kv(rest.split(), line_no, line)
            for k, v in kv.items():
                if k not in OPTION_TYPES:
                    raise ParseError(f"unknown option {k!r}", line_no, line.find(k) + 1)
                try:
                    options[k] = OPTION_TYPES[k](v)
                except ValueError:
                    raise ParseError(f"bad value for option {k}: {v!r}", line_no, line.find(k) + 1) from None
        else:
            raise ParseError(f"unknown directive {head!r}", line_no, col)

    if fld is None:
        raise ParseError("missing 'field' line")
    if ambient is None:
        raise ParseError("missing 'ambient' line")
    nvars = n + 1 if ambient == PROJECTIVE else n
    if names is None:
        start = 0 if ambient == PROJECTIVE else 1
        names = [f"x{j}" for j in range(start, start + nvars)]
    if len(names) != nvars:
        raise ParseError(f"{ambient} {n} needs {nvars} variables, {len(names)} declared")
    if not polys:
        raise ParseError("no 'poly' lines")
    if len({p[0] for p in polys}) != len(polys):
        raise ParseError("duplicate polynomial names")

    parsed = []
    for name, expr, line_no, col in polys:
        f = parse_poly(expr, fld, names, line=line_no, col0=col)
        if f.is_zero():
            raise ParseError(f"polynomial {name} is zero", line_no, col)
        if ambient == PROJECTIVE and not f.is_homogeneous(2):
            raise ParseError(f"polynomial {name} is not a homogeneous quadratic form", line_no, col)
        parsed.append(f)

    sf = SystemFile(fld, ambient, n, tuple(names), tuple(p[0] for p in polys), tuple(parsed), options)
    if "nu" in options:
        try:
            nu = sf.nu
        except ValueError as exc:
            raise ParseError(f"bad nu: {exc}") from None
        if fld.char(nu.value) != -1:
            raise ParseError(f"nu={options['nu']} is not a non-square in {fld.name}")
    return sf


def load_system(path) -> SystemFile:
    with open(path, encoding="utf-8") as fh:
        return parse_system(fh.read())


def system_text(p: int, k: int, ambient: str, n: int, polys, var_names=None, **options) -> str:
    """Build system-file text; handy for tests and for sweeping one system over several primes."""
    nvars = n + 1 if ambient == PROJECTIVE else n
    if var_names is None:
        start = 0 if ambient == PROJECTIVE else 1
        var_names = [f"x{j}" for j in range(start, start + nvars)]
    lines = [f"field p={p} k={k}", f"ambient {ambient} {n}", "vars " + " ".join(var_names)]
    items = polys.items() if isinstance(polys, dict) else ((f"f{i}", e) for i, e in enumerate(polys, 1))
    lines += [f"poly {name} = {expr}" for name, expr in items]
    lines += [f"option {k}={v}" for k, v in options.items()]
    return "\n".join(lines) + "\n"
