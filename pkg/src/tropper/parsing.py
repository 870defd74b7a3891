"""String parsing of Laurent polynomials (``"a*u^-1 + 1 + b*u"``)."""
from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)

from .exact import Monomial, Scalar, scalar

_TRANSFORMS = standard_transformations + (convert_xor, implicit_multiplication_application)

Key = tuple[tuple[int, ...], int, Monomial]


@lru_cache(maxsize=512)
def _parse_cached(text: str, lattice_names: tuple[str, ...], t_name: str | None) -> tuple[tuple[Key, Scalar], ...]:
    names = set(lattice_names) | ({t_name} if t_name else set())
    local = {n: sympy.Symbol(n) for n in names}
    expr = parse_expr(text, local_dict=local, transformations=_TRANSFORMS, evaluate=True)
    expr = sympy.expand(expr)
    for sym in expr.free_symbols:
        local.setdefault(sym.name, sym)
    out: dict[Key, Scalar] = {}
    for term in sympy.Add.make_args(expr):
        coeff, factors = term.as_coeff_mul()
        lam = [0] * len(lattice_names)
        tdeg = 0
        params: dict[str, int] = {}
        c = sympy.Integer(1) * coeff
        for f in factors:
            base, exp = f.as_base_exp()
            if base.is_number:
                c *= f
                continue
            if not (isinstance(base, sympy.Symbol) and exp.is_Integer):
                raise ValueError(f"term {term} is not a Laurent monomial")
            e = int(exp)
            if base.name in lattice_names:
                lam[lattice_names.index(base.name)] += e
            elif base.name == t_name:
                tdeg += e
            else:
                params[base.name] = params.get(base.name, 0) + e
        key = (tuple(lam), tdeg, tuple(sorted((k, e) for k, e in params.items() if e)))
        out[key] = out.get(key, 0) + scalar(sympy.nsimplify(c))
    return tuple((k, v) for k, v in out.items() if v != 0)


def parse_laurent(text: str, lattice_names: Sequence[str], t_name: str | None = None) -> dict[Key, Scalar]:
    """Parse ``text`` into ``{(lattice exponent, t-degree, parameter monomial): coefficient}``.

    Symbols not listed as lattice variables or as ``t_name`` are parameters.
    Coefficients must be Gaussian rationals; ``I`` denotes the imaginary unit.
    """
    return dict(_parse_cached(str(text), tuple(lattice_names), t_name))
