"""Exact series solutions of triangular coefficient systems.

Solves non-autonomous systems of the form

    dx_j/dt = alpha_j x_j + sum_m e^(2 pi i m t) * R_{m,j}(x),

with R_{m,j} polynomial of valuation >= 2, by expanding the solution as
x_j(t) = sum_A a_{j,A}(t) x0^A and processing multi-indices in increasing
total degree.  Each coefficient satisfies a scalar linear ODE whose
forcing only involves strictly lower-degree entries, and is solved
exactly in the exponential-polynomial ring.

Both formal flows of autonomous polynomial fields (single frequency 0)
and holonomy monodromy systems use this engine.
"""
from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

from .exppoly import ExpPoly, Frequency, solve_linear_ode
from .jets import Jet, JetMap, grlex_key


class CoefficientSystemError(ValueError):
    pass


class CoefficientTable:
    """Per-(component, multi-index) exponential-polynomial coefficients."""

    def __init__(self, n_vars: int, order: int, alphas: Sequence[Frequency]):
        self.n_vars = n_vars
        self.order = order
        self.alphas = list(alphas)
        self.entries: Dict[Tuple[int, tuple], ExpPoly] = {}
        self.forcings: Dict[Tuple[int, tuple], ExpPoly] = {}

    def entry(self, component: int, exp) -> ExpPoly:
        return self.entries.get((component, tuple(exp)), ExpPoly.zero())

    def expoly_components(self, order: int | None = None) -> List[Jet]:
        order = self.order if order is None else order
        comps = []
        for j in range(self.n_vars):
            coeffs = {
                exp: poly
                for (i, exp), poly in self.entries.items()
                if i == j and sum(exp) <= order
            }
            comps.append(Jet(self.n_vars, order, coeffs))
        return comps

    def at_time(self, t: complex) -> JetMap:
        comps = []
        for j in range(self.n_vars):
            coeffs = {}
            for (i, exp), poly in self.entries.items():
                if i == j:
                    coeffs[exp] = poly.eval(t)
            comps.append(Jet(self.n_vars, self.order, coeffs))
        return JetMap(comps)

    def ode_residual_max(self) -> float:
        """Max coefficient of a' - alpha*a - g over all entries; 0 means the
        table satisfies its defining ODEs identically in the ring."""
        worst = 0.0
        for (j, exp), poly in self.entries.items():
            g = self.forcings.get((j, exp), ExpPoly.zero())
            resid = poly.derivative() - poly * self.alphas[j].value - g
            worst = max(worst, resid.max_abs_coeff())
        return worst

    def sorted_keys(self):
        return sorted(self.entries, key=lambda key: (grlex_key(key[1]), key[0]))

    def to_json_dict(self) -> dict:
        items = []
        for j, exp in self.sorted_keys():
            items.append(
                {
                    "component": j,
                    "exp": list(exp),
                    "expoly": self.entries[(j, exp)].to_json_dict(),
                }
            )
        return {
            "n_vars": self.n_vars,
            "order": self.order,
            "alphas": [[a.value.real, a.value.imag] for a in self.alphas],
            "entries": items,
        }


ForcingTerm = Tuple[int, Jet]  # (integer frequency m for e^(2 pi i m t), jet)


def solve_coefficient_system(
    alphas: Sequence,
    forcing: Sequence[Sequence[ForcingTerm]],
    order: int,
) -> CoefficientTable:
    """Solve the triangular system; ``forcing[j]`` lists (m, jet) pairs with
    jets of valuation >= 2 in the same n variables."""
    n = len(alphas)
    freqs = [Frequency.coerce(a) for a in alphas]
    for j, terms in enumerate(forcing):
        for m, jet in terms:
            if jet.n_vars != n:
                raise CoefficientSystemError("forcing jet arity mismatch")
            if not jet.is_zero() and jet.valuation() < 2:
                raise CoefficientSystemError(
                    f"forcing for component {j} has degree-{jet.valuation()} terms; "
                    "the recursion requires valuation >= 2"
                )

    table = CoefficientTable(n, order, freqs)
    # degree 1: a_{j,e_j}' = alpha_j a, a(0)=1  ->  e^(alpha_j t)
    for j in range(n):
        exp = tuple(1 if k == j else 0 for k in range(n))
        table.entries[(j, exp)] = solve_linear_ode(freqs[j], ExpPoly.zero(), 1.0)
        table.forcings[(j, exp)] = ExpPoly.zero()

    for d in range(2, order + 1):
        phi = [c.truncate(d) for c in table.expoly_components(order)]
        for j in range(n):
            g_total = Jet.zero(n, d)
            for m, jet in forcing[j]:
                if jet.is_zero():
                    continue
                composed = jet.truncate(d).compose(phi)
                if m != 0:
                    composed = composed * ExpPoly.exponential(Frequency.rational(m))
                g_total = g_total + composed
            for exp, g in g_total.coeffs.items():
                if sum(exp) != d:
                    continue
                if not isinstance(g, ExpPoly):
                    g = ExpPoly.constant(g)
                table.entries[(j, exp)] = solve_linear_ode(freqs[j], g, 0.0)
                table.forcings[(j, exp)] = g
    return table
