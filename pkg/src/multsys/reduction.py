"""Reduction of a bounded multiplicative system to an independent two-valued one.

The pipeline has three exact stages:

1. extend: append disjoint correction blocks to [0, T) on which carefully
   signed unimodular functions cancel every nonzero selected mixed moment.
   The extension costs exactly mu in relative length: the new domain is
   [0, T * (1 + mu)).
2. binarize: replace each function, in index order, by a {A_k, B_k}-valued
   function matching its conditional mean on every constancy interval of
   the current system.  This preserves all mixed moments and can only
   increase integrals of convex functions of linear combinations.
3. dilate: rescale the domain back to [0, T).  The result xi is a
   two-valued mean-zero system whose selected joint distributions factor,
   that is, an independent system in the family's sense.

The price of independence is the single factor (1 + mu) in front of any
convex functional, which verify_domination checks numerically or exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product as iter_product
from typing import Sequence

from .errors import (
    BadArity,
    CapacityExceeded,
    NonZeroMean,
    NotTwoValued,
)
from .moments import (
    BoundedSystem,
    IndexFamily,
    MomentTable,
    Subset,
    compute_moment_table,
    enumerate_family,
)
from .stepfn import (
    ConvexSpec,
    Rational,
    StepFunction,
    as_fraction,
    common_refinement,
    concat_many,
    constant,
    convex_expectation,
    dilate,
    linear_combination,
    normalize,
    piece_cap,
)


# ------------------------------------------------------------------ cancellation blocks

def walsh_cancellation_system(nu: int, length: Rational = 1) -> list[StepFunction]:
    """nu sign functions on [0, length) whose full product is 1 while every
    proper nonempty subproduct integrates to 0.

    Character construction: the first nu - 1 functions are the dyadic sign
    patterns r_1 .. r_{nu-1} on 2**(nu-1) equal pieces and the last is
    their product, so the system multiplies to r**2 == 1 while any proper
    subproduct is a nontrivial character with zero integral.
    """
    if nu < 2:
        raise BadArity(f"need at least two functions, got {nu}")
    pieces = 1 << (nu - 1)
    if pieces > piece_cap():
        raise CapacityExceeded(f"{pieces} pieces exceed the cap of {piece_cap()}")
    length = as_fraction(length)
    bps = tuple(Fraction(i, pieces) * length for i in range(pieces + 1))
    rows: list[list[int]] = []
    for k in range(1, nu):
        rows.append([1 if (i >> (nu - 1 - k)) & 1 == 0 else -1 for i in range(pieces)])
    last = [1] * pieces
    for row in rows:
        last = [a * b for a, b in zip(last, row)]
    rows.append(last)
    return [
        StepFunction(bps, tuple(Fraction(v) for v in row)) for row in rows
    ]


def flip_cancellation_system(nu: int, length: Rational = 1) -> list[StepFunction]:
    """Same contract as walsh_cancellation_system via recursive sign flips.

    Start from the constant system 1..1 and process every proper nonempty
    subset V in (cardinality, lexicographic) order: halve each constancy
    piece and flip, on the right halves, the lowest index inside V and the
    lowest index outside V.  Each step kills the integral of the V-product
    on every piece without disturbing previously killed subsets or the
    full product.  Pieces double per step, reaching 2**(2**nu - 2); sizes
    above the piece cap (nu >= 5 at the default cap) are refused.
    """
    if nu < 2:
        raise BadArity(f"need at least two functions, got {nu}")
    final_pieces = 1 << ((1 << nu) - 2)
    if final_pieces > piece_cap():
        raise CapacityExceeded(
            f"{final_pieces} pieces exceed the cap of {piece_cap()}"
        )
    length = as_fraction(length)
    rows: list[list[int]] = [[1] for _ in range(nu)]
    proper: list[Subset] = []
    for r in range(1, nu):
        proper.extend(combinations(range(1, nu + 1), r))
    for V in proper:
        inside = min(V)
        outside = min(i for i in range(1, nu + 1) if i not in V)
        doubled: list[list[int]] = []
        for k in range(1, nu + 1):
            row = rows[k - 1]
            if k in (inside, outside):
                new = [s * v for v in row for s in (1, -1)]
            else:
                new = [v for v in row for _ in (0, 1)]
            doubled.append(new)
        rows = doubled
    pieces = len(rows[0])
    bps = tuple(Fraction(i, pieces) * length for i in range(pieces + 1))
    return [StepFunction(bps, tuple(Fraction(v) for v in row)) for row in rows]


# ------------------------------------------------------------------ extension

def extend_system(sys: BoundedSystem, fam: IndexFamily) -> BoundedSystem:
    """Append one cancellation block per nonzero selected moment.

    Block for subset S has relative length |E[prod_S phi]| / prod_S C_k.
    On it, functions outside S vanish and functions inside S take values
    +-C_k arranged so the block product integral is exactly the negative
    of the moment, while every proper subproduct still integrates to 0.
    The extended system is therefore multiplicative over the family, on
    the longer domain [0, T * (1 + mu)).  Zero moments get no block, so a
    multiplicative input comes back unchanged.
    """
    table = compute_moment_table(sys, fam)
    T = sys.domain_length
    caps = sys.capacities()
    blocks: list[tuple[Subset, Fraction, Fraction]] = []
    for s, m in zip(table.subsets, table.moments):
        if m == 0:
            continue
        denom = Fraction(1)
        for i in s:
            denom *= caps[i - 1]
        blocks.append((s, T * abs(m) / denom, Fraction(1 if m > 0 else -1)))
    if not blocks:
        return sys
    extensions: list[list[StepFunction]] = [[] for _ in range(sys.n)]
    for s, block_len, sign in blocks:
        if len(s) == 1:
            members = [constant(-sign * caps[s[0] - 1], block_len)]
        else:
            base = walsh_cancellation_system(len(s), block_len)
            members = []
            for j, idx in enumerate(s):
                c = caps[idx - 1] if j > 0 else -sign * caps[idx - 1]
                members.append(
                    StepFunction(base[j].breakpoints, tuple(c * v for v in base[j].values))
                )
        member_of = dict(zip(s, members))
        zero_block = constant(0, block_len)
        for k in range(1, sys.n + 1):
            extensions[k - 1].append(member_of.get(k, zero_block))
    new_functions = tuple(
        concat_many([sys.functions[k]] + extensions[k]) for k in range(sys.n)
    )
    return BoundedSystem(new_functions, sys.lower_bounds, sys.upper_bounds)


# ------------------------------------------------------------------ binarization

def binarize(sys: BoundedSystem, k: int | None = None) -> BoundedSystem:
    """Push every value of function k (or of all functions, in index order)
    to the boundary pair {A_k, B_k}.

    On each constancy interval [a, b) of the whole system where phi_k == v,
    the replacement takes B_k on [a, c) and A_k on [c, b) with

        c = (B_k * a - A_k * b + v * (b - a)) / (B_k - A_k),

    the unique split preserving the integral of phi_k over [a, b).  Since
    every other function is constant there, all mixed moments survive
    exactly; integrals of convex functions of linear combinations never
    decrease.  Outputs are normalized (minimal representation), which
    makes the operation idempotent.
    """
    indices = range(1, sys.n + 1) if k is None else [k]
    functions = list(sys.functions)
    for idx in indices:
        lo = sys.lower_bounds[idx - 1]
        hi = sys.upper_bounds[idx - 1]
        refined = common_refinement(functions)
        grid = refined[0].breakpoints
        target = refined[idx - 1].values
        bps: list[Fraction] = [Fraction(0)]
        vals: list[Fraction] = []
        for i, v in enumerate(target):
            a, b = grid[i], grid[i + 1]
            c = (hi * a - lo * b + v * (b - a)) / (hi - lo)
            if c > a:
                bps.append(c)
                vals.append(hi)
            if c < b:
                bps.append(b)
                vals.append(lo)
            else:
                bps[-1] = b
        functions[idx - 1] = normalize(StepFunction(tuple(bps), tuple(vals)))
    return BoundedSystem(tuple(functions), sys.lower_bounds, sys.upper_bounds)


# ------------------------------------------------------------------ independence

@dataclass(frozen=True)
class IndependenceReport:
    """Outcome of the exact product-measure check over a family."""

    independent: bool
    subsets_checked: int
    failures: tuple[dict, ...]
    marginals: tuple[Fraction, ...]  # measure of {phi_k == A_k}, normalized


def check_independence(sys: BoundedSystem, fam: IndexFamily) -> IndependenceReport:
    """Verify that selected joint value distributions factor exactly.

    Requires every function to be {A_k, B_k}-valued with zero mean; then
    the marginal law is pinned (P{phi_k == A_k} = B_k / (B_k - A_k)) and
    the check compares each joint pattern measure with the product of
    marginals, all in exact arithmetic.
    """
    T = sys.domain_length
    refined = common_refinement(sys.functions)
    lengths = refined[0].piece_lengths()
    marginals: list[Fraction] = []
    is_low: list[list[bool]] = []
    for k, f in enumerate(refined, start=1):
        lo = sys.lower_bounds[k - 1]
        hi = sys.upper_bounds[k - 1]
        seen = set(f.values)
        if not seen <= {lo, hi} or len(seen) != 2:
            raise NotTwoValued(f"function {k} takes values {sorted(seen)}, not [{lo}, {hi}]")
        total = sum(
            (ln for v, ln in zip(f.values, lengths) if v == lo), Fraction(0)
        )
        mean = (lo * total + hi * (T - total)) / T
        if mean != 0:
            raise NonZeroMean(f"function {k} has mean {mean}")
        marginals.append(total / T)
        is_low.append([v == lo for v in f.values])
    failures: list[dict] = []
    subsets = enumerate_family(sys.n, fam)
    for s in subsets:
        joint: dict[tuple[bool, ...], Fraction] = {}
        for i, ln in enumerate(lengths):
            pattern = tuple(is_low[k - 1][i] for k in s)
            joint[pattern] = joint.get(pattern, Fraction(0)) + ln
        for pattern in iter_product((True, False), repeat=len(s)):
            expected = Fraction(1)
            for flag, k in zip(pattern, s):
                expected *= marginals[k - 1] if flag else 1 - marginals[k - 1]
            got = joint.get(pattern, Fraction(0)) / T
            if got != expected:
                failures.append(
                    {"subset": s, "pattern": pattern, "measure": got, "expected": expected}
                )
    return IndependenceReport(
        independent=not failures,
        subsets_checked=len(subsets),
        failures=tuple(failures),
        marginals=tuple(marginals),
    )


# ------------------------------------------------------------------ the pipeline

@dataclass(frozen=True)
class ReductionTrace:
    """Everything the reduction produced, stage by stage."""

    mu: Fraction
    family: tuple[Subset, ...]
    input_system: BoundedSystem
    extended: BoundedSystem
    binarized: BoundedSystem
    xi: BoundedSystem
    moment_tables: dict[str, MomentTable]

    def to_json(self) -> dict:
        return {
            "mu": str(self.mu),
            "family": [list(s) for s in self.family],
            "input_system": self.input_system.to_json(),
            "extended": self.extended.to_json(),
            "binarized": self.binarized.to_json(),
            "xi": self.xi.to_json(),
            "moment_tables": {k: t.to_json() for k, t in self.moment_tables.items()},
        }


def reduce_to_independent(sys: BoundedSystem, fam: IndexFamily) -> ReductionTrace:
    """Run extend, binarize, dilate; return all stages with moment tables."""
    input_table = compute_moment_table(sys, fam)
    mu = input_table.mu()
    extended = extend_system(sys, fam)
    binarized = binarize(extended)
    factor = 1 + mu
    xi = BoundedSystem(
        tuple(dilate(g, factor) for g in binarized.functions),
        binarized.lower_bounds,
        binarized.upper_bounds,
    )
    tables = {
        "input": input_table,
        "extended": compute_moment_table(extended, fam),
        "binarized": compute_moment_table(binarized, fam),
        "xi": compute_moment_table(xi, fam),
    }
    return ReductionTrace(
        mu=mu,
        family=tuple(enumerate_family(sys.n, fam)),
        input_system=sys,
        extended=extended,
        binarized=binarized,
        xi=xi,
        moment_tables=tables,
    )


@dataclass(frozen=True)
class DominationReport:
    """E[Phi(sum a_k phi_k)] against (1 + mu) E[Phi(sum a_k xi_k)]."""

    lhs: Fraction | float
    rhs: Fraction | float
    mu: Fraction
    holds: bool
    exact: bool
    phi: str

    def to_json(self) -> dict:
        def side(x: Fraction | float) -> object:
            if isinstance(x, Fraction):
                return str(x)
            return {"value": x, "approx": True}

        return {
            "phi": self.phi,
            "lhs": side(self.lhs),
            "rhs": side(self.rhs),
            "mu": str(self.mu),
            "holds": self.holds,
            "exact": self.exact,
        }


REL_TOL = 1e-9


def verify_domination(
    sys: BoundedSystem,
    fam: IndexFamily,
    coeffs: Sequence[Rational],
    phi: ConvexSpec,
    trace: ReductionTrace | None = None,
) -> DominationReport:
    """Check E[Phi(sum a phi)] <= (1 + mu) E[Phi(sum a xi)].

    Exact comparison when Phi keeps rationals rational, otherwise floats
    with relative tolerance 1e-9.  A reduction trace may be passed in to
    reuse the pipeline output across several integrands.
    """
    if trace is None:
        trace = reduce_to_independent(sys, fam)
    cs = [as_fraction(c) for c in coeffs]
    lhs_fn = linear_combination(cs, sys.functions)
    rhs_fn = linear_combination(cs, trace.xi.functions)
    lhs = convex_expectation(lhs_fn, phi)
    rhs = convex_expectation(rhs_fn, phi)
    T = sys.domain_length
    factor = 1 + trace.mu
    exact = isinstance(lhs, Fraction) and isinstance(rhs, Fraction)
    if exact:
        lhs_val: Fraction | float = lhs / T
        rhs_val: Fraction | float = factor * rhs / T
        holds = lhs_val <= rhs_val
    else:
        lhs_val = float(lhs) / float(T)
        rhs_val = float(factor) * float(rhs) / float(T)
        holds = lhs_val <= rhs_val or (lhs_val - rhs_val) <= REL_TOL * max(
            abs(lhs_val), abs(rhs_val), 1.0
        )
    return DominationReport(
        lhs=lhs_val,
        rhs=rhs_val,
        mu=trace.mu,
        holds=holds,
        exact=exact,
        phi=phi.describe(),
    )
