"""Greedy extraction of quasi-multiplicative subsequences from orthogonal systems.

The selection primitive is an averaging argument: given targets f_1..f_m
and pairwise-orthogonal candidates phi_1..phi_n with L2 norms at most 1,
Bessel plus Cauchy-Schwarz guarantee an index l with

    sum_j |E[f_j phi_l]|  <=  sqrt(m * sum_j ||f_j||_2^2 / n).

The greedy driver starts from the first function and, at step m, selects
from the index window [rho**m, rho**(m+1)) against all 2**m - 1 products
of the functions chosen so far.  Summing the achieved step sums gives an
exact certificate for the multiplicative error of the selected family
over subsets of size two and more (each such subset is counted at the
step that chose its largest index).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import (
    BoundViolation,
    CapacityExceeded,
    EmptyCandidates,
    NotOrthogonal,
    OutOfRange,
    TooLarge,
    WindowExhausted,
)
from .moments import BoundedSystem, symmetric_system
from .stepfn import (
    StepFunction,
    common_refinement,
    integral,
    product,
    rademacher,
    scale,
)

PRODUCT_STEP_CAP = 16
WALSH_CAP = 12


@dataclass(frozen=True)
class OrthogonalSystem:
    """Candidate pool phi_1..phi_n with a shared sup bound.

    certified_orthogonal records whether pairwise orthogonality was
    checked at construction; selection re-checks unless told to trust it.
    """

    functions: tuple[StepFunction, ...]
    sup_bound: Fraction
    certified_orthogonal: bool

    @property
    def n(self) -> int:
        return len(self.functions)


def _l2_sq(f: StepFunction) -> Fraction:
    return integral(product([f, f])) / f.domain_length


def _scale_row(row: Sequence[Fraction]) -> tuple[list[int], int]:
    """Clear denominators: row == ints / den elementwise.

    Dot products over integer vectors avoid a gcd per multiply, which is
    what makes selection over thousand-piece candidate pools affordable;
    the single Fraction at the end restores exactness.
    """
    den = math.lcm(*(v.denominator for v in row))
    return [int(v * den) for v in row], den


def check_orthogonality(functions: Sequence[StepFunction]) -> None:
    """Raise NotOrthogonal on the first nonvanishing pairwise expectation."""
    refined = common_refinement(functions)
    if not refined:
        return
    len_ints, _ = _scale_row(refined[0].piece_lengths())
    rows = [_scale_row(f.values)[0] for f in refined]
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            if sum(l * a * b for l, a, b in zip(len_ints, rows[i], rows[j])) != 0:
                raise NotOrthogonal(f"functions {i + 1} and {j + 1} are not orthogonal")


def walsh_system(m: int) -> OrthogonalSystem:
    """The 2**m Walsh functions on the dyadic grid of 2**m pieces.

    Function j is the product of the dyadic sign functions picked by the
    bits of j - 1 (function 1 is the constant 1).  The family is
    orthonormal and closed under products, which makes it the standard
    test bed for the greedy selector.
    """
    if not 0 <= m <= WALSH_CAP:
        raise TooLarge(f"walsh order must lie in 0..{WALSH_CAP}, got {m}")
    pieces = 1 << m
    bps = tuple(Fraction(i, pieces) for i in range(pieces + 1))
    plus, minus = Fraction(1), Fraction(-1)
    reversed_bits = [
        sum(((i >> b) & 1) << (m - 1 - b) for b in range(m)) for i in range(pieces)
    ]
    functions = []
    for j in range(pieces):
        vals = tuple(
            minus if (j & r).bit_count() & 1 else plus for r in reversed_bits
        )
        functions.append(StepFunction(bps, vals))
    return OrthogonalSystem(
        functions=tuple(functions),
        sup_bound=Fraction(1),
        certified_orthogonal=True,
    )


# ------------------------------------------------------------------ selection

def parseval_select(
    candidates: Sequence[StepFunction],
    targets: Sequence[StepFunction],
    assume_orthogonal: bool = False,
) -> tuple[int, Fraction]:
    """Pick the candidate minimizing sum_j |E[f_j phi_l]|, ties to the
    smallest index.

    Returns (position in the candidate list, achieved sum).  The achieved
    sum always satisfies the averaging bound
    sqrt(m * sum ||f_j||_2^2 / n) when candidates are orthogonal with
    L2 norm at most 1; both preconditions are validated unless
    assume_orthogonal skips the quadratic pairwise check.
    """
    if not candidates:
        raise EmptyCandidates("no candidates to select from")
    if not targets:
        raise OutOfRange("need at least one target")
    if not assume_orthogonal:
        check_orthogonality(candidates)
    refined = common_refinement(list(candidates) + list(targets))
    T = refined[0].domain_length
    len_ints, len_den = _scale_row(refined[0].piece_lengths())
    cand_rows = [_scale_row(f.values) for f in refined[: len(candidates)]]
    targ_rows = [_scale_row(f.values) for f in refined[len(candidates):]]
    for i, (cv, cd) in enumerate(cand_rows, start=1):
        norm_num = sum(l * v * v for l, v in zip(len_ints, cv))
        if Fraction(norm_num, len_den * cd * cd) > T:
            raise BoundViolation(f"candidate {i} has L2 norm above 1")
    weighted = [[l * t for l, t in zip(len_ints, tv)] for tv, _ in targ_rows]
    best_pos = 0
    best_sum: Fraction | None = None
    for pos, (cv, cd) in enumerate(cand_rows):
        total = Fraction(0)
        for (_, td), wrow in zip(targ_rows, weighted):
            raw = sum(c * w for c, w in zip(cv, wrow))
            if raw:
                total += abs(Fraction(raw, len_den * cd * td))
        if best_sum is None or total < best_sum:
            best_pos, best_sum = pos, total
    assert best_sum is not None
    return best_pos, best_sum / T


@dataclass(frozen=True)
class SelectionCertificate:
    """Greedy run record; all sums are exact rationals.

    chosen_indices are 1-based positions in the source system.  The bound
    entries are the averaging bounds sqrt(m * sum ||f_j||^2 / n) per step
    (stored squared, exactly, next to a float rendering), and mu_total is
    the certified multiplicative error of the chosen family over subsets
    of size >= 2.
    """

    chosen_indices: tuple[int, ...]
    per_step_sum: tuple[Fraction, ...]
    per_step_bound_sq: tuple[Fraction, ...]
    per_step_bound: tuple[float, ...]
    threshold_ok: tuple[bool, ...]
    windows: tuple[tuple[int, int], ...]
    rho: int
    mu_total: Fraction

    def to_json(self) -> dict:
        return {
            "chosen_indices": list(self.chosen_indices),
            "per_step_sum": [str(s) for s in self.per_step_sum],
            "per_step_bound_sq": [str(b) for b in self.per_step_bound_sq],
            "per_step_bound": [{"value": b, "approx": True} for b in self.per_step_bound],
            "threshold_ok": list(self.threshold_ok),
            "windows": [list(w) for w in self.windows],
            "rho": self.rho,
            "mu_total": str(self.mu_total),
        }


def greedy_subsequence(
    sys: OrthogonalSystem, rho: int = 8, steps: int = 3
) -> SelectionCertificate:
    """Select steps + 1 functions whose product moments are certifiably small.

    Step m (1-based) selects from window [rho**m, rho**(m+1)) against the
    2**m - 1 products of the functions already chosen.  rho >= 2 is
    accepted so both window-base readings can be explored; the classical
    per-step guarantee sum < 2**-m relies on generous windows (rho >= 8).
    Functions are pre-scaled by the sup bound so candidates satisfy the
    L2 precondition.
    """
    if rho < 2:
        raise OutOfRange(f"window base must be at least 2, got {rho}")
    if steps < 1:
        raise OutOfRange(f"need at least one step, got {steps}")
    if steps > PRODUCT_STEP_CAP:
        raise CapacityExceeded(f"2**{steps} products per step is beyond the cap")
    if sys.n < 1:
        raise EmptyCandidates("empty system")
    if sys.sup_bound <= 0:
        raise BoundViolation("sup bound must be positive")
    funcs = [
        f if sys.sup_bound == 1 else scale(f, Fraction(1, 1) / sys.sup_bound)
        for f in sys.functions
    ]
    chosen = [1]
    sums: list[Fraction] = []
    bounds_sq: list[Fraction] = []
    windows: list[tuple[int, int]] = []
    for m in range(1, steps + 1):
        lo = rho**m
        hi = min(rho ** (m + 1), sys.n + 1)
        if lo > sys.n:
            raise WindowExhausted(
                f"step {m} window starts at {lo}, past the last index {sys.n}"
            )
        window = range(lo, hi)
        targets = [
            product([funcs[i - 1] for i in sub])
            for size in range(1, len(chosen) + 1)
            for sub in combinations(chosen, size)
        ]
        candidates = [funcs[i - 1] for i in window]
        pos, achieved = parseval_select(
            candidates, targets, assume_orthogonal=sys.certified_orthogonal
        )
        norm_mass = sum((_l2_sq(t) for t in targets), Fraction(0))
        bound_sq = Fraction(len(targets)) * norm_mass / len(candidates)
        chosen.append(lo + pos)
        sums.append(achieved)
        bounds_sq.append(bound_sq)
        windows.append((lo, hi))
    return SelectionCertificate(
        chosen_indices=tuple(chosen),
        per_step_sum=tuple(sums),
        per_step_bound_sq=tuple(bounds_sq),
        per_step_bound=tuple(math.sqrt(float(b)) for b in bounds_sq),
        threshold_ok=tuple(
            s < Fraction(1, 2 ** (m + 1)) for m, s in enumerate(sums)
        ),
        windows=tuple(windows),
        rho=rho,
        mu_total=sum(sums, Fraction(0)),
    )


def selected_family_mu(sys: OrthogonalSystem, indices: Sequence[int]) -> Fraction:
    """Exact mu of the chosen functions over subsets of size >= 2.

    This is the quantity the greedy certificate bounds: singletons are
    excluded because the selection controls product moments, not means.
    Functions are scaled by the sup bound, matching the selection run.
    """
    funcs = [
        sys.functions[i - 1]
        if sys.sup_bound == 1
        else scale(sys.functions[i - 1], Fraction(1, 1) / sys.sup_bound)
        for i in indices
    ]
    refined = common_refinement(funcs)
    lengths = refined[0].piece_lengths()
    T = refined[0].domain_length
    rows = [f.values for f in refined]
    total = Fraction(0)
    for size in range(2, len(funcs) + 1):
        for sub in combinations(range(len(funcs)), size):
            acc = Fraction(0)
            for i, ln in enumerate(lengths):
                p = ln
                for j in sub:
                    p *= rows[j][i]
                acc += p
            total += abs(acc / T)
    return total


def merge_selections(
    sys: OrthogonalSystem,
    first: SelectionCertificate,
    second: SelectionCertificate,
) -> dict:
    """Interleave two selection runs over the same system and re-verify.

    The merged family's mu is recomputed directly rather than summed from
    the certificates, since cross products between the two runs are not
    covered by either one.
    """
    indices = tuple(sorted(set(first.chosen_indices) | set(second.chosen_indices)))
    mu = selected_family_mu(sys, indices)
    return {
        "indices": indices,
        "mu": mu,
        "certified_separately": first.mu_total + second.mu_total,
    }


def rademacher_pool(n: int) -> OrthogonalSystem:
    """The first n dyadic sign functions as an orthonormal candidate pool."""
    if not 1 <= n <= 20:
        raise TooLarge(f"pool size must lie in 1..20, got {n}")
    return OrthogonalSystem(
        functions=tuple(rademacher(k) for k in range(1, n + 1)),
        sup_bound=Fraction(1),
        certified_orthogonal=True,
    )


def as_bounded_system(sys: OrthogonalSystem) -> BoundedSystem:
    """View the pool as a bounded system with symmetric bounds."""
    return symmetric_system(sys.functions, sys.sup_bound)
