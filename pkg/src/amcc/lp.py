"""Exact-rational linear programming for the contextual fraction.

The noncontextual fraction of a model is the value of

    maximize  sum_g b_g   subject to  M b <= v,  b >= 0

where M is the 0/1 incidence matrix (slot, global assignment) and v stacks
the model's weights in slot order. The inequality form is used deliberately:
its residual v - M b stays componentwise nonnegative, which is what turns the
optimum into a convex decomposition of the model. The equality feasibility
form M d = v is kept separate in is_noncontextual.

The solver is a two-phase tableau simplex with explicit slack, surplus and
artificial variables and Bland's anti-cycling rule; these polytopes are
massively degenerate (strongly contextual models sit on many zero slots), so
an anti-cycling rule is not optional. All arithmetic is exact; the reported
fraction is a rational number, not a float estimate.
"""

from dataclasses import dataclass

from .errors import PreconditionError, VerificationError
from .model import EmpiricalModel, is_no_signaling
from .rational import ONE, ZERO, rat, rat_str
from .scenario import (
    global_outcomes,
    global_size,
    incidence_matrix,
    restrict,
    section_index,
    section_size,
)

__all__ = [
    "LinearProgram",
    "LpSolution",
    "simplex_solve",
    "CfResult",
    "contextual_fraction",
    "is_noncontextual",
    "stacked_weights",
]

LESS = "<="
EQUAL = "="
GREATER = ">="


@dataclass(frozen=True)
class LinearProgram:
    """maximize objective . x subject to rows, with every variable >= 0."""

    objective: tuple
    matrix: tuple  # rows of coefficients
    rhs: tuple
    senses: tuple  # per row: "<=", "=" or ">="

    def __post_init__(self):
        n = len(self.objective)
        if not (len(self.matrix) == len(self.rhs) == len(self.senses)):
            raise ValueError("matrix, rhs and senses must have equal length")
        for row in self.matrix:
            if len(row) != n:
                raise ValueError("every row must match the objective length")
        for s in self.senses:
            if s not in (LESS, EQUAL, GREATER):
                raise ValueError(f"unknown constraint sense {s!r}")


@dataclass(frozen=True)
class LpSolution:
    status: str  # optimal | infeasible | unbounded
    value: object  # objective value when optimal
    x: tuple  # variable assignment when optimal
    pivots: int


def simplex_solve(lp):
    """Two-phase exact simplex. Returns an LpSolution whose assignment
    satisfies every constraint exactly when status is optimal."""
    n = len(lp.objective)
    m = len(lp.matrix)
    rows = []
    senses = []
    for i in range(m):
        coeffs = [rat(x) for x in lp.matrix[i]]
        b = rat(lp.rhs[i])
        s = lp.senses[i]
        if b < 0:
            coeffs = [-x for x in coeffs]
            b = -b
            s = {LESS: GREATER, GREATER: LESS, EQUAL: EQUAL}[s]
        rows.append((coeffs, b))
        senses.append(s)

    # column layout: n structural, then one slack/surplus per inequality row,
    # then one artificial per "=" or ">=" row
    slack_of = {}
    k = n
    for i, s in enumerate(senses):
        if s in (LESS, GREATER):
            slack_of[i] = k
            k += 1
    art_of = {}
    for i, s in enumerate(senses):
        if s in (EQUAL, GREATER):
            art_of[i] = k
            k += 1
    width = k

    tableau = []
    basis = []
    for i, (coeffs, b) in enumerate(rows):
        row = coeffs + [ZERO] * (width - n) + [b]
        if i in slack_of:
            row[slack_of[i]] = ONE if senses[i] == LESS else -ONE
        if i in art_of:
            row[art_of[i]] = ONE
            basis.append(art_of[i])
        else:
            basis.append(slack_of[i])
        tableau.append(row)

    pivots = 0
    if art_of:
        # phase 1: maximize minus the sum of artificials, starting value
        # -(sum of their rhs); feasible iff it reaches 0
        obj = [ZERO] * (width + 1)
        for i in art_of:
            row = tableau[i]
            for j in range(width + 1):
                obj[j] -= row[j]
        for i in art_of:
            obj[art_of[i]] = ZERO
        pivots += _run(tableau, obj, basis, width, phase_one=True)
        if obj[-1] != 0:
            return LpSolution(status="infeasible", value=None, x=(), pivots=pivots)
        pivots += _expel_artificials(tableau, basis, set(art_of.values()))

    barred = frozenset(art_of.values())
    obj = [-rat(c) for c in lp.objective] + [ZERO] * (width - n + 1)
    for i, bv in enumerate(basis):
        f = obj[bv]
        if f:
            row = tableau[i]
            for j in range(width + 1):
                if row[j]:
                    obj[j] -= f * row[j]
    count = _run(tableau, obj, basis, width, barred=barred)
    if count is None:
        return LpSolution(status="unbounded", value=None, x=(), pivots=pivots)
    pivots += count
    x = [ZERO] * n
    for i, bv in enumerate(basis):
        if bv < n:
            x[bv] = tableau[i][-1]
    return LpSolution(status="optimal", value=obj[-1], x=tuple(x), pivots=pivots)


def _run(tableau, obj, basis, width, phase_one=False, barred=frozenset()):
    """Pivot to optimality with Bland's rule. Returns the pivot count, or
    None when the objective is unbounded (never in phase 1)."""
    m = len(tableau)
    pivots = 0
    while True:
        enter = None
        for j in range(width):
            if j not in barred and obj[j] < 0:
                enter = j
                break
        if enter is None:
            return pivots
        leave = None
        best = None
        for i in range(m):
            a = tableau[i][enter]
            if a > 0:
                ratio = tableau[i][-1] / a
                if leave is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            if phase_one:
                raise VerificationError("phase-1 objective unbounded")
            return None
        _pivot(tableau, obj, basis, leave, enter)
        pivots += 1


def _pivot(tableau, obj, basis, r, e):
    prow = tableau[r]
    p = prow[e]
    if p != ONE:
        prow = [x / p for x in prow]
        tableau[r] = prow
    for row in tableau:
        if row is prow:
            continue
        f = row[e]
        if f:
            for j, pv in enumerate(prow):
                if pv:
                    row[j] -= f * pv
    f = obj[e]
    if f:
        for j, pv in enumerate(prow):
            if pv:
                obj[j] -= f * pv
    basis[r] = e


def _expel_artificials(tableau, basis, art_cols):
    """Pivot basic artificials (all at value 0 after phase 1) onto any
    non-artificial column; rows with no such column are redundant and are
    zeroed in place."""
    pivots = 0
    dummy = [ZERO] * (len(tableau[0]))
    for i in range(len(tableau)):
        if basis[i] not in art_cols:
            continue
        row = tableau[i]
        enter = next(
            (j for j in range(len(row) - 1) if j not in art_cols and row[j] != 0),
            None,
        )
        if enter is None:
            # redundant constraint; leave the zero row, it can never pivot
            continue
        _pivot(tableau, dummy, basis, i, enter)
        pivots += 1
    return pivots


def stacked_weights(model):
    """Model weights in slot order (context-major, section-minor)."""
    out = []
    for row in model.tables:
        out.extend(row)
    return out


def _require_no_signaling(model):
    ok, wit = is_no_signaling(model)
    if not ok:
        ci, cj, shared, u, a, b = wit
        names = " ".join(model.scenario.measurements[m] for m in shared)
        raise PreconditionError(
            f"model is signaling: contexts {ci} and {cj} disagree on {names} @ "
            f"{','.join(map(str, u))}: {rat_str(a)} vs {rat_str(b)}"
        )


@dataclass(frozen=True)
class CfResult:
    ncf: object
    cf: object
    distribution: tuple  # optimal weight per global assignment, mass = ncf
    noncontextual: object  # EmpiricalModel or None
    strongly_contextual: object  # EmpiricalModel or None
    pivots: int


def contextual_fraction(model):
    """Exact contextual fraction with the witnessing decomposition

        model = ncf * noncontextual + cf * strongly_contextual

    where the noncontextual part is the normalized optimal mixture of global
    assignments and the strongly contextual part is the normalized residual.
    Either part is None when its coefficient is zero. The decomposition is
    re-verified entrywise before returning."""
    _require_no_signaling(model)
    sc = model.scenario
    ng = global_size(sc)
    mat = incidence_matrix(sc)
    A = [[ONE if x else ZERO for x in mat[i]] for i in range(mat.shape[0])]
    v = stacked_weights(model)
    sol = simplex_solve(
        LinearProgram(
            objective=(ONE,) * ng,
            matrix=tuple(tuple(r) for r in A),
            rhs=tuple(v),
            senses=(LESS,) * len(v),
        )
    )
    if sol.status != "optimal":
        raise VerificationError(f"fraction LP ended {sol.status}")
    ncf = sol.value
    cf = ONE - ncf
    if ncf < 0 or cf < 0:
        raise VerificationError("noncontextual fraction outside [0, 1]",
                                details={"ncf": ncf})
    dist = sol.x
    used = [(gi, dist[gi]) for gi in range(ng) if dist[gi]]
    slots_of = {
        gi: [
            section_index(sc, ci, restrict(sc, global_outcomes(sc, gi), ctx))
            for ci, ctx in enumerate(sc.cover)
        ]
        for gi, _ in used
    }
    noncontextual = None
    if ncf > 0:
        rows = []
        for ci in range(sc.n_contexts):
            row = [ZERO] * section_size(sc, ci)
            for gi, w in used:
                row[slots_of[gi][ci]] += w
            rows.append(tuple(x / ncf for x in row))
        noncontextual = EmpiricalModel(sc, tuple(rows))
    strongly_contextual = None
    if cf > 0:
        rows = []
        for ci in range(sc.n_contexts):
            row = list(model.tables[ci])
            for gi, w in used:
                row[slots_of[gi][ci]] -= w
            for si, x in enumerate(row):
                if x < 0:
                    raise VerificationError(
                        "negative residual in decomposition",
                        details={"context": ci, "section": si, "value": x},
                    )
            rows.append(tuple(x / cf for x in row))
        strongly_contextual = EmpiricalModel(sc, tuple(rows))
    _check_decomposition(model, ncf, noncontextual, cf, strongly_contextual)
    return CfResult(
        ncf=ncf,
        cf=cf,
        distribution=dist,
        noncontextual=noncontextual,
        strongly_contextual=strongly_contextual,
        pivots=sol.pivots,
    )


def _check_decomposition(model, ncf, nc_part, cf, sc_part):
    for ci, row in enumerate(model.tables):
        for si, w in enumerate(row):
            acc = ZERO
            if nc_part is not None:
                acc += ncf * nc_part.tables[ci][si]
            if sc_part is not None:
                acc += cf * sc_part.tables[ci][si]
            if acc != w:
                raise VerificationError(
                    "decomposition does not recompose the model",
                    details={"context": ci, "section": si},
                )


def is_noncontextual(model):
    """True iff some distribution d over global assignments reproduces the
    model exactly: M d = v, d >= 0 feasible. Solved in the equality form, so
    this is an independent check of contextual_fraction's cf == 0."""
    _require_no_signaling(model)
    sc = model.scenario
    ng = global_size(sc)
    mat = incidence_matrix(sc)
    A = tuple(
        tuple(ONE if x else ZERO for x in mat[i]) for i in range(mat.shape[0])
    )
    v = tuple(stacked_weights(model))
    sol = simplex_solve(
        LinearProgram(
            objective=(ZERO,) * ng,
            matrix=A,
            rhs=v,
            senses=(EQUAL,) * len(v),
        )
    )
    return sol.status == "optimal"
