"""Exact 0-1 ILP solver: bounded simplex inside best-first branch-and-bound.

The LP relaxation is solved on a dense tableau.  The root uses the primal
simplex when the slack basis is feasible and the dual simplex otherwise (all
structural variables are boxed, so putting each at the bound its cost prefers
gives a dual-feasible start).  Children are re-optimised with the dual simplex
from the parent's basis.  Bland's rule takes over after a run of degenerate
pivots.

:func:`solve_brute` enumerates every assignment and serves as the oracle in
tests.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ilp import Constraint, IlpProblem, IlpSolution

__all__ = ["LinearProgram", "LpResult", "SolverStats", "NumericalBreakdown", "LimitExceeded",
           "TooLarge", "solve_lp", "solve_ilp", "solve_brute", "write_solution", "read_solution",
           "random_problem"]

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7   # LP primal feasibility
OPT_TOL = 1e-9    # reduced-cost sign
INT_TOL = 1e-5    # integrality of LP values
CHECK_TOL = 1e-9  # integral points are re-checked against the rows at this tolerance
BLAND_AFTER = 50
REFACTOR_EVERY = 100
COND_LIMIT = 1e12


class NumericalBreakdown(ArithmeticError):
    pass


class TooLarge(ValueError):
    pass


class LimitExceeded(RuntimeError):
    """Node or time limit hit; ``solution`` is the incumbent (or ``None``)."""

    def __init__(self, msg, solution=None, stats=None):
        super().__init__(msg)
        self.solution = solution
        self.stats = stats


@dataclass
class LinearProgram:
    """``max c.x`` subject to ``A x (<=|=|>=) b`` and ``lb <= x <= ub``."""

    c: np.ndarray
    A: np.ndarray
    senses: list
    b: np.ndarray
    lb: np.ndarray
    ub: np.ndarray

    @classmethod
    def from_problem(cls, problem: IlpProblem):
        A, senses, b = problem.matrix()
        n = problem.n
        return cls(problem.objective.copy(), A, senses, b, np.zeros(n), np.ones(n))

    def rows_le(self):
        """All rows as ``<=``; equalities become two rows."""
        rows, rhs = [], []
        for r, s in enumerate(self.senses):
            if s in ("<=", "="):
                rows.append(self.A[r])
                rhs.append(self.b[r])
            if s in (">=", "="):
                rows.append(-self.A[r])
                rhs.append(-self.b[r])
            if s not in ("<=", ">=", "="):
                raise ValueError(f"unknown sense {s!r}")
        n = len(self.c)
        A = np.array(rows, dtype=float).reshape(len(rows), n)
        return A, np.array(rhs, dtype=float)


@dataclass
class LpResult:
    status: str  # optimal | infeasible | unbounded
    x: Optional[np.ndarray]
    objective: float
    iterations: int


@dataclass
class SolverStats:
    nodes_explored: int = 0
    lp_iterations: int = 0
    wall_time: float = 0.0
    best_bound: float = math.inf
    incumbent_value: float = -math.inf


class _Tableau:
    """Dense bounded-variable simplex tableau over ``[structural | slack]`` columns."""

    def __init__(self, A, b, c, lo, hi, tol=FEAS_TOL):
        m, n = A.shape
        self.tol = tol
        self.m, self.n = m, n
        self.M = np.hstack([A, np.eye(m)])
        self.b = b
        self.cost = np.concatenate([c, np.zeros(m)])
        self.lo = np.concatenate([lo, np.zeros(m)]).astype(float)
        self.hi = np.concatenate([hi, np.full(m, np.inf)]).astype(float)
        self.iterations = 0
        self.basis = np.arange(n, n + m)
        self.at_upper = np.zeros(n + m, dtype=bool)
        self.since_refactor = 0

    # -- state ---------------------------------------------------------------
    def snapshot(self):
        return self.basis.copy(), self.at_upper.copy()

    def load(self, basis, at_upper):
        self.basis = np.array(basis)
        self.at_upper = np.array(at_upper)
        self.refactor()

    def nonbasic_values(self):
        x = np.where(self.at_upper, self.hi, self.lo)
        x[self.basis] = 0.0
        return x

    def refactor(self):
        B = self.M[:, self.basis]
        try:
            Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            raise NumericalBreakdown("singular basis") from None
        if self.m and np.abs(B).sum(0).max() * np.abs(Binv).sum(0).max() > COND_LIMIT:
            raise NumericalBreakdown("basis condition number above limit")
        self.T = Binv @ self.M
        self.T[np.abs(self.T) < 1e-13] = 0.0
        xn = self.nonbasic_values()
        self.xB = Binv @ (self.b - self.M @ xn)
        self.d = self.cost - self.cost[self.basis] @ self.T
        self.since_refactor = 0

    def values(self):
        x = self.nonbasic_values()
        x[self.basis] = self.xB
        return x

    def objective(self):
        return float(self.cost @ self.values())

    # -- pivoting ------------------------------------------------------------
    def _pivot(self, r, j):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.d = self.d - self.d[j] * T[r]
        self.d[j] = 0.0
        self.basis[r] = j
        self.iterations += 1
        self.since_refactor += 1
        if self.since_refactor >= REFACTOR_EVERY:
            self.refactor()

    def _movable(self):
        free = self.hi > self.lo
        free[self.basis] = False
        return free

    def set_bounds(self, k, lo, hi):
        """Tighten the bounds of structural ``k``; keeps the basis."""
        old = self.values()[k]
        self.lo[k], self.hi[k] = lo, hi
        pos = np.nonzero(self.basis == k)[0]
        if pos.size:
            return
        new = hi if self.at_upper[k] else lo
        if new != old:
            self.xB -= self.T[:, k] * (new - old)

    # -- algorithms ----------------------------------------------------------
    def primal(self, max_iter):
        bland = False
        streak = 0
        for _ in range(max_iter):
            movable = self._movable()
            up = movable & ~self.at_upper & (self.d > OPT_TOL)
            down = movable & self.at_upper & (self.d < -OPT_TOL)
            cand = np.nonzero(up | down)[0]
            if cand.size == 0:
                return "optimal"
            j = int(cand[0]) if bland else int(cand[np.argmax(np.abs(self.d[cand]))])
            sigma = -1.0 if self.at_upper[j] else 1.0
            alpha = sigma * self.T[:, j]
            lo_b, hi_b = self.lo[self.basis], self.hi[self.basis]
            with np.errstate(divide="ignore", invalid="ignore"):
                dec = alpha > PIVOT_TOL
                inc = alpha < -PIVOT_TOL
                ratio = np.full(self.m, np.inf)
                ratio[dec] = (self.xB[dec] - lo_b[dec]) / alpha[dec]
                ratio[inc] = (hi_b[inc] - self.xB[inc]) / -alpha[inc]
            ratio = np.maximum(ratio, 0.0)
            t_flip = self.hi[j] - self.lo[j]
            t_row = ratio.min() if self.m else np.inf
            if not math.isfinite(min(t_flip, t_row)):
                return "unbounded"
            if t_flip <= t_row:
                self.xB -= t_flip * alpha
                self.at_upper[j] = not self.at_upper[j]
                self.iterations += 1
                t = t_flip
            else:
                ties = np.nonzero(ratio <= t_row + 1e-12)[0]
                if bland:
                    r = int(ties[np.argmin(self.basis[ties])])
                else:
                    r = int(ties[np.argmax(np.abs(alpha[ties]))])
                t = t_row
                leaving = self.basis[r]
                entering_val = (self.hi[j] if self.at_upper[j] else self.lo[j]) + sigma * t
                self.xB -= t * alpha
                self.at_upper[leaving] = bool(inc[r])
                self._pivot(r, j)
                self.xB[r] = entering_val
            streak = streak + 1 if t <= 1e-12 else 0
            if streak > BLAND_AFTER:
                bland = True
        raise NumericalBreakdown("primal simplex iteration limit")

    def dual(self, max_iter):
        bland = False
        streak = 0
        for _ in range(max_iter):
            lo_b, hi_b = self.lo[self.basis], self.hi[self.basis]
            below = lo_b - self.xB
            above = self.xB - hi_b
            viol = np.maximum(below, above)
            rows = np.nonzero(viol > self.tol)[0]
            if rows.size == 0:
                return "optimal"
            if bland:
                r = int(rows[np.argmin(self.basis[rows])])
            else:
                r = int(rows[np.argmax(viol[rows])])
            to_lower = below[r] > self.tol
            row = self.T[r]
            movable = self._movable()
            if to_lower:
                ok = movable & ((~self.at_upper & (row < -PIVOT_TOL)) | (self.at_upper & (row > PIVOT_TOL)))
            else:
                ok = movable & ((~self.at_upper & (row > PIVOT_TOL)) | (self.at_upper & (row < -PIVOT_TOL)))
            cand = np.nonzero(ok)[0]
            if cand.size == 0:
                return "infeasible"
            ratio = np.abs(self.d[cand]) / np.abs(row[cand])
            best = ratio.min()
            ties = cand[ratio <= best + 1e-12]
            j = int(ties[0]) if bland else int(ties[np.argmax(np.abs(row[ties]))])
            target = lo_b[r] if to_lower else hi_b[r]
            delta = (self.xB[r] - target) / row[j]
            entering_val = (self.hi[j] if self.at_upper[j] else self.lo[j]) + delta
            leaving = self.basis[r]
            self.xB -= delta * self.T[:, j]
            self.at_upper[leaving] = not to_lower
            self._pivot(r, j)
            self.xB[r] = entering_val
            streak = streak + 1 if best <= 1e-12 else 0
            if streak > BLAND_AFTER:
                bland = True
        raise NumericalBreakdown("dual simplex iteration limit")

    def primal_feasible(self):
        lo_b, hi_b = self.lo[self.basis], self.hi[self.basis]
        return bool(np.all(self.xB >= lo_b - self.tol) and np.all(self.xB <= hi_b + self.tol))

    def reoptimize(self, max_iter):
        """Dual simplex to primal feasibility, then primal clean-up."""
        if not self.primal_feasible():
            if self.dual(max_iter) == "infeasible":
                return "infeasible"
        return self.primal(max_iter)

    def cold_start(self, max_iter):
        self.basis = np.arange(self.n, self.n + self.m)
        self.at_upper[:] = False
        self.refactor()
        if not self.primal_feasible():
            # dual-feasible start: every boxed structural at the bound its cost prefers
            self.at_upper[: self.n] = (self.cost[: self.n] > 0) & np.isfinite(self.hi[: self.n])
            self.refactor()
            self.d[self.basis] = 0.0
        return self.reoptimize(max_iter)


def _max_iter(m, n):
    return 50 * (m + n) + 1000


def solve_lp(lp: LinearProgram, tol: float = FEAS_TOL) -> LpResult:
    """Maximise an LP; ``tol`` is the primal feasibility tolerance.

    Raises :class:`NumericalBreakdown` when a basis becomes too ill-conditioned.
    """
    A, b = lp.rows_le()
    lo, hi = np.asarray(lp.lb, float), np.asarray(lp.ub, float)
    if np.any(lo > hi):
        return LpResult("infeasible", None, -math.inf, 0)
    tab = _Tableau(A, b, np.asarray(lp.c, float), lo, hi, tol)
    status = tab.cold_start(_max_iter(*A.shape))
    if status != "optimal":
        return LpResult(status, None, -math.inf if status == "infeasible" else math.inf, tab.iterations)
    x = tab.values()[: A.shape[1]]
    return LpResult("optimal", x, float(np.dot(lp.c, x)), tab.iterations)


# -- presolve -------------------------------------------------------------------

def _presolve(A, senses, b):
    """Fix variables implied by single-variable rows.

    Returns ``(lo, hi)`` integer bounds or ``None`` when a contradiction is found.
    """
    n = A.shape[1]
    lo = np.zeros(n)
    hi = np.ones(n)
    changed = True
    while changed:
        changed = False
        fixed = lo == hi
        for r in range(A.shape[0]):
            row = A[r]
            nz = np.nonzero(row)[0]
            free = [k for k in nz if not fixed[k]]
            rest = math.fsum(row[k] * lo[k] for k in nz if fixed[k])
            rhs = b[r] - rest
            if not free:
                act = 0.0
                if (senses[r] == "<=" and act > rhs + CHECK_TOL) or (senses[r] == ">=" and act < rhs - CHECK_TOL) \
                        or (senses[r] == "=" and abs(act - rhs) > CHECK_TOL):
                    return None
                continue
            if len(free) != 1:
                continue
            k = free[0]
            a = row[k]
            bound = rhs / a
            le = senses[r] == "<=" if a > 0 else senses[r] == ">="
            ge = senses[r] == ">=" if a > 0 else senses[r] == "<="
            new_lo, new_hi = lo[k], hi[k]
            if senses[r] == "=" or le:
                new_hi = min(new_hi, math.floor(bound + CHECK_TOL))
            if senses[r] == "=" or ge:
                new_lo = max(new_lo, math.ceil(bound - CHECK_TOL))
            if new_lo > new_hi:
                return None
            if (new_lo, new_hi) != (lo[k], hi[k]):
                lo[k], hi[k] = new_lo, new_hi
                fixed[k] = lo[k] == hi[k]
                changed = True
    return lo, hi


def _feasible(A_le, b_le, x):
    return bool(np.all(A_le @ x <= b_le + CHECK_TOL))


def solve_ilp(problem: IlpProblem, node_limit: Optional[int] = None,
              time_limit: Optional[float] = None, gap: float = 1e-9):
    """Exact branch-and-bound.

    Returns ``(IlpSolution, SolverStats)``.  Nodes are taken best-bound
    first; from each one the solver dives depth-first, branching on the most
    fractional variable (lowest index on ties) and following the side the LP
    value leans to.  Raises :class:`LimitExceeded` with the incumbent when a
    limit stops the search.
    """
    start = time.perf_counter()
    stats = SolverStats()
    n = problem.n
    A, senses, b = problem.matrix()
    bounds = _presolve(A, senses, b)

    def finish(x, status):
        stats.wall_time = time.perf_counter() - start
        if x is None:
            return IlpSolution({}, -math.inf, status), stats
        assignment = {name: int(round(x[k])) for k, name in enumerate(problem.variables)}
        return IlpSolution(assignment, problem.evaluate(x), status), stats

    if bounds is None:
        stats.best_bound = -math.inf
        return finish(None, "infeasible")
    lo0, hi0 = bounds
    free = np.nonzero(lo0 < hi0)[0]
    base = lo0.copy()

    lp = LinearProgram(problem.objective, A, senses, b, lo0, hi0)
    A_le, b_le = lp.rows_le()
    # drop fixed columns and rows left without free variables
    b_red = b_le - A_le @ base
    A_red = A_le[:, free]
    keep = np.any(A_red != 0, axis=1)
    if np.any(b_red[~keep] < -CHECK_TOL):
        return finish(None, "infeasible")
    A_red, b_red = A_red[keep], b_red[keep]
    c_red = problem.objective[free]
    const = math.fsum(problem.objective[k] * base[k] for k in range(n) if base[k])

    def full(xr):
        x = base.copy()
        x[free] = np.round(xr)
        return x

    incumbent = None
    inc_val = -math.inf
    zero = np.zeros(len(free))
    if _feasible(A_red, b_red, zero):
        incumbent = full(zero)
        inc_val = problem.evaluate(incumbent)

    if len(free) == 0:
        stats.nodes_explored = 1
        stats.best_bound = stats.incumbent_value = inc_val
        return finish(incumbent, "optimal" if incumbent is not None else "infeasible")

    tab = _Tableau(A_red, b_red, c_red, np.zeros(len(free)), np.ones(len(free)))
    max_iter = _max_iter(*A_red.shape)
    nfree = len(free)
    heap = []
    seq = 0
    status = tab.cold_start(max_iter)
    first = True

    def lp_value():
        return const + float(c_red @ tab.values()[:nfree])

    while True:
        if not first:
            if not heap:
                break
            neg_bound, _, lo, hi, state = heapq.heappop(heap)
            if -neg_bound <= inc_val + gap * max(1.0, abs(inc_val)):
                heap.clear()
                break
            tab.lo[:nfree], tab.hi[:nfree] = lo, hi
            tab.load(*state)
            status = tab.reoptimize(max_iter)
        first = False
        # depth-first dive
        while True:
            stats.nodes_explored += 1
            if node_limit is not None and stats.nodes_explored > node_limit:
                return _limit(problem, stats, start, incumbent, inc_val, heap, "node limit reached")
            if time_limit is not None and time.perf_counter() - start > time_limit:
                return _limit(problem, stats, start, incumbent, inc_val, heap, "time limit reached")
            if status != "optimal":
                break
            bound = lp_value()
            if bound <= inc_val + gap * max(1.0, abs(inc_val)):
                break
            xr = tab.values()[:nfree]
            frac = np.minimum(xr - np.floor(xr), np.ceil(xr) - xr)
            k = int(np.argmax(frac))
            if frac[k] <= INT_TOL:
                cand = np.round(xr)
                if _feasible(A_red, b_red, cand):
                    val = problem.evaluate(full(cand))
                    if val > inc_val:
                        incumbent, inc_val = full(cand), val
                    break
                # rounding broke a row; branch on the largest deviation instead
                k = int(np.argmax(np.abs(xr - cand)))
                if abs(xr[k] - cand[k]) == 0:
                    break
            go_up = xr[k] >= 0.5
            lo, hi = tab.lo[:nfree].copy(), tab.hi[:nfree].copy()
            other_lo, other_hi = lo.copy(), hi.copy()
            if go_up:
                other_hi[k] = 0.0
            else:
                other_lo[k] = 1.0
            seq += 1
            heapq.heappush(heap, (-bound, seq, other_lo, other_hi, tab.snapshot()))
            if go_up:
                tab.set_bounds(k, 1.0, tab.hi[k])
            else:
                tab.set_bounds(k, tab.lo[k], 0.0)
            status = tab.reoptimize(max_iter)
    stats.lp_iterations = tab.iterations
    stats.incumbent_value = inc_val
    stats.best_bound = inc_val
    if incumbent is None:
        return finish(None, "infeasible")
    return finish(incumbent, "optimal")


def _limit(problem, stats, start, incumbent, inc_val, heap, msg):
    stats.incumbent_value = inc_val
    open_bounds = [-h[0] for h in heap]
    stats.best_bound = max([inc_val] + open_bounds) if open_bounds else inc_val
    stats.wall_time = time.perf_counter() - start
    sol = None
    if incumbent is not None:
        sol = IlpSolution({name: int(round(incumbent[k])) for k, name in enumerate(problem.variables)},
                          problem.evaluate(incumbent), "limit")
    raise LimitExceeded(msg, sol, stats)


# -- brute force ----------------------------------------------------------------

def solve_brute(problem: IlpProblem, cap: int = 25, chunk_bits: int = 16) -> IlpSolution:
    """Enumerate all ``2**n`` assignments.

    Ties within 1e-9 go to the lexicographically smallest assignment (first
    variable most significant).
    """
    n = problem.n
    if n > cap:
        raise TooLarge(f"{n} variables exceed the brute-force cap of {cap}")
    A, senses, b = problem.matrix()
    lp = LinearProgram(problem.objective, A, senses, b, np.zeros(n), np.ones(n))
    A_le, b_le = lp.rows_le()
    c = problem.objective
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    total = 1 << n
    step = 1 << min(chunk_bits, n)
    best_val, best_k = -math.inf, None
    for first in range(0, total, step):
        ks = np.arange(first, min(first + step, total), dtype=np.int64)
        X = ((ks[:, None] >> shifts[None, :]) & 1).astype(float)
        ok = np.all(X @ A_le.T <= b_le + CHECK_TOL, axis=1) if A_le.shape[0] else np.ones(len(ks), bool)
        if not ok.any():
            continue
        vals = X @ c
        vals[~ok] = -np.inf
        top = vals.max()
        idx = int(np.nonzero(vals >= top - 1e-9)[0][0])
        if best_k is None or top > best_val + 1e-9:
            best_val, best_k = top, int(ks[idx])
    if best_k is None:
        return IlpSolution({}, -math.inf, "infeasible")
    x = np.array([(best_k >> s) & 1 for s in shifts], dtype=float)
    assignment = {name: int(x[k]) for k, name in enumerate(problem.variables)}
    return IlpSolution(assignment, problem.evaluate(x), "optimal")


# -- files ------------------------------------------------------------------------

_STAT_KEYS = ("nodes_explored", "lp_iterations", "best_bound", "incumbent_value")


def write_solution(solution: IlpSolution, stats: Optional[SolverStats] = None) -> str:
    """Text form: ``name<TAB>value`` lines, then ``# key<TAB>value`` footer.

    Wall time is left out so that identical runs give identical files.
    """
    lines = [f"{name}\t{v}" for name, v in solution.assignment.items()]
    lines.append(f"# status\t{solution.status}")
    lines.append(f"# objective\t{solution.objective_value!r}")
    if stats is not None:
        for key in _STAT_KEYS:
            lines.append(f"# {key}\t{getattr(stats, key)!r}")
    return "\n".join(lines) + "\n"


def read_solution(text: str):
    assignment, meta = {}, {}
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("# "):
            key, _, value = line[2:].partition("\t")
            meta[key] = value
        else:
            name, value = line.split("\t")
            assignment[name] = int(value)
    sol = IlpSolution(assignment, float(meta.get("objective", "-inf")), meta.get("status", "optimal"))
    stats = None
    if "nodes_explored" in meta:
        stats = SolverStats(int(meta["nodes_explored"]), int(meta["lp_iterations"]), 0.0,
                            float(meta["best_bound"]), float(meta["incumbent_value"]))
    return sol, stats


# -- random instances ---------------------------------------------------------------

def random_problem(rng, n: int, m: Optional[int] = None, density: float = 0.5,
                   coef_range: int = 5) -> IlpProblem:
    """Random 0-1 program with small integer data.

    Constraints mix ``<=``, ``>=`` and ``=`` rows; right-hand sides are drawn
    so that a random point satisfies most of them, which keeps a fair share of
    instances feasible.
    """
    m = m if m is not None else max(1, n // 2)
    obj = rng.integers(-coef_range, coef_range + 1, size=n).astype(float)
    point = rng.integers(0, 2, size=n)
    rows = []
    for r in range(m):
        mask = rng.random(n) < density
        if not mask.any():
            mask[rng.integers(n)] = True
        coefs = rng.integers(-coef_range, coef_range + 1, size=n) * mask
        if not coefs.any():
            coefs[np.nonzero(mask)[0][0]] = 1
        act = int(coefs @ point)
        sense = ("<=", ">=", "=")[int(rng.choice(3, p=[0.6, 0.3, 0.1]))]
        slack = int(rng.integers(0, 3))
        rhs = act + slack if sense == "<=" else act - slack if sense == ">=" else act
        terms = tuple((k, float(coefs[k])) for k in range(n) if coefs[k])
        rows.append(Constraint(terms, sense, float(rhs), "random"))
    return IlpProblem([f"x{k}" for k in range(n)], obj, rows)
