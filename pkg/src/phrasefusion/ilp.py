"""0-1 integer program for phrase selection and sentence construction.

Variables (all binary):

* ``a{i}``      NP ``i`` selected
* ``b{j}``      VP ``j`` selected
* ``ap{i}_{j}`` NPs ``i`` and ``j`` both selected (only where their similarity > 0)
* ``bp{i}_{j}`` VPs ``i`` and ``j`` both selected (likewise)
* ``g{i}_{j}``  NP ``i`` is the subject of VP ``j`` (only where compatible)

Indices refer to positions in the NP and VP lists handed to
:func:`build_problem`.  Every constraint carries a tag naming its family.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .phrases import same_path

__all__ = ["GenerationConfig", "Constraint", "IlpProblem", "IlpSolution", "NoCandidates",
           "IndexMismatch", "UnknownVariable", "build_problem", "validate_solution",
           "serialize_problem", "parse_problem", "TAGS", "MODES", "ABSTRACTIVE", "COMPRESSIVE", "EXTRACTIVE"]

ABSTRACTIVE, COMPRESSIVE, EXTRACTIVE = "abstractive", "compressive", "extractive"
MODES = (ABSTRACTIVE, COMPRESSIVE, EXTRACTIVE)

TAGS = ("np_validity", "vp_legality", "not_i_within_i", "np_cooccurrence", "vp_cooccurrence",
        "sentence_number", "short_sentence", "pronoun", "length", "extractive_tie")


class NoCandidates(ValueError):
    pass


class IndexMismatch(ValueError):
    pass


class UnknownVariable(KeyError):
    pass


@dataclass(frozen=True)
class GenerationConfig:
    L: int = 100
    K: int = 10
    M: int = 10
    mode: str = ABSTRACTIVE

    def __post_init__(self):
        if self.L < 1 or self.K < 1 or self.M < 0:
            raise ValueError(f"need L >= 1, K >= 1, M >= 0; got L={self.L} K={self.K} M={self.M}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class Constraint:
    """``sum(coef * x[var] for var, coef in terms) <sense> rhs``; terms sorted by variable."""

    terms: tuple
    sense: str
    rhs: float
    tag: str

    def activity(self, x) -> float:
        return math.fsum(c * x[v] for v, c in self.terms)

    def holds(self, x, tol=1e-9) -> bool:
        act = self.activity(x)
        if self.sense == "<=":
            return act <= self.rhs + tol
        if self.sense == ">=":
            return act >= self.rhs - tol
        return abs(act - self.rhs) <= tol


@dataclass(eq=False)
class IlpProblem:
    variables: list
    objective: np.ndarray
    constraints: list
    np_ids: list = field(default_factory=list)
    vp_ids: list = field(default_factory=list)

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.index = {name: k for k, name in enumerate(self.variables)}
        if len(self.index) != len(self.variables):
            raise ValueError("duplicate variable names")
        if self.objective.shape != (len(self.variables),):
            raise IndexMismatch("objective length differs from variable count")

    @property
    def n(self) -> int:
        return len(self.variables)

    def var(self, name) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise UnknownVariable(name) from None

    def vector(self, assignment) -> np.ndarray:
        """Dense 0/1 vector from a mapping ``name -> value`` or a sequence."""
        if isinstance(assignment, dict):
            x = np.zeros(self.n)
            for name, v in assignment.items():
                x[self.var(name)] = v
            missing = set(self.variables) - set(assignment)
            if missing:
                raise UnknownVariable(f"assignment misses {sorted(missing)[:5]}")
            return x
        x = np.asarray(assignment, dtype=float)
        if x.shape != (self.n,):
            raise IndexMismatch(f"assignment has shape {x.shape}, expected ({self.n},)")
        return x

    def evaluate(self, assignment) -> float:
        x = self.vector(assignment)
        return math.fsum(self.objective[k] * x[k] for k in range(self.n) if x[k])

    def matrix(self):
        """Dense ``(A, senses, b)`` of the constraint rows."""
        A = np.zeros((len(self.constraints), self.n))
        for r, con in enumerate(self.constraints):
            for v, c in con.terms:
                A[r, v] = c
        return A, [c.sense for c in self.constraints], np.array([c.rhs for c in self.constraints], dtype=float)

    def __eq__(self, other):
        return (isinstance(other, IlpProblem) and self.variables == other.variables
                and np.array_equal(self.objective, other.objective)
                and self.constraints == other.constraints
                and self.np_ids == other.np_ids and self.vp_ids == other.vp_ids)


@dataclass
class IlpSolution:
    assignment: dict
    objective_value: float
    status: str

    def selected(self, prefix) -> list:
        return [name for name, v in self.assignment.items() if v and name.startswith(prefix)
                and re.fullmatch(prefix + r"\d+(_\d+)?", name)]


def _row(builder, terms, sense, rhs, tag):
    merged = {}
    for v, c in terms:
        merged[v] = merged.get(v, 0) + c
    builder.append(Constraint(tuple(sorted((v, c) for v, c in merged.items() if c)), sense, float(rhs), tag))


def _clause_units(nps, vps, sentence_tokens):
    """Clause-level ``(np index, [vp indices])`` groups eligible for verbatim extraction.

    A clause qualifies when it has exactly one level-1 NP, at least one
    level-1 VP after it, and nothing but punctuation between them.
    """
    from .treebank import is_punct

    if sentence_tokens is None:
        raise ValueError("extractive mode needs the source sentence tokens")
    by_clause = {}
    for i, p in enumerate(nps):
        if p.level == 1:
            by_clause.setdefault(p.parent_s, ([], []))[0].append(i)
    for j, v in enumerate(vps):
        if v.level == 1:
            by_clause.setdefault(v.parent_s, ([], []))[1].append(j)
    units = []
    for clause in sorted(by_clause, key=lambda c: min(by_clause[c][0] or [math.inf])):
        ni, vj = by_clause[clause]
        if len(ni) != 1 or not vj:
            continue
        subj = nps[ni[0]]
        if any(vps[j].span[0] < subj.span[1] for j in vj):
            continue
        covered = set(range(*subj.span))
        for j in vj:
            covered.update(range(*vps[j].span))
        tokens = sentence_tokens[subj.source]
        end = max(vps[j].span[1] for j in vj)
        if all(is_punct(tokens[k]) for k in range(subj.span[0], end) if k not in covered):
            units.append((ni[0], sorted(vj)))
    return units


def build_problem(nps, vps, gamma_tilde, sims, cfg: GenerationConfig = GenerationConfig(),
                  gamma=None, sentence_tokens=None) -> IlpProblem:
    """Assemble the integer program for scored phrases.

    Args:
        nps, vps: scored NP and VP phrases, in matrix index order.
        gamma_tilde: expanded NP x VP compatibility (0/1).
        sims: :class:`~phrasefusion.compat.SimilarityMatrix`.
        cfg: budget, sentence cap, short-sentence threshold and mode.
        gamma: same-clause matrix; required for the compressive and
            extractive modes.
        sentence_tokens: ``(doc_id, sent_idx) -> tokens``; used by the
            extractive mode to check that an NP and its VPs are contiguous.
    """
    gamma_tilde = np.asarray(gamma_tilde)
    if gamma_tilde.shape != (len(nps), len(vps)):
        raise IndexMismatch(f"compatibility is {gamma_tilde.shape}, phrases are {len(nps)}x{len(vps)}")
    if sims.r_np.shape != (len(nps),) * 2 or sims.r_vp.shape != (len(vps),) * 2:
        raise IndexMismatch("similarity matrices do not match the phrase lists")
    if cfg.mode != ABSTRACTIVE:
        if gamma is None:
            raise ValueError(f"{cfg.mode} mode needs the same-clause matrix")
        gamma = np.asarray(gamma)
        if gamma.shape != gamma_tilde.shape:
            raise IndexMismatch("gamma and gamma_tilde differ in shape")
        allowed = (gamma > 0) & (gamma_tilde > 0)
    else:
        allowed = gamma_tilde > 0

    if not any(not p.is_pronoun for p in nps) or not any(v.sent_length >= cfg.M for v in vps):
        raise NoCandidates("every NP is a pronoun or every VP comes from a short sentence")

    if cfg.mode == EXTRACTIVE:
        units = _clause_units(nps, vps, sentence_tokens)
        np_keep = sorted(i for i, _ in units)
        vp_keep = sorted(j for _, vj in units for j in vj)
    else:
        units = []
        np_keep = list(range(len(nps)))
        vp_keep = list(range(len(vps)))
    vp_set = set(vp_keep)

    names, coef = [], []
    a = {}
    b = {}
    for i in np_keep:
        a[i] = len(names)
        names.append(f"a{i}")
        coef.append(nps[i].salience)
    for j in vp_keep:
        b[j] = len(names)
        names.append(f"b{j}")
        coef.append(vps[j].salience)
    ap, bp = {}, {}
    for pairs, keep, items, r, prefix in ((ap, np_keep, nps, sims.r_np, "ap"), (bp, vp_keep, vps, sims.r_vp, "bp")):
        for x, i in enumerate(keep):
            for j in keep[x + 1:]:
                if r[i, j] > 0:
                    pairs[i, j] = len(names)
                    names.append(f"{prefix}{i}_{j}")
                    coef.append(-(items[i].salience + items[j].salience) * r[i, j])
    g = {}
    for i in np_keep:
        for j in vp_keep:
            if allowed[i, j]:
                g[i, j] = len(names)
                names.append(f"g{i}_{j}")
                coef.append(0.0)

    rows = []
    for (i, j), k in g.items():
        _row(rows, [(a[i], 1), (k, -1)], ">=", 0, "np_validity")
    for i in np_keep:
        _row(rows, [(g[i, j], 1) for j in vp_keep if (i, j) in g] + [(a[i], -1)], ">=", 0, "np_validity")
    for j in vp_keep:
        _row(rows, [(g[i, j], 1) for i in np_keep if (i, j) in g] + [(b[j], -1)], "=", 0, "vp_legality")
    for keep, items, var in ((np_keep, nps, a), (vp_keep, vps, b)):
        for x, k in enumerate(keep):
            for j in keep[x + 1:]:
                if same_path(items[k], items[j]):
                    _row(rows, [(var[k], 1), (var[j], 1)], "<=", 1, "not_i_within_i")
    for pairs, var, tag in ((ap, a, "np_cooccurrence"), (bp, b, "vp_cooccurrence")):
        for (i, j), k in pairs.items():
            _row(rows, [(k, 1), (var[i], -1)], "<=", 0, tag)
            _row(rows, [(k, 1), (var[j], -1)], "<=", 0, tag)
            _row(rows, [(var[i], 1), (var[j], 1), (k, -1)], "<=", 1, tag)
    _row(rows, [(a[i], 1) for i in np_keep], "<=", cfg.K, "sentence_number")
    for j in vp_keep:
        if vps[j].sent_length < cfg.M:
            _row(rows, [(b[j], 1)], "=", 0, "short_sentence")
    for i in np_keep:
        if nps[i].is_pronoun:
            _row(rows, [(a[i], 1)], "=", 0, "pronoun")
    _row(rows, [(a[i], nps[i].length) for i in np_keep] + [(b[j], vps[j].length) for j in vp_keep],
         "<=", cfg.L, "length")
    for i, vj in units:
        for j in vj:
            if j in vp_set:
                _row(rows, [(a[i], 1), (b[j], -1)], "=", 0, "extractive_tie")

    return IlpProblem(names, np.array(coef, dtype=float), rows,
                      [p.phrase_id for p in nps], [v.phrase_id for v in vps])


def validate_solution(problem: IlpProblem, assignment, tol=1e-9):
    """Check a 0/1 assignment against every constraint.

    Returns ``(ok, report)`` where ``report`` lists ``(row, tag)`` of the
    violated constraints.  Unknown variable names raise
    :class:`UnknownVariable`.
    """
    x = problem.vector(assignment)
    report = []
    bad = [k for k in range(problem.n) if x[k] not in (0, 1)]
    for k in bad:
        report.append((-1, f"non-binary {problem.variables[k]}={x[k]}"))
    for r, con in enumerate(problem.constraints):
        if not con.holds(x, tol):
            report.append((r, con.tag))
    return not report, report


def _num(v) -> str:
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _terms(pairs, names) -> str:
    out = []
    for v, c in pairs:
        out.append(f"{'-' if c < 0 else '+'} {_num(abs(c))} {names[v]}")
    return " ".join(out) if out else "0"


def serialize_problem(problem: IlpProblem) -> str:
    """Text (LP-like) form of a problem; floats are written with ``repr``."""
    names = problem.variables
    lines = [f"# variables {problem.n} constraints {len(problem.constraints)}"]
    for k, pid in enumerate(problem.np_ids):
        lines.append(f"# np {k} {pid}")
    for k, pid in enumerate(problem.vp_ids):
        lines.append(f"# vp {k} {pid}")
    obj = [(k, c) for k, c in enumerate(problem.objective) if c != 0]
    lines.append("max: " + _terms(obj, names))
    lines.append("subject to")
    for r, con in enumerate(problem.constraints):
        lines.append(f"c{r}: {_terms(con.terms, names)} {con.sense} {_num(con.rhs)} # {con.tag}")
    lines.append("binary")
    lines.extend(names)
    lines.append("end")
    return "\n".join(lines) + "\n"


_TERM_RE = re.compile(r"([+-])\s*(\S+)\s+(\S+)")


def _parse_terms(text, index):
    text = text.strip()
    if text == "0":
        return []
    out = []
    pos = 0
    for m in _TERM_RE.finditer(text):
        if text[pos:m.start()].strip():
            raise ValueError(f"cannot parse terms near {text[pos:m.start()]!r}")
        sign, coef, name = m.groups()
        if name not in index:
            raise UnknownVariable(name)
        out.append((index[name], (-1 if sign == "-" else 1) * float(coef)))
        pos = m.end()
    if text[pos:].strip():
        raise ValueError(f"trailing text {text[pos:]!r}")
    return out


def parse_problem(text: str) -> IlpProblem:
    lines = text.splitlines()
    try:
        b = lines.index("binary")
        e = lines.index("end", b)
    except ValueError:
        raise ValueError("problem text lacks a binary section") from None
    names = lines[b + 1:e]
    index = {n: k for k, n in enumerate(names)}
    np_ids, vp_ids = [], []
    objective = np.zeros(len(names))
    constraints = []
    for line in lines[:b]:
        if line.startswith("# np "):
            np_ids.append(line.split(" ", 3)[3])
        elif line.startswith("# vp "):
            vp_ids.append(line.split(" ", 3)[3])
        elif line.startswith("max:"):
            for v, c in _parse_terms(line[4:], index):
                objective[v] += c
        elif re.match(r"c\d+:", line):
            body, _, tag = line.partition(" # ")
            body = body.split(":", 1)[1]
            m = re.fullmatch(r"(.*)\s(<=|>=|=)\s(\S+)", body)
            if not m:
                raise ValueError(f"bad constraint line {line!r}")
            terms = tuple(_parse_terms(m.group(1), index))
            constraints.append(Constraint(terms, m.group(2), float(m.group(3)), tag.strip()))
    return IlpProblem(names, objective, constraints, np_ids, vp_ids)
