"""Registry of harness tasks, one per CLI subcommand."""
from __future__ import annotations

import math
from typing import Any, Dict, List, Optional, Sequence

from . import goldbach as gb
from . import least_prime as lp
from . import linear as ls
from . import sieve
from .harness import ReportRecord, Task, ValidationError, register

Params = Dict[str, Any]


def _req(params: Params, name: str) -> Any:
    v = params.get(name)
    if v is None:
        raise ValidationError(f"--{name} is required")
    return v


def _span(params: Params, lo_min: int, alias: str = "n") -> range:
    lo, hi = params.get("from"), params.get("to")
    if lo is None and hi is None and params.get(alias) is not None:
        lo = hi = params[alias]
    if lo is None:
        lo = lo_min
    if hi is None:
        raise ValidationError("--to is required")
    if lo < lo_min:
        raise ValidationError(f"--from must be >= {lo_min}")
    if lo > hi:
        raise ValidationError("--from must not exceed --to")
    return range(lo, hi + 1)


def _cls(params: Params, required: bool = False) -> lp.APClass:
    k, l = params.get("k"), params.get("l")
    if k is None and l is None and not required:
        return lp.UNCONSTRAINED
    if k is None or l is None:
        raise ValidationError("--k and --l go together")
    try:
        return lp.APClass(k, l)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def _one(key: int, verdict: str, **payload) -> List[ReportRecord]:
    return [ReportRecord(key, verdict, payload)]


# ---------------------------------------------------------------------------
# least primes
# ---------------------------------------------------------------------------

def _least_prime(key: int, p: Params) -> List[ReportRecord]:
    cls = _cls(p, required=True)
    try:
        r = lp.least_prime_in_ap(cls, p.get("bound"))
    except lp.NotFoundWithinBound as exc:
        return _one(key, "undecided", l=cls.l, prime=None, candidates_tested=None,
                    bound_used=exc.bound)
    return _one(key, "ok", l=cls.l, prime=r.prime, candidates_tested=r.candidates_tested,
                bound_used=r.bound_used)


def _least_prime_keys(p: Params) -> Sequence[int]:
    cls = _cls(p, required=True)
    b = p.get("bound")
    if b is not None and b < 2:
        raise ValidationError("--bound must be >= 2")
    return [cls.k]


register(Task("least-prime", "k", ("l", "prime", "candidates_tested", "bound_used", "verdict"),
              ("k", "l", "bound"), _least_prime_keys, _least_prime))


def _pk(key: int, p: Params) -> List[ReportRecord]:
    try:
        r = lp.p_max(key, p.get("bound"))
    except (lp.NotFoundWithinBound, sieve.RangeTooLarge) as exc:
        return _one(key, "undecided", p_k=None, achieving_l=None,
                    bound_used=getattr(exc, "bound", None))
    return _one(key, "ok", p_k=r.p_k, achieving_l=r.l, bound_used=r.bound_used)


def _kanold(key: int, p: Params) -> List[ReportRecord]:
    r = lp.kanold_record(key)
    return _one(key, r.verdict, p_k=r.p_k, achieving_l=r.l, bound_used=r.bound_used)


def _chowla(key: int, p: Params) -> List[ReportRecord]:
    r = lp.kanold_record(key)
    if r.p_k is None:
        return _one(key, "undecided", p_k=None, exponent=None)
    return _one(key, "ok", p_k=r.p_k, exponent=lp.chowla_exponent(key, r.p_k))


def _kanold_summary(rows) -> str:
    bad = [r for r in rows if r.get("verdict") == "violation"]
    lines = [f"checked {len(rows)} moduli, {len(bad)} violations of p(k) < k^2"]
    lines += [f"violation: k={r['k']} l={r['achieving_l']} p={r['p_k']}" for r in bad]
    return "\n".join(lines)


def _chowla_summary(rows) -> str:
    vals = [(float(r["exponent"]), int(r["k"]), int(r["p_k"])) for r in rows
            if r.get("exponent") not in (None, "")]
    if not vals:
        return ""
    e, k, pk = max(vals, key=lambda t: (t[0], -t[1]))
    return f"max exponent {e:.6f} at k={k} (p(k)={pk})"


register(Task("pk-scan", "k", ("p_k", "achieving_l", "bound_used", "verdict"),
              ("from", "to", "bound"), lambda p: _span(p, 2, "k"), _pk))
register(Task("kanold-scan", "k", ("p_k", "achieving_l", "bound_used", "verdict"),
              ("from", "to"), lambda p: _span(p, 2, "k"), _kanold, _kanold_summary))
register(Task("chowla-scan", "k", ("p_k", "exponent"),
              ("from", "to"), lambda p: _span(p, 2, "k"), _chowla, _chowla_summary))


def _qm(key: int, p: Params) -> List[ReportRecord]:
    cls = _cls(p)
    q = lp.least_coprime_prime(key) if not cls.constrained else \
        lp.least_ap_coprime_prime(cls, key)
    return _one(key, "ok", k=cls.k, l=cls.l, q=q)


register(Task("qm", "m", ("k", "l", "q", "verdict"), ("from", "to", "m", "k", "l"),
              lambda p: (_cls(p), _span(p, 1, "m"))[1], _qm))


# ---------------------------------------------------------------------------
# threshold constants
# ---------------------------------------------------------------------------

def _threshold_keys(p: Params) -> Sequence[int]:
    e = _req(p, "exponent")
    if e < 1:
        raise ValidationError("--exponent must be >= 1")
    _cls(p)
    return [e]


def _lemma2(key: int, p: Params) -> List[ReportRecord]:
    bound = _req(p, "bound")
    r = lp.lemma2_min_constant(key, bound)
    verdict = "ok" if r.empirical_constant <= bound else "undecided"
    return _one(key, verdict, empirical_constant=r.empirical_constant, scan_bound=bound,
                violations=r.violations, constructive_bound=r.constructive_bound)


def _lemma2_keys(p: Params) -> Sequence[int]:
    if _req(p, "bound") < 2:
        raise ValidationError("--bound must be >= 2")
    return _threshold_keys(p)


register(Task("lemma2-scan", "k_exp",
              ("empirical_constant", "scan_bound", "violations", "constructive_bound", "verdict"),
              ("exponent", "bound"), _lemma2_keys, _lemma2))


def _posa(key: int, p: Params) -> List[ReportRecord]:
    cls = _cls(p)
    bound = _req(p, "bound")
    t = lp.posa_threshold(key, cls, bound)
    return _one(key, "ok" if t <= bound else "undecided", k=cls.k, l=cls.l,
                threshold=t, n_bound=bound)


def _posa_keys(p: Params) -> Sequence[int]:
    if _req(p, "bound") < 2:
        raise ValidationError("--bound must be >= 2")
    return _threshold_keys(p)


register(Task("posa", "k_exp", ("k", "l", "threshold", "n_bound", "verdict"),
              ("exponent", "bound", "k", "l"), _posa_keys, _posa))


def _qpow(key: int, p: Params) -> List[ReportRecord]:
    cls = _cls(p)
    bound = _req(p, "bound")
    r = lp.qpow_threshold_scan(key, p.get("alpha"), p.get("epsilon"), cls, bound)
    verdict = "ok" if r.empirical_constant <= bound else "undecided"
    return _one(key, verdict, alpha=r.params["alpha"], epsilon=p.get("epsilon"), k=cls.k,
                l=cls.l, empirical_constant=r.empirical_constant, scan_bound=bound,
                violation_count=len(r.violations), violations=r.violations)


def _qpow_keys(p: Params) -> Sequence[int]:
    if _req(p, "bound") < 4:
        raise ValidationError("--bound must be >= 4")
    eps = p.get("epsilon")
    if eps is not None and not 0 < eps < 0.5:
        raise ValidationError("--epsilon must lie in (0, 0.5)")
    if p.get("alpha") is None and eps is None:
        raise ValidationError("--alpha is required without --epsilon")
    return _threshold_keys(p)


register(Task("qpow-scan", "k_exp",
              ("alpha", "epsilon", "k", "l", "empirical_constant", "scan_bound",
               "violation_count", "violations", "verdict"),
              ("exponent", "alpha", "epsilon", "bound", "k", "l"), _qpow_keys, _qpow))


# ---------------------------------------------------------------------------
# Euclid generator and coprime existence
# ---------------------------------------------------------------------------

def _euclid(key: int, p: Params) -> List[ReportRecord]:
    seq = lp.euclid_generate(key)
    ref = sieve.first_primes(key).tolist()
    return [ReportRecord(i, "ok" if v == r else "violation", {"prime": v})
            for i, (v, r) in enumerate(zip(seq, ref), start=1)]


def _euclid_keys(p: Params) -> Sequence[int]:
    c = _req(p, "count")
    if c < 1:
        raise ValidationError("--count must be >= 1")
    return [c]


register(Task("euclid-gen", "index", ("prime", "verdict"), ("count",), _euclid_keys, _euclid))


def _coprime(key: int, p: Params) -> List[ReportRecord]:
    r = lp.coprime_record(key)
    return _one(key, r.verdict, witness=r.witness, construction=r.construction)


register(Task("coprime-scan", "a", ("witness", "construction", "verdict"), ("from", "to"),
              lambda p: _span(p, 3, "a"), _coprime))


# ---------------------------------------------------------------------------
# Goldbach family
# ---------------------------------------------------------------------------

def _goldbach(key: int, p: Params) -> List[ReportRecord]:
    mode = "all" if p.get("all") else "first"
    try:
        ws = gb.goldbach_decompositions(key, mode)
    except gb.NoneFound:
        return _one(key, "violation", p=None, q=None)
    return [ReportRecord(key, "witness", {"p": w.p, "q": w.q}) for w in ws]


def _goldbach_keys(p: Params) -> Sequence[int]:
    t = _req(p, "target")
    if t % 2 or t < 8:
        raise ValidationError("--target must be even and >= 8")
    return [t]


register(Task("goldbach", "target", ("p", "q", "verdict"), ("target", "all"),
              _goldbach_keys, _goldbach))


def _ap_target(p: Params) -> int:
    cls = _cls(p, required=True)
    t, w = p.get("target"), p.get("w")
    if (t is None) == (w is None):
        raise ValidationError("give exactly one of --target or --w")
    if t is None:
        if w < 0:
            raise ValidationError("--w must be >= 0")
        t = 2 * (cls.k * w + cls.l)
    if t % 2 or not cls.contains(t // 2):
        raise ValidationError(f"target/2 must be {cls}")
    return t


def _ap_goldbach(key: int, p: Params) -> List[ReportRecord]:
    cls = _cls(p, required=True)
    mode = "all" if p.get("all") else "first"
    try:
        ws = gb.ap_goldbach_for_target(cls, key, mode)
    except gb.NoneFound:
        return _one(key, "violation", k=cls.k, l=cls.l, p=None, q=None)
    return [ReportRecord(key, "witness", {"k": cls.k, "l": cls.l, "p": w.p, "q": w.q})
            for w in ws]


register(Task("ap-goldbach", "target", ("k", "l", "p", "q", "verdict"),
              ("k", "l", "target", "w", "all"), lambda p: [_ap_target(p)], _ap_goldbach))


def _conj2(key: int, p: Params) -> List[ReportRecord]:
    r = gb.conj2_record(key)
    w = r.witness
    if w is None:
        return _one(key, "violation", p_r=None, difference=None, fast_path=None)
    return _one(key, "witness", p_r=w.p_r, difference=w.difference, fast_path=w.fast_path)


def _conj2_summary(rows) -> str:
    wit = [r for r in rows if r.get("verdict") == "witness"]
    fast = sum(1 for r in wit if r.get("fast_path") in (True, "true"))
    rate = fast / len(wit) if wit else 0.0
    bad = len(rows) - len(wit)
    return f"{len(wit)} witnesses, {bad} counterexamples, fast-path hit rate {rate:.6f}"


_CONJ2_COLS = ("p_r", "difference", "fast_path", "verdict")
register(Task("conj2-verify", "n", _CONJ2_COLS, ("n",),
              lambda p: _span({"n": _req(p, "n")}, 7), _conj2))
register(Task("conj2-scan", "n", _CONJ2_COLS, ("from", "to"),
              lambda p: _span(p, 7), _conj2, _conj2_summary))


def _conj3(key: int, p: Params) -> List[ReportRecord]:
    cls = _cls(p, required=True)
    base = {"k": cls.k, "l": cls.l}
    try:
        w = gb.conjecture3_witness(cls, key)
    except gb.DegenerateInput:
        return _one(key, "undecided", **base)
    except gb.NoneFound:
        return _one(key, "violation", **base)
    return _one(key, "witness", **base, q_r=w.q_r, index=w.index, difference=w.difference,
                fast_path=w.fast_path)


def _conj3_keys(p: Params) -> Sequence[int]:
    cls = _cls(p, required=True)
    if not cls.constrained:
        raise ValidationError("--k must be >= 2")
    return _span(p, 0)


register(Task("conj3-verify", "n", ("k", "l", "q_r", "index", "difference", "fast_path", "verdict"),
              ("k", "l", "n", "from", "to"), _conj3_keys, _conj3))


def _lemma1(key: int, p: Params) -> List[ReportRecord]:
    a, b = gb.lemma1_witness(key)
    return _one(key, "witness", p=a, q=b)


register(Task("lemma1", "n", ("p", "q", "verdict"), ("n", "from", "to"),
              lambda p: _span(p, 7), _lemma1))


def _lemma7(key: int, p: Params) -> List[ReportRecord]:
    cls = _cls(p)
    prime = p["p"]
    value = cls.k * key + cls.l
    if math.gcd(prime, value) != 1:
        return []  # the statement only concerns n with gcd(p, kn+l) = 1
    base = {"k": cls.k, "l": cls.l, "p": prime}
    try:
        a, b = gb.lemma7_witness(cls, prime, key)
    except gb.NoneFound:
        return _one(key, "undecided", **base)
    return _one(key, "witness", **base, p1=a, p2=b)


def _lemma7_keys(p: Params) -> Sequence[int]:
    cls = _cls(p)
    prime = _req(p, "p")
    if prime % 2 == 0 or not sieve.is_prime(prime):
        raise ValidationError("--p must be an odd prime")
    if math.gcd(prime, cls.k) != 1:
        raise ValidationError("gcd(p, k) must be 1")
    return _span(p, 1)


register(Task("lemma7", "n", ("k", "l", "p", "p1", "p2", "verdict"),
              ("k", "l", "p", "n", "from", "to"), _lemma7_keys, _lemma7))


def _bertrand(key: int, p: Params) -> List[ReportRecord]:
    cls = _cls(p, required=True)
    r = gb.bertrand_records(cls, key, key)[0]
    return _one(key, r.verdict, g=r.g, prime=r.prime)


def _bertrand_keys(p: Params) -> Sequence[int]:
    if not _cls(p, required=True).constrained:
        raise ValidationError("--k must be >= 2")
    return _span(p, 0, "x")


register(Task("bertrand-ap", "x", ("g", "prime", "verdict"), ("k", "l", "from", "to"),
              _bertrand_keys, _bertrand))


# ---------------------------------------------------------------------------
# linear systems
# ---------------------------------------------------------------------------

def _matrix(key: int, p: Params) -> List[ReportRecord]:
    r = ls.matrix_prime_check(key)
    return _one(key, "ok" if r.all_ok else "violation", phi=len(r.rows_ok),
                rows_ok=all(r.rows_ok), cols_ok=all(r.cols_ok),
                row_witnesses=r.row_witnesses, col_witnesses=r.col_witnesses)


register(Task("matrix-check", "n",
              ("phi", "rows_ok", "cols_ok", "row_witnesses", "col_witnesses", "verdict"),
              ("n", "from", "to"), lambda p: _span(p, 2), _matrix))


def _system(p: Params) -> ls.LinearSystem:
    try:
        return ls.LinearSystem.parse(_req(p, "forms"))
    except ValueError as exc:
        raise ValidationError(f"bad --forms: {exc}") from exc


def _admissible(key: int, p: Params) -> List[ReportRecord]:
    s = _system(p)
    v = ls.admissible_check(s)
    return _one(key, "ok", forms=str(s), admissible=v.admissible,
                blocking_prime=v.blocking_prime, cause=v.cause)


register(Task("admissible", "id", ("forms", "admissible", "blocking_prime", "cause", "verdict"),
              ("forms",), lambda p: (_system(p), [0])[1], _admissible))


def _prime_map(key: int, p: Params) -> List[ReportRecord]:
    s = _system(p)
    return _one(key, "ok", forms=str(s), values=[f(1) for f in s.forms],
                standard=ls.standard_prime_map_check(s))


register(Task("prime-map-check", "id", ("forms", "values", "standard", "verdict"),
              ("forms",), lambda p: (_system(p), [0])[1], _prime_map))


def _f1f2(key: int, p: Params) -> List[ReportRecord]:
    width = p.get("width") or ls.F1F2_WIDTH
    phi = sieve.totient(key)
    if phi > width:
        return []
    perm = ls.f1f2_search(key, width)
    if perm is None:
        return _one(key, "violation", phi=phi, permutation=None)
    return _one(key, "ok", phi=phi, permutation=list(perm))


def _f1f2_keys(p: Params) -> Sequence[int]:
    keys = _span(p, 2)
    width = p.get("width") or ls.F1F2_WIDTH
    if len(keys) == 1 and sieve.totient(keys[0]) > width:
        raise ValidationError(f"phi({keys[0]}) exceeds search width {width}")
    return keys


register(Task("f1f2-search", "n", ("phi", "permutation", "verdict"),
              ("n", "from", "to", "width"), _f1f2_keys, _f1f2))


def _conj4(key: int, p: Params) -> List[ReportRecord]:
    k, l, eps = p["k"], p["l"], p["epsilon"]
    if math.gcd(key, k) != 1:
        return []
    base = {"k": k, "l": l}
    if p.get("a") is not None:
        r = ls.conjecture4_least_prime(k, l, key, p["a"], eps)
        return _one(key, r.verdict, **base, a=r.a, q=r.q, bound=r.bound,
                    within_bound=r.within_bound)
    s = ls.conjecture4_sweep(k, l, key, eps)
    return _one(key, s.verdict, **base, a=s.worst_a, q=s.worst_q, bound=s.bound,
                within_bound=s.verdict == "ok")


def _conj4_keys(p: Params) -> Sequence[int]:
    cls = _cls(p, required=True)
    if not cls.constrained:
        raise ValidationError("--k must be >= 2")
    eps = _req(p, "epsilon")
    if not 0 < eps < 0.5:
        raise ValidationError("--epsilon must lie in (0, 0.5)")
    keys = _span(p, 2, "d")
    a = p.get("a")
    if a is not None:
        if len(keys) != 1:
            raise ValidationError("--a needs a single --d")
        d = keys[0]
        if math.gcd(d, cls.k) != 1:
            raise ValidationError(f"gcd(d, k) = gcd({d}, {cls.k}) != 1")
        if not 1 <= a < d or math.gcd(a, d) != 1:
            raise ValidationError("need 1 <= a < d with gcd(a, d) = 1")
    return keys


register(Task("conj4-check", "d", ("k", "l", "a", "q", "bound", "within_bound", "verdict"),
              ("k", "l", "d", "a", "epsilon", "from", "to"), _conj4_keys, _conj4))
