"""Verification harness: bound, identity, subadditivity and ladder checks, batch runs.

Reports are plain dicts serialized with sorted keys.  Wall-clock data lives
only under the ``"timing"`` key so that reports are otherwise reproducible
byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .certificates import DEFAULT_CAPS, Caps, CertifiedValue, Status, is_decided, weakest
from .cohomology import hsl_local_cohomology, hsl_relative_h0, hsl_ring, hsl_top
from .errors import FrobtestError, SamplingExhausted
from .frobenius import frobenius_closure, frobenius_test_exponent
from .groebner import Ideal
from .parameters import default_sop, sample_parameter_ideals
from .rings import BUILTIN_RINGS, PresentedRing, load_ring

HOLDS, VIOLATED, UNDECIDED = "HOLDS", "VIOLATED", "UNDECIDED"

SUMMARY_COLUMNS = ("label", "p", "d", "hsl_per_degree", "bound", "max_sampled_fte",
                   "bound_verdict", "properties_verdict", "status")


def _verdict(ok, reason: str = "", **extra) -> dict:
    if ok is None:
        out = {"verdict": UNDECIDED}
    else:
        out = {"verdict": HOLDS if ok else VIOLATED}
    if reason:
        out["reason"] = reason
    out.update(extra)
    return out


def _undecided_reason(*values: CertifiedValue) -> str:
    for v in values:
        if not is_decided(v.status):
            return f"{v.status}({v.cap})" if v.cap else str(v.status)
    return ""


def combine(verdicts) -> str:
    verdicts = [v["verdict"] if isinstance(v, dict) else v for v in verdicts]
    if VIOLATED in verdicts:
        return VIOLATED
    if UNDECIDED in verdicts:
        return UNDECIDED
    return HOLDS


def _sample(R: PresentedRing, count: int, degree: int, seed: int, caps: Caps):
    """Sample, raising the degree when low degrees hold too few parameter systems."""
    last = None
    for deg in range(degree, degree + 4):
        try:
            return sample_parameter_ideals(R, count, deg, seed, caps), deg
        except SamplingExhausted as exc:
            last = exc
    raise last


def _ring_header(R: PresentedRing, caps: Caps) -> dict:
    return {"label": R.label, "ring": R.to_ringfile(), "p": R.p, "d": R.dim(caps),
            "caps": caps.to_dict()}


def ring_bound(R: PresentedRing, caps: Caps = DEFAULT_CAPS):
    sop = default_sop(R, caps)
    return sop, hsl_ring(R, list(sop.elements), caps)


def cmd_verify_bound(R: PresentedRing, samples: int = 5, seed: int = 0,
                     caps: Caps = DEFAULT_CAPS, degree: int = 2) -> dict:
    """``Fte(q) ≤ Σ_k C(d,k) HSL(H^k_m(R))`` over sampled parameter ideals."""
    start = time.perf_counter()
    report = _ring_header(R, caps)
    report["command"] = "verify-bound"
    sop, ring_hsl = ring_bound(R, caps)
    bound = ring_hsl.bound
    report["sop"] = [str(x) for x in sop.elements]
    report["hsl"] = ring_hsl.to_dict()
    rows = []
    try:
        seqs, used = _sample(R, samples, degree, seed, caps)
        report["sample_degree"] = used
    except FrobtestError as exc:
        seqs = []
        report["sampling_error"] = str(exc)
    for seq in seqs:
        q = seq.ideal()
        closure = frobenius_closure(q, R, caps)
        fte = closure.fte
        row = {"ideal": [str(x) for x in seq.elements], "fte": fte.to_dict(),
               "witnesses": [w.to_dict() for w in closure.witnesses]}
        reason = _undecided_reason(fte, bound)
        if reason:
            row.update(_verdict(None, reason))
        else:
            ok = fte.value <= bound.value
            row.update(_verdict(ok, "" if ok else f"Fte = {fte.value} exceeds bound {bound.value}"))
            if not ok:
                row["witness"] = {"ring": R.label, "ideal": row["ideal"], "exponent": fte.value,
                                  "membership": row["witnesses"]}
        rows.append(row)
    report["samples"] = rows
    verdicts = [r["verdict"] for r in rows]
    report["counts"] = {v: verdicts.count(v) for v in (HOLDS, VIOLATED, UNDECIDED)}
    if "sampling_error" in report:
        verdicts.append(UNDECIDED)
    report["verdict"] = combine(verdicts) if rows else UNDECIDED
    ftes = [r["fte"]["value"] for r in rows if r["fte"]["value"] is not None]
    report["max_sampled_fte"] = max(ftes) if ftes else None
    report["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    return report


def identity_check(R: PresentedRing, q: Ideal, caps: Caps = DEFAULT_CAPS,
                   fte: CertifiedValue | None = None) -> dict:
    """``Fte(q) = HSL_R(H^0_m(R/q))`` computed along two independent routes."""
    fte = fte or frobenius_test_exponent(q, R, caps)
    h = hsl_relative_h0(R, q, caps, check=False).value
    reason = _undecided_reason(fte, h)
    out = {"fte": fte.value, "hsl_r_h0": h.value}
    if reason:
        return _verdict(None, reason, **out)
    ok = fte.value == h.value
    return _verdict(ok, "" if ok else "routes disagree", **out)


def subadditivity_check(R: PresentedRing, q: Ideal, e: int, caps: Caps = DEFAULT_CAPS,
                        fte: CertifiedValue | None = None) -> dict:
    """``Fte(q) ≤ Fte(q^[p^e]) + e``."""
    fte = fte or frobenius_test_exponent(q, R, caps)
    if not is_decided(fte.status):
        return _verdict(None, _undecided_reason(fte), e=e)
    if fte.value <= e:
        # the right-hand side is at least e; computed anyway when affordable
        rhs = _bounded_fte(R, q, e, caps)
        extra = {"e": e, "lhs": fte.value, "rhs_fte": rhs.value, "rhs_status": str(rhs.status)}
        if is_decided(rhs.status):
            return _verdict(fte.value <= rhs.value + e, **extra)
        return _verdict(True, "Fte(q) <= e", **extra)
    rhs = frobenius_test_exponent(q.frobenius_power(e), R, caps)
    extra = {"e": e, "lhs": fte.value, "rhs_fte": rhs.value, "rhs_status": str(rhs.status)}
    if not is_decided(rhs.status):
        return _verdict(None, _undecided_reason(rhs), **extra)
    return _verdict(fte.value <= rhs.value + e, **extra)


# Fte(q^[p^e]) needs Frobenius powers up to p^(e + window + 1); for large p
# that is out of reach, and the trivial case does not need it
_RHS_POWER_LIMIT = 64


def _bounded_fte(R: PresentedRing, q: Ideal, e: int, caps: Caps) -> CertifiedValue:
    if R.p ** (e + caps.window + 1) > _RHS_POWER_LIMIT:
        return CertifiedValue(None, Status.TRUNCATED, "rhs_power")
    return frobenius_test_exponent(q.frobenius_power(e), R, caps)


def _hsl_h1(R: PresentedRing, x: list, i: int, caps: Caps) -> CertifiedValue:
    """``HSL_R(H^1_m(R/q_(i-1)))``."""
    K = Ideal(R.ambient, x[:i - 1])
    rest = x[i - 1:]
    if len(rest) == 1:
        return hsl_top(R, rest, caps, K).value
    return hsl_local_cohomology(R, rest, 1, caps, K).value


def ladder_check(R: PresentedRing, x: list, i: int, caps: Caps = DEFAULT_CAPS) -> dict:
    """``HSL_R(H^0(R/q_i)) ≤ HSL_R(H^0(R/q_(i-1)^[p^e1])) + e1``, ``e1 = HSL_R(H^1(R/q_(i-1)))``."""
    try:
        lhs = hsl_relative_h0(R, Ideal(R.ambient, x[:i]), caps, check=False).value
        e1 = _hsl_h1(R, x, i, caps)
        if not is_decided(e1.status):
            return _verdict(None, "H^1 snapshot " + _undecided_reason(e1), i=i)
        K = Ideal(R.ambient, x[:i - 1]).frobenius_power(e1.value)
        e0 = hsl_relative_h0(R, K, caps, check=False).value
    except FrobtestError as exc:
        return _verdict(None, f"{type(exc).__name__}: {exc}", i=i)
    extra = {"i": i, "lhs": lhs.value, "e1": e1.value, "e0_prime": e0.value,
             "status": str(weakest(lhs.status, e1.status, e0.status))}
    reason = _undecided_reason(lhs, e0)
    if reason:
        return _verdict(None, reason, **extra)
    return _verdict(lhs.value <= e0.value + e1.value, **extra)


def cmd_verify_properties(R: PresentedRing, samples: int = 3, e_max: int = 2, seed: int = 0,
                          caps: Caps = DEFAULT_CAPS, degree: int = 2) -> dict:
    """Identity, subadditivity (``e = 1..e_max``) and the ``j = 0`` ladder per sample."""
    start = time.perf_counter()
    report = _ring_header(R, caps)
    report["command"] = "verify-properties"
    rows = []
    try:
        seqs, used = _sample(R, samples, degree, seed, caps)
        report["sample_degree"] = used
    except FrobtestError as exc:
        seqs = []
        report["sampling_error"] = str(exc)
    for seq in seqs:
        q = seq.ideal()
        fte = frobenius_test_exponent(q, R, caps)
        x = list(seq.elements)
        claims = {
            "identity": identity_check(R, q, caps, fte),
            "subadditivity": [subadditivity_check(R, q, e, caps, fte) for e in range(1, e_max + 1)],
            "ladder": [ladder_check(R, x, i, caps) for i in range(1, len(x) + 1)],
        }
        rows.append({"ideal": [str(f) for f in x], "fte": fte.to_dict(), "claims": claims})
    report["samples"] = rows
    verdicts = {}
    for name in ("identity", "subadditivity", "ladder"):
        flat = []
        for r in rows:
            c = r["claims"][name]
            flat.extend(c if isinstance(c, list) else [c])
        verdicts[name] = combine(flat) if flat else UNDECIDED
    report["verdicts"] = verdicts
    report["verdict"] = combine(list(verdicts.values()))
    report["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    return report


# -- batch ------------------------------------------------------------------

def builtin_manifest() -> dict:
    return {"rings": [{"ring": f"builtin:{name}"} for name in BUILTIN_RINGS]}


def _resolve_ring(entry, base: Path) -> str:
    ref = entry["ring"] if isinstance(entry, dict) else entry
    if not isinstance(ref, str):
        raise FrobtestError(f"manifest ring entry must be a string, got {ref!r}")
    if ref.startswith("builtin:") or ref in BUILTIN_RINGS:
        return ref
    path = Path(ref)
    return str(path if path.is_absolute() else base / path)


def _run_entry(args) -> dict:
    entry, ref, defaults, caps = args
    opts = dict(defaults)
    if isinstance(entry, dict):
        opts.update({k: v for k, v in entry.items() if k != "ring"})
    tasks = opts.get("tasks", ["verify-bound", "verify-properties"])
    out = {"ring_ref": entry["ring"] if isinstance(entry, dict) else entry, "tasks": {}}
    try:
        R = load_ring(ref)
        out["label"] = R.label
        out["p"] = R.p
        out["d"] = R.dim(caps)
        seed = int(opts.get("seed", 0))
        degree = int(opts.get("degree", 2))
        for task in tasks:
            if task == "verify-bound":
                rep = cmd_verify_bound(R, int(opts.get("samples", 5)), seed, caps, degree)
            elif task == "verify-properties":
                rep = cmd_verify_properties(R, int(opts.get("samples", 3)),
                                            int(opts.get("e_max", 2)), seed, caps, degree)
            else:
                raise FrobtestError(f"unknown batch task {task!r}")
            out["tasks"][task] = rep
        out["status"] = "OK"
    except Exception as exc:  # isolate per-ring failures
        out["status"] = "FAILED"
        out["error"] = f"{type(exc).__name__}: {exc}"
    return out


def _run_job(args) -> dict:
    entry, ref, extra, caps = args
    if ref is None:
        return {"ring_ref": entry["ring"], "tasks": {}, "status": "FAILED", "error": extra}
    return _run_entry(args)


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _atomic_write(path: Path, text: str):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _summary_row(result: dict) -> dict:
    row = dict.fromkeys(SUMMARY_COLUMNS, "")
    row["label"] = result.get("label") or result["ring_ref"]
    row["status"] = result["status"]
    row["p"] = result.get("p", "")
    row["d"] = result.get("d", "")
    bound = result["tasks"].get("verify-bound")
    if bound:
        per = bound["hsl"]["per_degree"]
        row["hsl_per_degree"] = ";".join(str(r["hsl"]["value"]) for r in per)
        row["bound"] = bound["hsl"]["bound"]["value"]
        row["max_sampled_fte"] = bound["max_sampled_fte"]
        row["bound_verdict"] = bound["verdict"]
    props = result["tasks"].get("verify-properties")
    if props:
        row["properties_verdict"] = props["verdict"]
    return {k: "" if v is None else v for k, v in row.items()}


def cmd_batch(manifest, out_dir, jobs: int = 1, caps: Caps = DEFAULT_CAPS) -> tuple:
    """Run a manifest; returns ``(exit_code, results)``.

    ``manifest`` is a path to JSON ``{"rings": [...], "defaults": {...}}`` or
    an already-loaded dict.  Each ring entry is a path (relative to the
    manifest), a built-in name, or an object with ``"ring"`` and overrides.
    """
    if isinstance(manifest, dict):
        data, base = manifest, Path.cwd()
    else:
        try:
            data = json.loads(Path(manifest).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise FrobtestError(f"cannot read manifest {manifest}: {exc}") from exc
        base = Path(manifest).parent
    if isinstance(data, list):
        data = {"rings": data}
    entries = data.get("rings", [])
    defaults = data.get("defaults", {})
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    jobs_args = []
    for entry in entries:
        try:
            jobs_args.append((entry, _resolve_ring(entry, base), defaults, caps))
        except (FrobtestError, KeyError, TypeError) as exc:
            jobs_args.append(({"ring": str(entry)}, None, str(exc), caps))
    if jobs > 1 and len(jobs_args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_job, jobs_args))
    else:
        results = [_run_job(a) for a in jobs_args]

    used = set()
    for n, result in enumerate(results):
        name = result.get("label") or f"ring{n}"
        if name in used:
            name = f"{name}-{n}"
        used.add(name)
        result["report_file"] = f"{name}.json"
        _atomic_write(out / result["report_file"], dumps(result))

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for result in results:
        writer.writerow(_summary_row(result))
    _atomic_write(out / "summary.csv", buf.getvalue())

    if any(r["status"] == "FAILED" for r in results):
        code = 2
    elif any(t.get("verdict") == VIOLATED for r in results for t in r["tasks"].values()):
        code = 1
    else:
        code = 0
    return code, results


def strip_timing(report):
    """Copy of a report without the ``timing`` entries, for reproducibility checks."""
    if isinstance(report, dict):
        return {k: strip_timing(v) for k, v in report.items() if k != "timing"}
    if isinstance(report, list):
        return [strip_timing(v) for v in report]
    return report
