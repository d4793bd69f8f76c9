#!/usr/bin/env python3
"""
codim_one.py
Task runner and report renderer for .session files.

CLI:
  python3 codim_one.py run sessions/quadric_threefold.session
  python3 codim_one.py run my.session --format json-lines --max-spairs 50000
  python3 codim_one.py check my.session          # parse and build only
  python3 codim_one.py replay two_chart_k2       # bundled session
  python3 codim_one.py replay --list

Flags: --format text|json-lines, --max-spairs N, --field q|fp:<p>
(advisory prime-field prefilter), --verbose (timing and Groebner
statistics), --jobs N (concurrent tasks, results kept in order),
--config PATH.

Exit status: 0 all tasks reached a verdict, 2 some verdict unknown,
3 inconsistent evidence, 4 computation too large, 1 input error.
When several apply the order of precedence is 1, 4, 3, 2.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import certify
import groebner
import polycore
from certify import (
    LedgerInconsistency, SuperheightLedger, Verdict, WitnessError,
    affine_via_purity, check_affine_certificate, ledger_combine, verify_witness,
)
from groebner import ResourceCapExceeded
from monoid import MonoidError, ToricPresentation, monoid_affine
from polycore import AlgebraToolkitError, CoefficientField
from session import (
    CertificateDecl, SessionError, TaskDecl, WitnessDecl, Workspace,
    build_workspace, load_session,
)
from settings import ConfigError, Settings, audit, configure_audit, setup_logging
from surface import check_criterion

log = logging.getLogger("codim_one.runner")

SESSIONS_DIR = Path(__file__).parent / "sessions"
FORMATS = ("text", "json-lines")

STATUS_EXIT = {"verdict": 0, "unknown": 2, "inconsistent": 3, "resource-cap": 4, "input-error": 1}
EXIT_PRIORITY = (1, 4, 3, 2, 0)

NOTES = {
    "codimension-obstruction": (
        "an affine D(a) has extended ideals of height <= 1 in every noetherian domain "
        "(preimages of affine opens are affine, complements of affine opens have codimension <= 1)"),
    "finite-type-witness": "over a field, finite-type witnesses bound the superheight itself",
}


# =========================
# Report records
# =========================

@dataclass
class TaskResult:
    task: str
    kind: str
    status: str = "unknown"
    verdict: str = ""
    summary: str = ""
    citation: str = ""
    interval: Optional[List[int]] = None
    bounds: List[Dict[str, Any]] = field(default_factory=list)
    evidence: List[Dict[str, Any]] = field(default_factory=list)
    assertions: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    error: str = ""
    timing: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        if self.timing is None:
            data.pop("timing")
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TaskResult":
        return cls(**data)


@dataclass
class Report:
    results: List[TaskResult] = field(default_factory=list)
    stats: Optional[Dict[str, int]] = None

    @property
    def exit_code(self) -> int:
        codes = {STATUS_EXIT[r.status] for r in self.results}
        return next((c for c in EXIT_PRIORITY if c in codes), 0)

    def to_json_lines(self) -> str:
        lines = [json.dumps(r.to_dict(), ensure_ascii=False) for r in self.results]
        if self.stats is not None:
            lines.append(json.dumps({"stats": self.stats}))
        return "".join(line + "\n" for line in lines)

    @classmethod
    def from_json_lines(cls, text: str) -> "Report":
        report = cls()
        for line in text.splitlines():
            if not line.strip():
                continue
            data = json.loads(line)
            if set(data) == {"stats"}:
                report.stats = data["stats"]
            else:
                report.results.append(TaskResult.from_dict(data))
        return report


def _render_text(report: Report) -> str:
    out: List[str] = []
    for r in report.results:
        out.append(f"== task {r.task} ==")
        out.append(f"status: {r.status}")
        if r.summary:
            out.append(r.summary + (f"  [{r.citation}]" if r.citation else ""))
        for b in r.bounds:
            out.append(f"  {b['role']} bound {b['value']}  [{b['tag']}: {b['source']}]")
        for ev in r.evidence:
            mark = "verified" if ev["ok"] else "REJECTED"
            out.append(f"  evidence {ev['name']} ({ev['kind']}): {mark}; {ev['detail']}")
        for a in r.assertions:
            out.append(f"  assumed: {a}")
        for n in r.notes:
            out.append(f"  note: {n}")
        if r.error:
            out.append(f"  error: {r.error}")
        if r.timing is not None:
            out.append(f"  time: {r.timing:.3f}s")
        out.append("")
    if report.stats is not None:
        out.append("groebner: " + ", ".join(f"{k}={v}" for k, v in report.stats.items()))
        out.append("")
    return "\n".join(out)


def render_report(report: Report, fmt: str = "text") -> str:
    if fmt == "text":
        return _render_text(report)
    if fmt == "json-lines":
        return report.to_json_lines()
    raise ValueError(f"unknown format {fmt!r} (choose from {', '.join(FORMATS)})")


# =========================
# Tasks
# =========================

ASSERTION_PHRASES = {"domain": "a domain", "factorial": "factorial", "zero": "the zero ring"}


def _algebra_assertions(A) -> List[str]:
    return [f"{A.label} is {ASSERTION_PHRASES[k]}" for k, on in A.assertions().items() if on]


def _fill_from_ledger(result: TaskResult, ledger: SuperheightLedger, ideal: str) -> None:
    result.verdict = ledger.verdict.value
    result.status = "verdict" if ledger.verdict is not Verdict.UNKNOWN else "unknown"
    result.summary = ledger.summary(ideal)
    if ledger.verdict_tag:
        result.citation = f"{ledger.verdict_tag}: {ledger.verdict_source}"
    result.interval = list(ledger.interval)
    for role, bounds in (("lower", ledger.lower_candidates), ("upper", ledger.upper_candidates)):
        for b in bounds:
            result.bounds.append({"role": role, **b.to_dict()})
    height = ledger.lower_candidates[0].value
    result.notes.insert(0, f"ht({ideal}) = {height}")
    result.notes.extend(ledger.notes)
    if ledger.verdict_tag == "codimension-obstruction":
        result.notes.append(NOTES["codimension-obstruction"])
    if any(b.tag == "finite-type-witness" for b in ledger.lower_candidates):
        result.notes.append(NOTES["finite-type-witness"])
    if ledger.sections_finitely_generated:
        result.assertions.append("global sections on D(a) are finitely generated")


def _run_ledger(ws: Workspace, task: TaskDecl, result: TaskResult) -> None:
    a = ws.get(task.target)
    A = a.algebra
    result.assertions.extend(_algebra_assertions(A))
    evidence = []
    for name in task.refs:
        decl = ws.decl(name)
        if isinstance(decl, WitnessDecl):
            w = ws.get(name)
            try:
                wr = verify_witness(A, a, w)
            except WitnessError as e:
                log.warning("%s", e)
                result.evidence.append({"name": name, "kind": "witness", "ok": False, "detail": str(e)})
                continue
            detail = f"extended ideal {wr.extended.gens} has height {wr.height}"
            if wr.unit_extension:
                detail += " (unit ideal)"
            result.evidence.append({"name": name, "kind": "witness", "ok": True, "detail": detail})
            result.assertions.extend(_algebra_assertions(w.phi.target))
            evidence.append(wr)
        elif isinstance(decl, CertificateDecl):
            if decl.ideal != task.target:
                msg = f"certificate {name} is for {decl.ideal}, not {task.target}"
                log.warning("%s", msg)
                result.evidence.append({"name": name, "kind": "certificate", "ok": False, "detail": msg})
                continue
            chk = check_affine_certificate(A, a, ws.get(name))
            detail = "; ".join(str(f) for f in chk.failures) or "cover, compatibility and unity verified"
            result.evidence.append({"name": name, "kind": "certificate", "ok": chk.ok, "detail": detail})
            if chk.ok:
                evidence.append(chk)
    ledger = ledger_combine(A, a, evidence, "sections-fg" in task.flags)
    _fill_from_ledger(result, ledger, task.target)


def _decision_evidence(result: TaskResult, decision) -> None:
    result.evidence.append({
        "name": decision.name, "kind": decision.tag, "ok": True,
        "detail": f"{decision.verdict.value}: {decision.detail}",
    })


def _run_purity(ws: Workspace, task: TaskDecl, result: TaskResult) -> None:
    a = ws.get(task.target)
    nor = ws.get(task.refs[0])
    result.assertions.extend(_algebra_assertions(a.algebra) + _algebra_assertions(nor.target))
    decision = affine_via_purity(a.algebra, nor, a, name=task.refs[0])
    _decision_evidence(result, decision)
    if a.algebra.is_domain:
        _fill_from_ledger(result, ledger_combine(a.algebra, a, [decision]), task.target)
    else:
        result.verdict = decision.verdict.value
        result.status = "verdict" if decision.verdict is not Verdict.UNKNOWN else "unknown"
        result.summary = f"D({task.target}) {decision.verdict.headline}"
        result.citation = f"purity-test: {decision.name}"


def _run_monoid(ws: Workspace, task: TaskDecl, result: TaskResult) -> None:
    a = ws.get(task.target)
    toric_name = ws.decl(task.target).algebra
    toric = ws.get(toric_name)
    if not isinstance(toric, ToricPresentation):
        raise MonoidError(f"ideal {task.target} does not live in a toric algebra")
    emb_decl = ws.decl(task.refs[0])
    if emb_decl.monoid != ws.decl(toric_name).monoid:
        raise MonoidError(f"embedding {emb_decl.name} is for {emb_decl.monoid}, "
                          f"not {ws.decl(toric_name).monoid}")
    M, e = toric.monoid, ws.get(task.refs[0])
    result.assertions.append(f"monoid {M.name} is normal" if M.normal else f"monoid {M.name} is not asserted normal")
    if e.intersection_property:
        result.assertions.append(f"embedding {e.name} has the intersection property")
    decision = monoid_affine(M, e, a, toric, name=e.name)
    _decision_evidence(result, decision)
    _fill_from_ledger(result, ledger_combine(toric.algebra, a, [decision]), task.target)


def _run_surface(ws: Workspace, task: TaskDecl, result: TaskResult) -> None:
    cfg = ws.get(task.target)
    rep = check_criterion(cfg)
    result.verdict = rep.verdict
    result.status = "verdict" if rep.conclusive else "unknown"
    result.summary = f"{task.target}: {rep.verdict} (relative to supplied test curves)"
    if rep.obstruction:
        result.citation = f"{rep.obstruction}: {task.target}"
    elif rep.superheight_one:
        result.citation = f"surface-criterion: {task.target}"
    result.notes.extend([
        f"H = {rep.h_class}",
        f"H.Y_i = {rep.h_dot_components} ({'ok' if rep.components_ok else 'fails'})",
        f"H.C_j = {rep.h_dot_curves} ({'ok' if rep.curves_ok else 'fails'})",
        f"Y^2 = {rep.y_squared}",
        f"Y {'connected' if rep.connected else 'not connected'}",
    ] + rep.notes)
    if cfg.effective:
        result.assertions.append(f"components of {cfg.name} are effective")
    if cfg.irreducible:
        result.assertions.append(f"components of {cfg.name} are irreducible")


RUNNERS = {
    "ledger": _run_ledger,
    "purity": _run_purity,
    "monoid-affine": _run_monoid,
    "surface": _run_surface,
}


def run_task(ws: Workspace, task: TaskDecl, verbose: bool = False) -> TaskResult:
    result = TaskResult(task.label, task.kind)
    start = time.perf_counter()
    try:
        RUNNERS[task.kind](ws, task, result)
    except LedgerInconsistency as e:
        result.status, result.error = "inconsistent", str(e)
        result.notes.append("conflicting evidence: " + ", ".join(e.evidence))
    except ResourceCapExceeded as e:
        result.status, result.error = "resource-cap", str(e)
    except AlgebraToolkitError as e:
        result.status, result.error = "input-error", str(e)
    if result.error:
        log.warning("task %s: %s", task.label, result.error)
    if verbose:
        result.timing = round(time.perf_counter() - start, 6)
    audit("task", task.label, result.status == "verdict", {"status": result.status, "verdict": result.verdict})
    return result


def run_session(ws: Workspace, jobs: int = 1, verbose: bool = False) -> Report:
    tasks = ws.session.tasks
    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda t: run_task(ws, t, verbose), tasks))
    else:
        results = [run_task(ws, t, verbose) for t in tasks]
    return Report(results, groebner.STATS.snapshot() if verbose else None)


# =========================
# CLI
# =========================

def replay_ids() -> List[str]:
    return sorted(p.stem for p in SESSIONS_DIR.glob("*.session"))


def apply_config(cfg: Settings, args: argparse.Namespace) -> None:
    """Config file, then environment, then flags."""
    advisory = cfg.get("groebner", "advisory_prime")
    if getattr(args, "field", None):
        fld = CoefficientField.parse(args.field)
        advisory = None if fld.is_rational else fld.characteristic
    elif advisory:
        advisory = CoefficientField(int(advisory)).characteristic
    cfg.set("groebner", "max_spairs", getattr(args, "max_spairs", None))
    cfg.set("runner", "jobs", getattr(args, "jobs", None))
    groebner.configure(max_spairs=cfg.get("groebner", "max_spairs"), advisory_prime=advisory)
    certify.configure(saturation_bound=cfg.get("certify", "saturation_bound"))
    polycore.set_debug_validation(bool(cfg.get("debug", "validate_terms")))
    configure_audit(cfg.get("logging", "audit_file"), bool(cfg.get("logging", "include_timestamps")))


def _session_path(args: argparse.Namespace) -> Path:
    if args.command == "replay":
        if args.example not in replay_ids():
            raise SessionError(f"unknown example {args.example!r}; available: {', '.join(replay_ids())}")
        return SESSIONS_DIR / f"{args.example}.session"
    return Path(args.session)


def main(argv: Optional[List[str]] = None) -> int:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", default="text", help="text or json-lines")
    common.add_argument("--max-spairs", type=int, default=None, help="S-pair reduction cap")
    common.add_argument("--field", default=None, help="q or fp:<prime> (advisory prefilter)")
    common.add_argument("--verbose", action="store_true", help="timing and Groebner statistics")
    common.add_argument("--jobs", type=int, default=None, help="run tasks concurrently")
    common.add_argument("--config", default=None, help="YAML config file")

    ap = argparse.ArgumentParser(prog="codim-one", description="Superheight and affineness of D(a)")
    sub = ap.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", parents=[common], help="run every task of a session")
    p_run.add_argument("session")
    p_check = sub.add_parser("check", parents=[common], help="parse and build a session only")
    p_check.add_argument("session")
    p_replay = sub.add_parser("replay", parents=[common], help="run a bundled example session")
    p_replay.add_argument("example", nargs="?")
    p_replay.add_argument("--list", action="store_true", help="list bundled examples")
    args = ap.parse_args(argv)

    if args.command == "replay" and (args.list or not args.example):
        print("\n".join(replay_ids()))
        return 0
    if args.format not in FORMATS:
        print(f"error: unknown format {args.format!r} (choose from {', '.join(FORMATS)})", file=sys.stderr)
        return 1

    try:
        cfg = Settings(args.config)
        setup_logging(cfg.get("logging", "log_level"), args.verbose)
        apply_config(cfg, args)
        groebner.STATS.reset()
        ws = build_workspace(load_session(_session_path(args)))
    except ResourceCapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except (AlgebraToolkitError, ConfigError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    if args.command == "check":
        print(f"ok: {len(ws.session.declarations)} declarations, {len(ws.session.tasks)} tasks")
        return 0

    jobs = int(cfg.get("runner", "jobs") or 1)
    report = run_session(ws, jobs, args.verbose)
    sys.stdout.write(render_report(report, args.format))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
