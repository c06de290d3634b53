"""
suite.py – Pinned regression checks
===================================

Checks live in ``paper_suite.yaml`` under the fixture directory. Each entry
has a ``name``, optional ``tags``, a ``kind`` naming its runner below, the
literal inputs the runner parses, and an ``expect`` block. A check passes
when the computed value matches ``expect``; arithmetic errors turn into
failed entries, never into a crashed run.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import pandas as pd
import yaml

from psmodules import ideals
from psmodules.arith import (
    DomainDescriptor,
    Integers,
    associates,
    divisors_up_to_units,
    is_atom,
    is_prime_element,
    mcd,
)
from psmodules.config import PROJECT_ROOT, load_config
from psmodules.constructions import (
    EnvelopeBounds,
    MultiplicativeSet,
    dedekind_mertens_exponent,
    nonprime_atom_set,
    ps_envelope,
    splitting_check,
)
from psmodules.errors import InvalidArgumentError, PSModulesError
from psmodules.grammar import (
    parse_domain,
    parse_element,
    parse_element_list,
    parse_ideal,
    parse_module,
    parse_vector,
)
from psmodules.modules import AnyModule, FractionalModule, LocModuleView, direct_sum, free_module
from psmodules.refine import (
    Certificate,
    Instance,
    brute_force_refinable,
    colon_principal_check,
    direct_sum_refinement,
    find_refinement,
    lcm_via_product_refinement,
    localize_instance,
    nagata_lift,
    nonprime_atom_witness,
    oracle_certificate,
    ufd_fast_path,
    verify_refinement,
)

log = logging.getLogger(__name__)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    certificate: Optional[Dict[str, Any]] = None
    kind: str = ""


@dataclass
class SuiteReport:
    results: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"name": r.name, "kind": r.kind, "passed": r.passed, "detail": r.detail} for r in self.results],
            columns=["name", "kind", "passed", "detail"],
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "total": len(self.results),
            "failed": [r.name for r in self.failures],
            "checks": [
                {
                    "name": r.name,
                    "kind": r.kind,
                    "passed": r.passed,
                    "detail": r.detail,
                    **({"certificate": r.certificate} if r.certificate is not None else {}),
                }
                for r in self.results
            ],
        }


# ------------------------------------------------------------
# HELPERS
# ------------------------------------------------------------
def _domain(check: Dict[str, Any]) -> DomainDescriptor:
    text = check.get("domain")
    return parse_domain(str(text)) if text is not None else Integers()


def _scalars(M: AnyModule) -> DomainDescriptor:
    return M.local_domain if isinstance(M, LocModuleView) else M.domain


def _same(D: DomainDescriptor, got, want_text) -> bool:
    return associates(D, got, parse_element(str(want_text), D))


def _class_set(D: DomainDescriptor, items) -> set:
    return {D.format(D.normalize(e)) for e in items}


def _expected_set(D: DomainDescriptor, texts) -> set:
    return _class_set(D, [parse_element(str(t), D) for t in texts])


def _instance(check: Dict[str, Any]) -> Instance:
    D = _domain(check)
    M = parse_module(check["module"], D)
    K = _scalars(M)
    return Instance(
        K,
        M,
        parse_element(str(check["a"]), K),
        parse_element(str(check["b"]), K),
        parse_vector(str(check["x"]), M),
        parse_vector(str(check["y"]), M),
    )


# ------------------------------------------------------------
# RUNNERS
# ------------------------------------------------------------
def run_colon(check: Dict[str, Any]) -> CheckResult:
    D = _domain(check)
    M = parse_module(check["module"], D)
    result = colon_principal_check(parse_element(str(check["a"]), D), parse_vector(str(check["x"]), M), M)
    want = check["expect"]
    ok = result.ideal == parse_ideal(want["ideal"], D)
    if "principal" in want:
        ok = ok and result.principal == bool(want["principal"])
    return CheckResult(check["name"], ok, f"colon {result.ideal}, principal {result.principal}")


def run_saturate(check: Dict[str, Any]) -> CheckResult:
    D = _domain(check)
    I = parse_ideal(check["ideal"], D)
    J, steps = ideals.saturation_steps(I, parse_element(str(check["s"]), D))
    want = check["expect"]
    ok = J == parse_ideal(want["ideal"], D)
    if "steps" in want:
        ok = ok and steps == int(want["steps"])
    return CheckResult(check["name"], ok, f"saturation {J} after {steps} steps")


def run_principal(check: Dict[str, Any]) -> CheckResult:
    D = _domain(check)
    g = ideals.is_principal(parse_ideal(check["ideal"], D))
    want = check["expect"]
    if want is None:
        ok = g is None
    else:
        ok = g is not None and _same(D, g, want)
    return CheckResult(check["name"], ok, "not principal" if g is None else f"generated by {D.format(g)}")


def _decide(inst: Instance, check: Dict[str, Any]) -> Certificate:
    method = check.get("method", "criterion")
    if method == "criterion":
        return find_refinement(inst, reduce=bool(check.get("reduce", False)), cross=bool(check.get("cross", False)))
    if method == "ufd":
        return ufd_fast_path(inst)
    if method == "oracle":
        return oracle_certificate(inst)
    raise InvalidArgumentError(f"unknown method {method!r}")


def run_refine(check: Dict[str, Any]) -> CheckResult:
    inst = _instance(check)
    cert = _decide(inst, check)
    want = check["expect"]
    D = inst.domain
    ok = cert.outcome == want["outcome"]
    detail = f"{cert.method}: {cert.outcome} after {len(cert.candidates)} candidates"
    if "candidates" in want:
        got = [D.format(D.normalize(r.candidate)) for r in cert.candidates]
        ok = ok and got == [D.format(D.normalize(parse_element(str(t), D))) for t in want["candidates"]]
        detail += f" {got}"
    if want.get("oracle"):
        agrees = (brute_force_refinable(inst) is not None) == cert.found
        ok = ok and agrees
        detail += f", oracle {'agrees' if agrees else 'disagrees'}"
    return CheckResult(check["name"], ok, detail, cert.to_dict())


def run_atoms(check: Dict[str, Any]) -> CheckResult:
    D = _domain(check)
    S = nonprime_atom_set(D, int(check["norm_bound"]))
    got = _class_set(D, S.generators)
    want = check["expect"]
    ok = True
    if "nonprime" in want:
        ok = ok and got == _expected_set(D, want["nonprime"])
    if "includes" in want:
        ok = ok and _expected_set(D, want["includes"]) <= got
    if "excludes" in want:
        ok = ok and not (_expected_set(D, want["excludes"]) & got)
    return CheckResult(check["name"], ok, f"nonprime atoms {sorted(got)}", S.to_dict())


def run_prime(check: Dict[str, Any]) -> CheckResult:
    D = _domain(check)
    e = parse_element(str(check["element"]), D)
    got = {"atom": is_atom(D, e), "prime": is_prime_element(D, e)}
    want = check["expect"]
    ok = all(got[k] == bool(v) for k, v in want.items())
    return CheckResult(check["name"], ok, f"{D.format(e)}: atom {got['atom']}, prime {got['prime']}")


def run_split(check: Dict[str, Any]) -> CheckResult:
    D = _domain(check)
    S = MultiplicativeSet(D, tuple(parse_element_list(check["S"], D)))
    report = splitting_check(S, parse_element_list(check["primes"], D))
    got = [e.passed for e in report.entries]
    ok = got == [bool(v) for v in check["expect"]]
    return CheckResult(check["name"], ok, f"split verdicts {got}", report.to_dict())


def run_dm(check: Dict[str, Any]) -> CheckResult:
    D = _domain(check)
    result = dedekind_mertens_exponent(D, parse_element_list(check["f"], D), parse_element_list(check["g"], D))
    want = check["expect"]
    ok = result.m == int(want["m"])
    if "gauss" in want:
        ok = ok and result.gauss_holds == bool(want["gauss"])
    return CheckResult(check["name"], ok, f"m = {result.m}, gauss {result.gauss_holds}", result.to_dict())


def run_envelope(check: Dict[str, Any]) -> CheckResult:
    D = _domain(check)
    N = parse_module(check["module"], D)
    M = parse_module(check["ambient"], D)
    defaults = EnvelopeBounds()
    bounds = EnvelopeBounds(
        int(check.get("norm_bound", defaults.norm_bound)),
        int(check.get("height", defaults.height)),
        int(check.get("max_steps", defaults.max_steps)),
    )
    result = ps_envelope(N, M, bounds)
    want = check["expect"]
    ok = True
    if "stabilized" in want:
        ok = ok and result.stabilized == bool(want["stabilized"])
    if "steps" in want:
        ok = ok and result.steps == int(want["steps"])
    start = FractionalModule.of(N)
    ambient = free_module(D, N.rank)
    for item in want.get("adjoins", []):
        nums = parse_vector(str(item["vector"]), ambient)
        den = int(item.get("den", 1))
        ok = ok and result.module.contains(nums, den) and not start.contains(nums, den)
    return CheckResult(
        check["name"], ok, f"stabilized {result.stabilized} after {result.steps} steps", result.to_dict()
    )


def run_lcm(check: Dict[str, Any]) -> CheckResult:
    D = _domain(check)
    got = lcm_via_product_refinement(
        parse_element(str(check["a"]), D),
        parse_element(str(check["b"]), D),
        parse_element_list(check["multiples"], D),
        D,
    )
    return CheckResult(check["name"], _same(D, got, check["expect"]), f"lcm {D.format(got)}")


def run_nagata(check: Dict[str, Any]) -> CheckResult:
    inst = _instance(check)
    D = inst.domain
    S = parse_element_list(check["S"], D)
    local = find_refinement(localize_instance(inst, S))
    if not local.found:
        return CheckResult(check["name"], False, f"no refinement over the localization ({local.outcome})")
    lifted = nagata_lift(local.refinement, inst, S)
    want = check.get("expect") or {}
    ok = verify_refinement(inst, lifted)
    for key in ("c", "d", "e"):
        if key in want:
            ok = ok and D.eq(getattr(lifted, key), parse_element(str(want[key]), D))
    if "z" in want:
        ok = ok and inst.module.equal(lifted.z, parse_vector(str(want["z"]), inst.module))
    r = lifted.to_dict(inst)
    return CheckResult(check["name"], ok, f"lifted c={r['c']} d={r['d']} e={r['e']} z={r['z']}", r)


def run_direct_sum(check: Dict[str, Any]) -> CheckResult:
    D = _domain(check)
    first = parse_module(check["first"], D)
    second = parse_module(check["second"], D)
    M = direct_sum(first, second)
    K = _scalars(M)
    inst = Instance(
        K,
        M,
        parse_element(str(check["a"]), K),
        parse_element(str(check["b"]), K),
        parse_vector(str(check["x"]), M),
        parse_vector(str(check["y"]), M),
    )
    split = direct_sum_refinement(inst, first, second)
    whole = find_refinement(inst)
    ok = split.outcome == check["expect"]["outcome"] and whole.outcome == split.outcome
    return CheckResult(
        check["name"], ok, f"two-stage {split.outcome}, criterion {whole.outcome}", split.to_dict()
    )


def run_mcd(check: Dict[str, Any]) -> CheckResult:
    D = _domain(check)
    got = mcd(D, parse_element(str(check["a"]), D), parse_element(str(check["b"]), D))
    return CheckResult(check["name"], _same(D, got, check["expect"]), f"mcd {D.format(got)}")


def run_divisors(check: Dict[str, Any]) -> CheckResult:
    D = _domain(check)
    got = _class_set(D, divisors_up_to_units(D, parse_element(str(check["element"]), D)))
    ok = got == _expected_set(D, check["expect"])
    return CheckResult(check["name"], ok, f"divisors {sorted(got)}")


def run_product(check: Dict[str, Any]) -> CheckResult:
    D = _domain(check)
    got = ideals.product(parse_ideal(check["left"], D), parse_ideal(check["right"], D))
    return CheckResult(check["name"], got == parse_ideal(check["expect"], D), f"product {got}")


def run_witness(check: Dict[str, Any]) -> CheckResult:
    D = _domain(check)
    M = parse_module(check["module"], D)
    cert = nonprime_atom_witness(M, parse_element(str(check["atom"]), D))
    ok = cert.outcome == check["expect"]["outcome"]
    return CheckResult(check["name"], ok, f"witness {cert.instance.to_dict()} is {cert.outcome}", cert.to_dict())


Runner = Callable[[Dict[str, Any]], CheckResult]

RUNNERS: Dict[str, Runner] = {
    "colon": run_colon,
    "saturate": run_saturate,
    "principal": run_principal,
    "refine": run_refine,
    "atoms": run_atoms,
    "prime": run_prime,
    "split": run_split,
    "dm": run_dm,
    "envelope": run_envelope,
    "lcm": run_lcm,
    "nagata": run_nagata,
    "direct_sum": run_direct_sum,
    "mcd": run_mcd,
    "divisors": run_divisors,
    "product": run_product,
    "witness": run_witness,
}


# ------------------------------------------------------------
# LOADING & RUNNING
# ------------------------------------------------------------
def suite_path(cfg: Optional[Dict[str, Any]] = None, fixtures_dir: Optional[Path] = None) -> Path:
    cfg = cfg or load_config()
    root = Path(fixtures_dir) if fixtures_dir is not None else Path(cfg["fixtures_dir"])
    if not root.is_absolute():
        root = PROJECT_ROOT / root
    return root / cfg.get("suite_file", "paper_suite.yaml")


def load_checks(path: Path) -> List[Dict[str, Any]]:
    with open(path, "r") as f:
        doc = yaml.safe_load(f) or {}
    checks = doc.get("checks", [])
    names = set()
    for check in checks:
        if "name" not in check or "kind" not in check:
            raise InvalidArgumentError(f"check without name or kind in {path}: {check}")
        if check["kind"] not in RUNNERS:
            raise InvalidArgumentError(f"check {check['name']!r} has unknown kind {check['kind']!r}")
        if check["name"] in names:
            raise InvalidArgumentError(f"duplicate check name {check['name']!r} in {path}")
        names.add(check["name"])
    return checks


def select_checks(checks: List[Dict[str, Any]], text: Optional[str]) -> List[Dict[str, Any]]:
    if not text:
        return list(checks)
    return [c for c in checks if text in c["name"] or text == c["kind"] or any(text in t for t in c.get("tags", []))]


def run_check(check: Dict[str, Any]) -> CheckResult:
    try:
        result = RUNNERS[check["kind"]](check)
    except PSModulesError as e:
        result = CheckResult(check["name"], False, f"{type(e).__name__}: {e}")
    result.kind = check["kind"]
    if result.passed:
        log.info(f"PASS {result.name}: {result.detail}")
    else:
        log.error(f"FAIL {result.name}: {result.detail}")
    return result


def run_paper_suite(
    path: Optional[Path] = None,
    filter_text: Optional[str] = None,
    workers: Optional[int] = None,
    cfg: Optional[Dict[str, Any]] = None,
) -> SuiteReport:
    """Run the pinned checks concurrently; order of results follows the file."""
    cfg = cfg or load_config()
    path = Path(path) if path is not None else suite_path(cfg)
    checks = select_checks(load_checks(path), filter_text)
    workers = workers or int(cfg.get("workers", 4))
    log.info(f"running {len(checks)} checks from {path} on {workers} workers")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(run_check, checks))
    report = SuiteReport(results)
    log.info(f"suite: {len(results) - len(report.failures)}/{len(results)} passed")
    return report
