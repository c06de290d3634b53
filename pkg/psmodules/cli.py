"""
cli.py – ps-check command line
==============================

    ps-check refine --domain "Z[w,-5]" --module "rank 1 gens [(1)]" \\
        --a 2 --b "1+w" --x 3 --y "1-w"
    ps-check principal --domain "Z[w,-5]" --ideal "[3, 1+w]"
    ps-check paper-suite --filter colon

Every subcommand builds a JSON document (``"schema": 1``); ``--json``
prints it as is, otherwise a human rendering of the same document is
printed. Exit codes: 0 found/verified, 1 refuted, 2 unknown or bounds hit,
3 usage or parse error.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from psmodules import ideals
from psmodules.config import (
    EXIT_FOUND,
    EXIT_REFUTED,
    EXIT_UNKNOWN,
    EXIT_USAGE,
    SCHEMA_VERSION,
    load_config,
    setup_logging,
)
from psmodules.constructions import (
    REFUTED,
    EnvelopeBounds,
    MultiplicativeSet,
    classify_module_sample,
    dedekind_mertens_exponent,
    nonprime_atom_set,
    ps_envelope,
    splitting_check,
)
from psmodules.errors import (
    DomainMismatchError,
    InvalidArgumentError,
    InvalidDivisorError,
    ParseError,
    PSModulesError,
)
from psmodules.grammar import (
    parse_domain,
    parse_element,
    parse_element_list,
    parse_ideal,
    parse_module,
    parse_vector,
)
from psmodules.modules import AnyModule, FgModule, LocModuleView
from psmodules.refine import (
    FOUND,
    NOT_REFINABLE,
    Instance,
    colon_principal_check,
    find_refinement,
    lcm_via_product_refinement,
    oracle_certificate,
    reduce_instance,
    ufd_fast_path,
)
from psmodules.sampling import run_sample
from psmodules.suite import run_paper_suite, suite_path

log = logging.getLogger(__name__)

# errors in what the user typed; everything else means a bound or capability was hit
USAGE_ERRORS = (ParseError, InvalidArgumentError, DomainMismatchError, InvalidDivisorError)


@dataclass
class Command:
    subcommand: str
    arguments: Dict[str, Any] = field(default_factory=dict)
    output_mode: str = "human"  # human | json


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors raise instead of exiting, so main() owns the exit code."""

    def error(self, message: str):
        raise InvalidArgumentError(f"{self.prog}: {message}")


# ------------------------------------------------------------
# ARGUMENTS
# ------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON certificate")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument("--config", type=Path, default=None, help="YAML file overriding the defaults")

    parser = _ArgumentParser(prog="ps-check", description="Pre-Schreier refinement checks.")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_ArgumentParser)
    sub.required = True

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    for name, help_text in (("refine", "decide an instance a*x = b*y"), ("reduce", "cancel common factors")):
        p = add(name, help_text)
        p.add_argument("--domain", default=None)
        p.add_argument("--module", required=True)
        p.add_argument("--loc", default=None, help='localize the module, e.g. "[2, 1+w]"')
        for key in ("a", "b", "x", "y"):
            p.add_argument(f"--{key}", required=True)
        p.add_argument("--cross", action="store_true", help="also cancel a/y, b/x and x/y factors")
        if name == "refine":
            p.add_argument("--method", choices=("criterion", "ufd", "oracle"), default="criterion")
            p.add_argument("--reduce", action="store_true", help="cancel before scanning")

    p = add("colon", "colon ideal (a*M : x) and its principality")
    p.add_argument("--domain", default=None)
    p.add_argument("--module", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--x", required=True)

    p = add("principal", "generator of an ideal, if any")
    p.add_argument("--domain", required=True)
    p.add_argument("--ideal", required=True)

    p = add("saturate", "saturation of an ideal by an element")
    p.add_argument("--domain", required=True)
    p.add_argument("--ideal", required=True)
    p.add_argument("--s", required=True)

    p = add("dm-exponent", "least Dedekind-Mertens exponent of f, g")
    p.add_argument("--domain", required=True)
    p.add_argument("--f", required=True, help="coefficients, constant term first")
    p.add_argument("--g", required=True)

    p = add("envelope", "bounded PS envelope of a module inside an ambient one")
    p.add_argument("--domain", default=None)
    p.add_argument("--module", required=True)
    p.add_argument("--ambient", required=True)
    p.add_argument("--norm-bound", type=int, default=None)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("--max-steps", type=int, default=None)

    p = add("atoms", "nonprime atoms up to a norm bound")
    p.add_argument("--domain", required=True)
    p.add_argument("--norm-bound", type=int, default=None)

    p = add("split-check", "p*A_S meets A in p*A for each listed p")
    p.add_argument("--domain", required=True)
    p.add_argument("--S", dest="S", required=True)
    p.add_argument("--primes", required=True)

    p = add("lcm", "lcm from a refinement over a list of common multiples")
    p.add_argument("--domain", default="Z")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--multiples", required=True)

    p = add("classify", "sampled atomic / factorable verdicts for a module")
    p.add_argument("--domain", default=None)
    p.add_argument("--module", required=True)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)

    p = add("paper-suite", "run the pinned regression checks")
    p.add_argument("--filter", default=None, help="keep checks whose name or tags contain TEXT")
    p.add_argument("--fixtures", type=Path, default=None, help="fixture directory")
    p.add_argument("--workers", type=int, default=None)

    p = add("sample", "decide a seeded batch of random instances")
    p.add_argument("--domain", default=None)
    p.add_argument("--module", required=True)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--norm-bound", type=int, default=None)
    p.add_argument("--out", type=Path, default=None, help="CSV file for the outcome table")

    return parser


def _module(args: argparse.Namespace) -> AnyModule:
    D = parse_domain(args.domain) if args.domain else None
    M = parse_module(args.module, D)
    loc = getattr(args, "loc", None)
    if loc:
        if not isinstance(M, FgModule):
            raise InvalidArgumentError("--loc given for a module that is already localized")
        M = LocModuleView(M, tuple(parse_element_list(loc, M.domain)))
    return M


def _scalars(M: AnyModule):
    return M.local_domain if isinstance(M, LocModuleView) else M.domain


def _instance(args: argparse.Namespace) -> Instance:
    M = _module(args)
    K = _scalars(M)
    return Instance(
        K,
        M,
        parse_element(args.a, K),
        parse_element(args.b, K),
        parse_vector(args.x, M),
        parse_vector(args.y, M),
    )


def parse_input(argv: Optional[Sequence[str]] = None) -> Command:
    """Parse the command line and every literal in it; nothing is computed yet."""
    args = build_parser().parse_args(list(argv) if argv is not None else None)
    cfg = load_config(args.config)
    name = args.subcommand
    parsed: Dict[str, Any] = {"config": cfg, "log_level": args.log_level or cfg.get("log_level")}

    if name in ("refine", "reduce"):
        parsed["instance"] = _instance(args)
        parsed["cross"] = args.cross
        if name == "refine":
            parsed["method"] = args.method
            parsed["reduce"] = args.reduce
    elif name == "colon":
        M = _module(args)
        parsed.update(module=M, a=parse_element(args.a, M.domain), x=parse_vector(args.x, M))
    elif name in ("principal", "saturate"):
        D = parse_domain(args.domain)
        parsed["ideal"] = parse_ideal(args.ideal, D)
        if name == "saturate":
            parsed["s"] = parse_element(args.s, D)
    elif name == "dm-exponent":
        D = parse_domain(args.domain)
        parsed.update(domain=D, f=parse_element_list(args.f, D), g=parse_element_list(args.g, D))
    elif name == "envelope":
        D = parse_domain(args.domain) if args.domain else None
        N = parse_module(args.module, D)
        if not isinstance(N, FgModule):
            raise InvalidArgumentError("the envelope starts from an unlocalized module")
        defaults = EnvelopeBounds.from_config(cfg)
        parsed.update(
            module=N,
            ambient=parse_module(args.ambient, N.domain),
            bounds=EnvelopeBounds(
                args.norm_bound if args.norm_bound is not None else defaults.norm_bound,
                args.height if args.height is not None else defaults.height,
                args.max_steps if args.max_steps is not None else defaults.max_steps,
            ),
        )
    elif name == "atoms":
        parsed["domain"] = parse_domain(args.domain)
        parsed["norm_bound"] = args.norm_bound or int(cfg["atoms"]["norm_bound"])
    elif name == "split-check":
        D = parse_domain(args.domain)
        parsed["S"] = MultiplicativeSet(D, tuple(parse_element_list(args.S, D)))
        parsed["primes"] = parse_element_list(args.primes, D)
    elif name == "lcm":
        D = parse_domain(args.domain)
        parsed.update(
            domain=D,
            a=parse_element(args.a, D),
            b=parse_element(args.b, D),
            multiples=parse_element_list(args.multiples, D),
        )
    elif name == "classify":
        M = _module(args)
        if not isinstance(M, FgModule):
            raise InvalidArgumentError("classification samples unlocalized modules")
        parsed["module"] = M
        parsed["budget"] = args.budget or int(cfg["sample"]["budget"])
        parsed["seed"] = args.seed if args.seed is not None else int(cfg["sample"]["seed"])
    elif name == "paper-suite":
        parsed["path"] = suite_path(cfg, args.fixtures)
        parsed["filter"] = args.filter
        parsed["workers"] = args.workers
    elif name == "sample":
        parsed["module"] = _module(args)
        parsed["count"] = args.count or int(cfg["sample"]["count"])
        parsed["seed"] = args.seed if args.seed is not None else int(cfg["sample"]["seed"])
        parsed["norm_bound"] = args.norm_bound or int(cfg["sample"]["norm_bound"])
        parsed["out"] = args.out
    return Command(name, parsed, "json" if args.json else "human")


# ------------------------------------------------------------
# EXECUTION
# ------------------------------------------------------------
OUTCOME_CODES = {FOUND: EXIT_FOUND, NOT_REFINABLE: EXIT_REFUTED}

Result = Tuple[Dict[str, Any], int]


def _run_refine(a: Dict[str, Any]) -> Result:
    inst = a["instance"]
    method = a["method"]
    if method == "ufd":
        cert = ufd_fast_path(inst)
    elif method == "oracle":
        cert = oracle_certificate(inst)
    else:
        cert = find_refinement(inst, reduce=a["reduce"], cross=a["cross"])
    return cert.to_dict(), OUTCOME_CODES.get(cert.outcome, EXIT_UNKNOWN)


def _run_reduce(a: Dict[str, Any]) -> Result:
    inst = a["instance"]
    reduced, steps = reduce_instance(inst, cross=a["cross"])
    D = inst.domain
    doc = {
        "instance": inst.to_dict(),
        "reduced": reduced.to_dict(),
        "reductions": [{"kind": s.kind, "factor": D.format(s.factor)} for s in steps],
    }
    return doc, EXIT_FOUND


def _run_colon(a: Dict[str, Any]) -> Result:
    M = a["module"]
    check = colon_principal_check(a["a"], a["x"], M)
    D = M.domain
    doc = {
        "module": str(M),
        "a": D.format(a["a"]),
        "x": M.format_vector(a["x"]),
        "colon": ideals.ideal_to_dict(check.ideal),
        "principal": check.principal,
    }
    if check.principal:
        doc["generator"] = D.format(check.generator)
    return doc, EXIT_FOUND


def _run_principal(a: Dict[str, Any]) -> Result:
    I = a["ideal"]
    g = ideals.is_principal(I)
    doc = {"ideal": ideals.ideal_to_dict(I), "norm": ideals.ideal_norm(I), "principal": g is not None}
    if g is not None:
        doc["generator"] = I.domain.format(g)
    return doc, EXIT_FOUND if g is not None else EXIT_REFUTED


def _run_saturate(a: Dict[str, Any]) -> Result:
    I = a["ideal"]
    J, steps = ideals.saturation_steps(I, a["s"])
    doc = {
        "ideal": ideals.ideal_to_dict(I),
        "s": I.domain.format(a["s"]),
        "saturation": ideals.ideal_to_dict(J),
        "steps": steps,
    }
    return doc, EXIT_FOUND


def _run_dm(a: Dict[str, Any]) -> Result:
    result = dedekind_mertens_exponent(a["domain"], a["f"], a["g"])
    return result.to_dict(), EXIT_FOUND


def _run_envelope(a: Dict[str, Any]) -> Result:
    result = ps_envelope(a["module"], a["ambient"], a["bounds"])
    bounds = a["bounds"]
    doc = result.to_dict()
    doc["bounds"] = {"norm_bound": bounds.norm_bound, "height": bounds.height, "max_steps": bounds.max_steps}
    return doc, EXIT_FOUND if result.stabilized else EXIT_UNKNOWN


def _run_atoms(a: Dict[str, Any]) -> Result:
    S = nonprime_atom_set(a["domain"], a["norm_bound"])
    doc = S.to_dict()
    doc["norm_bound"] = a["norm_bound"]
    return doc, EXIT_FOUND


def _run_split(a: Dict[str, Any]) -> Result:
    report = splitting_check(a["S"], a["primes"])
    return report.to_dict(), EXIT_FOUND if report.all_pass else EXIT_REFUTED


def _run_lcm(a: Dict[str, Any]) -> Result:
    D = a["domain"]
    result = lcm_via_product_refinement(a["a"], a["b"], a["multiples"], D)
    doc = {
        "a": D.format(a["a"]),
        "b": D.format(a["b"]),
        "multiples": [D.format(f) for f in a["multiples"]],
        "lcm": D.format(result),
    }
    return doc, EXIT_FOUND


def _run_classify(a: Dict[str, Any]) -> Result:
    report = classify_module_sample(a["module"], a["budget"], np.random.default_rng(a["seed"]))
    doc = report.to_dict()
    doc.update(module=str(a["module"]), seed=a["seed"])
    refuted = REFUTED in (report.atomic, report.factorable)
    return doc, EXIT_REFUTED if refuted else EXIT_FOUND


def _run_suite(a: Dict[str, Any]) -> Result:
    report = run_paper_suite(a["path"], a["filter"], a["workers"], a["config"])
    doc = report.to_dict()
    doc["table"] = report.to_frame().to_string(index=False)
    return doc, EXIT_FOUND if report.passed else EXIT_REFUTED


def _run_sample(a: Dict[str, Any]) -> Result:
    df = run_sample(a["module"], a["count"], a["seed"], a["norm_bound"], out=a["out"])
    disagreements = 0
    if "oracle_agrees" in df.columns:
        disagreements = int((df["oracle_agrees"] == False).sum())  # noqa: E712
    doc = {
        "module": str(a["module"]),
        "seed": a["seed"],
        "count": len(df),
        "outcomes": {str(k): int(v) for k, v in df["outcome"].value_counts().items()} if len(df) else {},
        "oracle_disagreements": disagreements,
    }
    if a["out"] is not None:
        doc["out"] = str(a["out"])
    return doc, EXIT_FOUND if disagreements == 0 else EXIT_UNKNOWN


EXECUTORS: Dict[str, Callable[[Dict[str, Any]], Result]] = {
    "refine": _run_refine,
    "reduce": _run_reduce,
    "colon": _run_colon,
    "principal": _run_principal,
    "saturate": _run_saturate,
    "dm-exponent": _run_dm,
    "envelope": _run_envelope,
    "atoms": _run_atoms,
    "split-check": _run_split,
    "lcm": _run_lcm,
    "classify": _run_classify,
    "paper-suite": _run_suite,
    "sample": _run_sample,
}


def execute(command: Command) -> Result:
    doc, code = EXECUTORS[command.subcommand](command.arguments)
    return {"schema": SCHEMA_VERSION, "command": command.subcommand, **doc}, code


# ------------------------------------------------------------
# OUTPUT
# ------------------------------------------------------------
def render_human(doc: Any, indent: int = 0) -> List[str]:
    pad = "  " * indent
    lines: List[str] = []
    if isinstance(doc, dict):
        for key, value in doc.items():
            if key == "table":
                continue
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{pad}{key}:")
                lines.extend(render_human(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {value}")
        if "table" in doc:
            lines.append(doc["table"])
    elif isinstance(doc, list):
        for item in doc:
            if isinstance(item, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(render_human(item, indent + 1))
            else:
                lines.append(f"{pad}- {item}")
    else:
        lines.append(f"{pad}{doc}")
    return lines


def emit(doc: Dict[str, Any], mode: str) -> None:
    if mode == "json":
        print(json.dumps(doc, indent=2))
    else:
        print("\n".join(render_human(doc)))


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        command = parse_input(argv)
    except PSModulesError as e:
        setup_logging()
        log.error(f"usage: {e}")
        return EXIT_USAGE
    setup_logging(command.arguments.get("log_level"))
    try:
        doc, code = execute(command)
    except USAGE_ERRORS as e:
        log.error(f"{command.subcommand}: {e}")
        return EXIT_USAGE
    except PSModulesError as e:
        log.error(f"{command.subcommand}: {type(e).__name__}: {e}")
        return EXIT_UNKNOWN
    emit(doc, command.output_mode)
    return code


if __name__ == "__main__":
    sys.exit(main())
