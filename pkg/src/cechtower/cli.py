"""Command-line front end.

Inputs are either a document file (see the documents module) or a named
generator; tasks run the corresponding pipeline and emit a human-readable
table or a canonical JSON report.  Identical inputs produce byte-identical
structured output.

Exit codes: 0 success, 1 parse error, 2 validation failure, 3 failed
theorem/exactness check.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from typing import Optional

from . import documents
from .cech import leray_comparison
from .cochain import presentation
from .generators import (
    COMPLEX_KINDS,
    PAIR_KINDS,
    TOWER_KINDS,
    GeneratedObject,
    GeneratorSpec,
    build,
)
from .les import assemble_les, certify_exact, completed_les_check, presheaf_les
from .cech import StarCover
from .residue import Modulus, _is_prime
from .simplicial import Pair, SimplicialComplex, cochain_complex
from .tower import Tower, completed_report, main_theorem_check, validate_tower

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_VALIDATION = 2
EXIT_CHECK = 3

TASKS = ("cohomology", "leray", "les", "tower-report", "theorem-check")


class JobError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class JobSpec:
    task: str
    p: int
    s_max: int
    n_max: int
    degree: Optional[int]
    output_format: str  # table | structured
    document: Optional[str] = None
    generate: Optional[GeneratorSpec] = None

    def validate(self) -> None:
        if self.task not in TASKS:
            raise JobError(f"unknown task {self.task!r}", EXIT_PARSE)
        if not _is_prime(self.p):
            raise JobError(f"p = {self.p} is not prime", EXIT_PARSE)
        if self.s_max < 1 or self.n_max < 0:
            raise JobError("bounds must be positive", EXIT_PARSE)
        if self.output_format not in ("table", "structured"):
            raise JobError(f"unknown output format {self.output_format!r}", EXIT_PARSE)
        if (self.document is None) == (self.generate is None):
            raise JobError("provide exactly one of --input and --generate", EXIT_PARSE)


_GENERATOR_ALIASES = {
    "solenoid": "solenoid_tower",
    "solenoid-cylinder": "solenoid_cylinder_tower",
    "voltage-eight": "voltage_tower",
}


def parse_generator_name(name: str, args: argparse.Namespace) -> GeneratorSpec:
    """Turn a CLI generator name like 'cycle3' or 'solenoid' into a spec."""
    m = re.fullmatch(r"([a-z_-]+?)(\d+)?", name)
    if not m:
        raise JobError(f"cannot parse generator name {name!r}", EXIT_PARSE)
    kind = m.group(1).rstrip("-_").replace("-", "_")
    trailing = m.group(2)
    kind = _GENERATOR_ALIASES.get(kind, kind)
    if kind.startswith("trivial_"):
        base = kind[len("trivial_"):]
        params = {"base": base, "p": args.p, "r_max": args.r_max}
        if base == "circle":
            params["base"] = "cycle"
        if trailing:
            params["k"] = int(trailing)
        return GeneratorSpec.of("trivial_tower", **params)
    params: dict = {}
    if kind in ("cycle", "interval", "interval_pair", "circle_pair", "cylinder", "cylinder_pair"):
        params["k"] = int(trailing) if trailing else args.k
    if kind in ("disk", "disk_pair"):
        params["subdiv"] = int(trailing) if trailing else args.subdiv
    if kind in ("cylinder", "cylinder_pair"):
        params["height"] = args.height
    if kind in TOWER_KINDS:
        params["p"] = args.p
        params["r_max"] = args.r_max
        if kind in ("solenoid_tower", "solenoid_cylinder_tower"):
            params["base_k"] = int(trailing) if trailing else args.base_k
        if kind == "solenoid_cylinder_tower":
            params["height"] = args.height
        if kind == "voltage_tower":
            params["num_vertices"] = 1
            params["edges"] = ((0, 0, 1), (0, 0, 0))
    if kind not in COMPLEX_KINDS + PAIR_KINDS + TOWER_KINDS:
        raise JobError(f"unknown generator {name!r}", EXIT_PARSE)
    return GeneratorSpec.of(kind, **params)


def _load_input(job: JobSpec):
    """Returns (category, obj, echo) for the job's input."""
    if job.generate is not None:
        generated = build(job.generate)
        echo = {"generator": generated.spec.to_json_dict()}
        return generated.category, generated.obj, echo
    try:
        parsed = documents.parse_document(job.document)
    except documents.DocumentParseError as exc:
        raise JobError(f"parse error: {exc}", EXIT_PARSE) from exc
    if parsed.kind == "generate":
        generated = build(parsed.obj)
        return generated.category, generated.obj, {"generator": parsed.obj.to_json_dict()}
    return parsed.kind, parsed.obj, {"document": True}


def _invariants_json(inv) -> dict:
    return {"p": inv.modulus.p, "s": inv.modulus.s, "exponents": list(inv.exponents)}


def _split_pair(obj):
    if isinstance(obj, Pair):
        return obj.total, (obj.sub if obj.sub.simplices else None)
    return obj, None


def run(job: JobSpec) -> tuple[int, str]:
    """Run the job and return (exit_code, report text)."""
    job.validate()
    category, obj, echo = _load_input(job)
    report: dict = {"task": job.task, "input": echo,
                    "p": job.p, "s_max": job.s_max, "n_max": job.n_max}
    lines: list[str] = []
    code = EXIT_OK

    if job.task == "cohomology":
        if category == "tower":
            raise JobError("cohomology task expects a complex or pair", EXIT_PARSE)
        total, sub = _split_pair(obj)
        report["object"] = documents.serialize(obj)
        degrees = {}
        for s in range(1, job.s_max + 1):
            cx = cochain_complex(total, Modulus(job.p, s), job.n_max, sub)
            for n in range(job.n_max + 1):
                inv = presentation(cx, n).invariants
                degrees[f"s{s}n{n}"] = _invariants_json(inv)
                lines.append(f"H^{n} with Z/{job.p}^{s}: {inv}")
        report["cohomology"] = degrees

    elif job.task == "leray":
        if category == "tower":
            raise JobError("leray task expects a complex or pair", EXIT_PARSE)
        total, sub = _split_pair(obj)
        report["object"] = documents.serialize(obj)
        per_s = {}
        all_ok = True
        for s in range(1, job.s_max + 1):
            rep = leray_comparison(total, Modulus(job.p, s), job.n_max, sub)
            per_s[f"s{s}"] = rep.to_json_dict()
            all_ok = all_ok and rep.all_equal
            verdict = "PASS" if rep.all_equal else "FAIL"
            lines.append(
                f"Cech = simplicial in degrees 0..{job.n_max} over Z/{job.p}^{s}: {verdict}")
        report["leray"] = per_s
        report["ok"] = all_ok
        if not all_ok:
            code = EXIT_CHECK

    elif job.task == "les":
        if category == "tower":
            tower: Tower = obj
            report["object"] = documents.serialize(obj)
            code = _require_valid(tower, report, lines)
            if code == EXIT_OK:
                rep = completed_les_check(tower, job.n_max, job.p, job.s_max)
                report["completed_les"] = rep.to_json_dict()
                lines.append(f"completed LES check: {'PASS' if rep.ok else 'FAIL'}")
                for (r, s), ex in sorted(rep.exactness.items()):
                    lines.append(f"  (r={r}, s={s}) exact: {'yes' if ex.ok else 'NO'}")
                if not rep.ok:
                    code = EXIT_CHECK
        else:
            if category != "pair":
                raise JobError("les task expects a pair or a tower", EXIT_PARSE)
            pair: Pair = obj
            report["object"] = documents.serialize(obj)
            per_s = {}
            ok = True
            for s in range(1, job.s_max + 1):
                data = presheaf_les(StarCover(pair.total), Modulus(job.p, s), pair, job.n_max)
                nodes = assemble_les(data, job.n_max)
                cert = certify_exact(nodes)
                per_s[f"s{s}"] = {
                    "nodes": [
                        {"label": node.label, "module": _invariants_json(node.module)}
                        for node in nodes
                    ],
                    "exactness": cert.to_json_dict(),
                }
                ok = ok and cert.ok
                lines.append(f"LES over Z/{job.p}^{s}: {'exact' if cert.ok else 'NOT exact'}")
                for node in nodes:
                    lines.append(f"  {node.label} = {node.module}")
            report["les"] = per_s
            report["ok"] = ok
            if not ok:
                code = EXIT_CHECK

    elif job.task == "tower-report":
        if category != "tower":
            raise JobError("tower-report expects a tower", EXIT_PARSE)
        tower = obj
        report["object"] = documents.serialize(obj)
        code = _require_valid(tower, report, lines)
        if code == EXIT_OK:
            degree = job.degree if job.degree is not None else 0
            rep = completed_report(tower, degree, job.p, job.s_max)
            report["tower_report"] = rep.to_json_dict()
            lines.append(f"degree {degree} table over (r, s), p = {job.p}:")
            for s in range(1, job.s_max + 1):
                cells = []
                for r in range(rep.r_max + 1):
                    cells.append(str(rep.table[(r, s)]))
                lines.append(f"  s={s}: " + " | ".join(cells))
            for s, cls in sorted(rep.classifications.items()):
                lines.append(f"  s={s}: {cls.describe()}")
            lines.append(f"squares commute: {'yes' if rep.squares_commute else 'NO'}")
            htilde = "H~^%d" % degree
            lines.append(f"{htilde} inferred: {rep.inferred.description.removeprefix('inferred: ')}")

    elif job.task == "theorem-check":
        if category != "tower":
            raise JobError("theorem-check expects a tower", EXIT_PARSE)
        tower = obj
        report["object"] = documents.serialize(obj)
        code = _require_valid(tower, report, lines)
        if code == EXIT_OK:
            rep = main_theorem_check(tower, job.n_max, job.p, job.s_max)
            report["theorem_check"] = rep.to_json_dict()
            lines.append(f"finite-level theorem check: {'PASS' if rep.ok else 'FAIL'}")
            counts: dict[str, int] = {}
            for item in rep.items:
                counts[item.name] = counts.get(item.name, 0) + 1
            for name, count in sorted(counts.items()):
                bad = sum(1 for i in rep.items if i.name == name and not i.ok)
                lines.append(f"  {name}: {count - bad}/{count} ok")
            for item in rep.failures()[:10]:
                lines.append(f"  FAIL {item.name} at (r={item.r}, s={item.s}, n={item.n}): {item.detail}")
            if not rep.ok:
                code = EXIT_CHECK

    report["exit_code"] = code
    if job.output_format == "structured":
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    else:
        text = "\n".join(lines) + "\n"
    return code, text


def _require_valid(tower: Tower, report: dict, lines: list[str]) -> int:
    validation = validate_tower(tower)
    report["validation"] = validation.to_json_dict()
    if validation.ok:
        lines.append("tower validation: ok")
        return EXIT_OK
    lines.append("tower validation: FAILED")
    for check in validation.failures():
        lines.append(f"  {check.name} at level {check.level}: {check.detail}")
    return EXIT_VALIDATION


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cechtower",
        description="cohomology of finite complexes, pairs and covering towers over Z/p^s",
    )
    parser.add_argument("--task", default="cohomology", choices=TASKS)
    parser.add_argument("--input", help="path to a document file ('-' for stdin)")
    parser.add_argument("--generate", help="built-in generator name, e.g. cycle3 or solenoid")
    parser.add_argument("--p", type=int, default=2)
    parser.add_argument("--s", "--s-max", dest="s_max", type=int, default=1)
    parser.add_argument("--n-max", type=int, default=2)
    parser.add_argument("--degree", type=int, default=None)
    parser.add_argument("--r-max", type=int, default=2)
    parser.add_argument("--k", type=int, default=3)
    parser.add_argument("--subdiv", type=int, default=3)
    parser.add_argument("--height", type=int, default=1)
    parser.add_argument("--base-k", type=int, default=3)
    parser.add_argument("--format", dest="output_format", default="table",
                        choices=("table", "structured"))
    parser.add_argument("--output", help="write the report to this path instead of stdout")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK

    try:
        document = None
        generate = None
        if args.input is not None:
            document = sys.stdin.read() if args.input == "-" else _read(args.input)
        elif args.generate is not None:
            generate = parse_generator_name(args.generate, args)
        job = JobSpec(
            task=args.task,
            p=args.p,
            s_max=args.s_max,
            n_max=args.n_max,
            degree=args.degree,
            output_format=args.output_format,
            document=document,
            generate=generate,
        )
        code, text = run(job)
    except JobError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    if args.output:
        with open(args.output, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return code


def _read(path: str) -> str:
    try:
        with open(path) as handle:
            return handle.read()
    except OSError as exc:
        raise JobError(f"cannot read {path}: {exc}", EXIT_PARSE) from exc


if __name__ == "__main__":
    sys.exit(main())
