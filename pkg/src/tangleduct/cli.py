"""Command-line surface: parse inputs, run engines, emit and check certificates.

Commands
--------
validate        load and validate a system, print a summary
weak            family-avoiding orientation or tree certificate
strong          tangle or tree certificate (family must be standard)
tangles         full orientation census, one JSON object per line
check-tree      re-verify a certificate of any kind
essential-core  strip trivial orientations from a family
essentialize    trim a tree certificate down to an essential tree
graph-sk        build the order-< k separation system of a graph

Inputs are JSON documents; a document holding ``{"system": ..., "family":
..., "certificate": ...}`` bundles several at once, and ``--system`` /
``--family`` supply the missing pieces for bare inputs.  ``graph-sk`` reads
edge-list text instead (one ``u v`` edge or lone vertex per line).  All JSON
output is emitted with sorted keys and fixed separators, so identical inputs
produce byte-identical bytes.

Exit codes: 0 success, 1 malformed input or failed verification, 2 unmet
hypothesis (no separator, or a non-standard family without
``--auto-standardize``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional

from .backends import (
    DEFAULT_CLOSURE_CAP,
    GraphInput,
    graph_separations,
    is_improper,
)
from .core import SeparationSystem, system_from_json_dict, system_to_json_dict
from .duality import (
    Certificate,
    standardize,
    strong_duality,
    verify_certificate,
    weak_duality,
)
from .errors import (
    HypothesisFailure,
    InternalInvariant,
    MalformedInput,
    TangleductError,
)
from .essential import essential_core, essentialize_stree
from .oracle import enumerate_orientations, orientation_picks
from .stree import STree, StarFamily

ENV_MAX_CLOSURE = "TANGLEDUCT_MAX_CLOSURE"
COMMANDS = (
    "validate",
    "weak",
    "strong",
    "tangles",
    "check-tree",
    "essential-core",
    "essentialize",
    "graph-sk",
)


@dataclass
class RunConfig:
    """One CLI invocation: a command plus its input paths and flags."""

    command: str
    input_path: str
    system_path: Optional[str] = None
    family_path: Optional[str] = None
    output_path: Optional[str] = None
    k: Optional[int] = None
    max_closure: Optional[int] = None
    auto_standardize: bool = False
    fmt: str = "json"
    demo_family: bool = False


def parse_args(argv: Optional[list[str]] = None) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="tangleduct",
        description="separation systems, tangles, and tree certificates",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("input", help="input file path, or '-' for stdin")
    parser.add_argument("--system", dest="system_path", default=None,
                        help="system JSON when the input lacks one")
    parser.add_argument("--family", dest="family_path", default=None,
                        help="star family JSON when the input lacks one")
    parser.add_argument("-o", "--output", dest="output_path", default=None,
                        help="write here instead of stdout")
    parser.add_argument("--k", type=int, default=None,
                        help="order bound for graph-sk")
    parser.add_argument("--max-closure", type=int, default=None,
                        help=f"universe closure cap (env {ENV_MAX_CLOSURE})")
    parser.add_argument("--auto-standardize", action="store_true",
                        help="add missing trivial-forcing stars for strong/check-tree")
    parser.add_argument("--format", dest="fmt", choices=("json", "dot"),
                        default="json")
    parser.add_argument("--demo-family", action="store_true",
                        help="graph-sk: bundle a demo star family with the system")
    ns = parser.parse_args(argv)
    return RunConfig(
        command=ns.command,
        input_path=ns.input,
        system_path=ns.system_path,
        family_path=ns.family_path,
        output_path=ns.output_path,
        k=ns.k,
        max_closure=ns.max_closure,
        auto_standardize=ns.auto_standardize,
        fmt=ns.fmt,
        demo_family=ns.demo_family,
    )


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path!r}: {exc}") from exc


def _read_json(path: str) -> dict:
    text = _read_text(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path!r} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedInput(f"{path!r} must hold a JSON object")
    return doc


@dataclass
class _Documents:
    system: Optional[SeparationSystem] = None
    family_dict: Optional[dict] = None
    certificate_dict: Optional[dict] = None

    def family(self) -> Optional[StarFamily]:
        if self.family_dict is None:
            return None
        if self.system is None:
            raise MalformedInput("a family needs a system to live in")
        return StarFamily.from_json_dict(self.system.universe, self.family_dict)

    def certificate(self) -> Optional[Certificate]:
        if self.certificate_dict is None:
            return None
        if self.system is None:
            raise MalformedInput("a certificate needs a system to live in")
        d = dict(self.certificate_dict)
        if "kind" not in d:
            d["kind"] = "stree"  # bare tree JSON
        return Certificate.from_json_dict(self.system, d)


def _classify(doc: dict, docs: _Documents) -> None:
    """File one JSON object into the documents bundle by its keys."""
    if "system" in doc or "family" in doc or "certificate" in doc:
        if "system" in doc:
            docs.system = system_from_json_dict(doc["system"])
        if "family" in doc:
            docs.family_dict = doc["family"]
        if "certificate" in doc:
            docs.certificate_dict = doc["certificate"]
    elif "elements" in doc:
        docs.system = system_from_json_dict(doc)
    elif "kind" in doc or ("edges" in doc and "alpha" in doc):
        docs.certificate_dict = doc
    elif "stars" in doc:
        docs.family_dict = doc
    else:
        raise MalformedInput(
            "cannot tell what this JSON object is: expected a system "
            "('elements'), family ('stars'), certificate ('kind' or tree "
            "keys), or an envelope ('system'/'family'/'certificate')"
        )


def _load_documents(config: RunConfig) -> _Documents:
    docs = _Documents()
    _classify(_read_json(config.input_path), docs)
    if config.system_path is not None:
        doc = _read_json(config.system_path)
        docs.system = system_from_json_dict(doc.get("system", doc))
    if config.family_path is not None:
        doc = _read_json(config.family_path)
        docs.family_dict = doc.get("family", doc)
    return docs


def _require_system(docs: _Documents) -> SeparationSystem:
    if docs.system is None:
        raise MalformedInput("no system given (bundle one or pass --system)")
    return docs.system


def _require_family(docs: _Documents) -> StarFamily:
    fam = docs.family()
    if fam is None:
        raise MalformedInput("no family given (bundle one or pass --family)")
    return fam


def _dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _emit(config: RunConfig, text: str) -> None:
    if config.output_path is None or config.output_path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(config.output_path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _emit_certificate(config: RunConfig, cert: Certificate) -> None:
    if config.fmt == "dot":
        if cert.tree is None:
            raise MalformedInput(
                "dot output needs a tree certificate; this one is "
                f"{cert.kind!r}"
            )
        _emit(config, cert.tree.to_dot())
    else:
        _emit(config, _dumps(cert.to_json_dict()))


def demo_family(system: SeparationSystem) -> StarFamily:
    """Bundled demo family: improper-separation singletons, standardized.

    Purely a source of end-to-end fixtures for graph systems; it makes no
    claim to match any classical family of interest.
    """
    u = system.universe
    singles = [
        [m]
        for m in system.members
        if not u.is_degenerate_id(m) and is_improper(u.sep(m))
    ]
    return standardize(StarFamily(u, singles), system)


def _closure_cap(config: RunConfig) -> int:
    if config.max_closure is not None:
        return config.max_closure
    env = os.environ.get(ENV_MAX_CLOSURE)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise MalformedInput(
                f"environment variable {ENV_MAX_CLOSURE} must be an integer"
            ) from exc
    return DEFAULT_CLOSURE_CAP


def _cmd_validate(config: RunConfig, docs: _Documents) -> int:
    system = _require_system(docs)
    u = system.universe
    summary = {
        "ok": True,
        "elements": len(u),
        "members": list(system.members),
        "degenerate": sorted(system.degenerate_ids),
        "trivial": sorted(system.trivial_ids),
        "small": [m for m in system.members if u.sep(m).is_small],
        "nondegenerate_pairs": len(system.nondegenerate_reps),
    }
    fam = docs.family()
    if fam is not None:
        summary["family_stars"] = len(fam)
        summary["family_standard"] = fam.is_standard_for(system)
    _emit(config, _dumps(summary))
    return 0


def _cmd_weak(config: RunConfig, docs: _Documents) -> int:
    system = _require_system(docs)
    cert = weak_duality(system, _require_family(docs))
    _emit_certificate(config, cert)
    return 0


def _cmd_strong(config: RunConfig, docs: _Documents) -> int:
    system = _require_system(docs)
    cert = strong_duality(
        system, _require_family(docs), auto_standardize=config.auto_standardize
    )
    _emit_certificate(config, cert)
    return 0


def _cmd_tangles(config: RunConfig, docs: _Documents) -> int:
    system = _require_system(docs)
    family = _require_family(docs)
    census = enumerate_orientations(system, family, "tangle")
    consistent = set(census.consistent)
    avoiding = set(census.f_avoiding)
    lines = []
    for code in range(census.total):
        picks = orientation_picks(system, code)
        lines.append(
            _dumps(
                {
                    "picks": list(picks),
                    "consistent": picks in consistent,
                    "avoiding": picks in avoiding,
                    "tangle": picks in consistent and picks in avoiding,
                }
            )
        )
    _emit(config, "\n".join(lines))
    return 0


def _cmd_check_tree(config: RunConfig, docs: _Documents) -> int:
    system = _require_system(docs)
    family = _require_family(docs)
    if config.auto_standardize:
        family = standardize(family.restricted_to(system), system)
    cert = docs.certificate()
    if cert is None:
        raise MalformedInput("no certificate given (bundle one or pass it as input)")
    ok, problems = verify_certificate(cert, system, family)
    _emit(config, _dumps({"ok": ok, "kind": cert.kind, "problems": list(problems)}))
    return 0 if ok else 1


def _cmd_essential_core(config: RunConfig, docs: _Documents) -> int:
    system = _require_system(docs)
    family = _require_family(docs)
    _emit(config, _dumps(essential_core(family, system).to_json_dict()))
    return 0


def _cmd_essentialize(config: RunConfig, docs: _Documents) -> int:
    system = _require_system(docs)
    cert = docs.certificate()
    if cert is None or cert.tree is None:
        raise MalformedInput("essentialize needs a tree certificate")
    trimmed = essentialize_stree(cert.tree)
    if config.fmt == "dot":
        _emit(config, trimmed.to_dot())
    else:
        _emit(config, _dumps(trimmed.to_json_dict()))
    return 0


def _cmd_graph_sk(config: RunConfig) -> int:
    if config.k is None:
        raise MalformedInput("graph-sk requires --k")
    graph = GraphInput.parse(_read_text(config.input_path))
    system = graph_separations(graph, config.k, max_closure=_closure_cap(config))
    doc = {"system": system_to_json_dict(system)}
    if config.demo_family:
        fam = demo_family(system)
        fam_dict = fam.to_json_dict()
        fam_dict["label"] = "demo"
        doc["family"] = fam_dict
    _emit(config, _dumps(doc))
    return 0


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit code."""
    try:
        if config.command == "graph-sk":
            return _cmd_graph_sk(config)
        docs = _load_documents(config)
        if config.command == "validate":
            return _cmd_validate(config, docs)
        if config.command == "weak":
            return _cmd_weak(config, docs)
        if config.command == "strong":
            return _cmd_strong(config, docs)
        if config.command == "tangles":
            return _cmd_tangles(config, docs)
        if config.command == "check-tree":
            return _cmd_check_tree(config, docs)
        if config.command == "essential-core":
            return _cmd_essential_core(config, docs)
        if config.command == "essentialize":
            return _cmd_essentialize(config, docs)
        raise MalformedInput(f"unknown command {config.command!r}")
    except InternalInvariant:
        raise
    except HypothesisFailure as exc:
        print(f"hypothesis unmet: {exc}", file=sys.stderr)
        return 2
    except TangleductError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv: Optional[list[str]] = None) -> None:
    sys.exit(run(parse_args(argv)))


if __name__ == "__main__":
    main()
