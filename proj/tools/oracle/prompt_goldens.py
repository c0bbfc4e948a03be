#!/usr/bin/env python3
"""Writes golden prompt files for a few methods of a Java tree.

Method text comes from the javalang spans of ck_oracle.py and metric values
from its CSV, so the goldens do not depend on the C++ core.
"""

import argparse
import csv
import pathlib

import javalang
from javalang import tree as T

import ck_oracle

ROLE = (
    "You are an assistant with expertise in explaining the security criticality of software in regard to the "
    "system’s confidentiality, integrity, and availability. For a given code snippet, you will be provided with "
    "the name of a software metric that measures its criticality, the interpretation of the metric value, and the "
    "value of the metric. One of the following metrics will be provided: cyclomatic complexity, lines of code, or "
    "lack of cohesion of methods. Your task is to explain why the code snippet is security critical using the "
    "provided metric and give steps to prevent possible security exploits due to mistakes in the code snippet."
)

GUIDELINES = """Guidelines:
- Ground every statement in the given code snippet; avoid generic advice that does not follow from it.
- Refer to the concrete operations, parameters and data flows of the snippet where they matter.
- Answer in exactly two labelled sections and nothing else.

Response format:
WHY_CRITICAL: <at most 120 words on why this code is security critical given the metric>
PRECAUTIONS:
1. <first precautionary step>
2. <second precautionary step>
3. <third precautionary step>
(3 to 7 numbered steps)"""

INSTRUCTION = ("Explain why the code snippet is security critical based on the metric and provide concise steps to "
               "prevent security exploits.")

PLACEHOLDER = "Generating explanation, please wait"

METRIC_NAMES = {"cc": "cyclomatic complexity", "loc": "lines of code", "lcom": "lack of cohesion of methods"}
INTERPRETATION = "higher values indicate higher security criticality"

# (slug, class, method signature, metric)
SELECTION = [
    ("owner_controller_process_find_form", "org.springframework.samples.petclinic.owner.OwnerController",
     "processFindForm(Owner,BindingResult,Map)", "loc"),
    ("owner_repository_custom_impl_save", "org.springframework.samples.petclinic.owner.OwnerRepositoryCustomImpl",
     "save(Owner)", "cc"),
    ("pet_controller_process_creation_form", "org.springframework.samples.petclinic.owner.PetController",
     "processCreationForm(Owner,Pet,BindingResult,ModelMap)", "lcom"),
]


def method_text(root, rel, cls_name, sig):
    text = (root / rel).read_text(encoding="utf-8")
    lines = text.splitlines()
    tokens = list(javalang.tokenizer.tokenize(text))
    unit = javalang.parse.parse(text)
    package = unit.package.name if unit.package else ""
    types = []
    for decl in unit.types:
        ck_oracle.collect_types(decl, package, types)
    for name, decl in types:
        if name != cls_name:
            continue
        for m in ck_oracle.own_methods(decl):
            if ck_oracle.signature(m) == sig:
                start, end = ck_oracle.method_span(tokens, m)
                return "\n".join(lines[start - 1:end])
    raise KeyError(f"{cls_name}.{sig}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("root", type=pathlib.Path)
    ap.add_argument("oracle_csv", type=pathlib.Path)
    ap.add_argument("out", type=pathlib.Path)
    args = ap.parse_args()

    rows = {(r["class"], r["method"]): r for r in csv.DictReader(open(args.oracle_csv))}
    args.out.mkdir(parents=True, exist_ok=True)
    system = ROLE + "\n\n" + GUIDELINES
    for slug, cls, sig, metric in SELECTION:
        row = rows[(cls, sig)]
        body = method_text(args.root, row["file"], cls, sig)
        user = (f"{INSTRUCTION}\nCode Snippet:\n{body}\n"
                f"Metric: {METRIC_NAMES[metric]} ({INTERPRETATION}): {row[metric]}")
        (args.out / f"{slug}.system.txt").write_bytes(system.encode("utf-8"))
        (args.out / f"{slug}.user.txt").write_bytes(user.encode("utf-8"))
        (args.out / f"{slug}.meta").write_text(f"{cls}.{sig}\n{metric}\n{row[metric]}\n")
    (args.out / "placeholder.txt").write_bytes(PLACEHOLDER.encode("utf-8"))


if __name__ == "__main__":
    main()
