#!/usr/bin/env python3
"""Reference metrics for a Java tree, computed independently of the C++ core.

Parses with javalang and emits one CSV row per concrete method:
file,class,method,cc,loc,lcom

CC counts if/for/while/do/case (not default)/catch/ternary/&&/|| inside the
method, LOC counts non-blank non-comment lines of the declaration (first
annotation through closing brace), LCOM is the class-level LCOM1 over the
class's concrete methods and constructors.
"""

import argparse
import csv
import itertools
import pathlib
import sys

import javalang
from javalang import tree as T

EXCLUDED_DIRS = {"target", "build", "test"}


def java_files(root):
    for path in sorted(root.rglob("*.java")):
        rel = path.relative_to(root)
        if EXCLUDED_DIRS.intersection(rel.parts[:-1]):
            continue
        yield rel


def type_text(t):
    if t is None:
        return "void"
    parts = [t.name]
    sub = getattr(t, "sub_type", None)
    while sub is not None:
        parts.append(sub.name)
        sub = getattr(sub, "sub_type", None)
    return ".".join(parts) + "[]" * len(t.dimensions or [])


def signature(node):
    params = []
    for p in node.parameters:
        text = type_text(p.type)
        if p.varargs:
            text += "..."
        params.append(text)
    return f"{node.name}({','.join(params)})"


# --- spans -----------------------------------------------------------------

def token_index(tokens, position):
    for i, tok in enumerate(tokens):
        if (tok.position.line, tok.position.column) >= (position.line, position.column):
            return i
    raise ValueError("position past end of file")


def match(tokens, i, open_, close):
    depth = 0
    for j in range(i, len(tokens)):
        if tokens[j].value == open_:
            depth += 1
        elif tokens[j].value == close:
            depth -= 1
            if depth == 0:
                return j
    raise ValueError("unbalanced " + open_)


def method_span(tokens, node):
    i = token_index(tokens, node.position)
    while not (tokens[i].value == node.name and tokens[i + 1].value == "("):
        i += 1
    close_paren = match(tokens, i + 1, "(", ")")
    brace = close_paren + 1
    while tokens[brace].value != "{":
        brace += 1
    end = tokens[match(tokens, brace, "{", "}")].position.line
    start = min([node.position.line] + [a.position.line for a in node.annotations if a.position])
    return start, end


# --- LOC -------------------------------------------------------------------

def code_lines(lines):
    """Per-line flag: True when the line holds anything besides whitespace and comments."""
    flags = []
    in_block = False
    in_text_block = False
    for line in lines:
        has_code = False
        i = 0
        n = len(line)
        while i < n:
            if in_block:
                end = line.find("*/", i)
                if end < 0:
                    i = n
                else:
                    in_block = False
                    i = end + 2
                continue
            if in_text_block:
                has_code = True
                end = line.find('"""', i)
                if end < 0:
                    i = n
                else:
                    in_text_block = False
                    i = end + 3
                continue
            c = line[i]
            if line.startswith("//", i):
                break
            if line.startswith("/*", i):
                in_block = True
                i += 2
                continue
            if line.startswith('"""', i):
                in_text_block = True
                has_code = True
                i += 3
                continue
            if c in "\"'":
                has_code = True
                i += 1
                while i < n and line[i] != c:
                    i += 2 if line[i] == "\\" else 1
                i += 1
                continue
            if not c.isspace():
                has_code = True
            i += 1
        flags.append(has_code)
    return flags


# --- CC --------------------------------------------------------------------

DECISION_NODES = (T.IfStatement, T.ForStatement, T.WhileStatement, T.DoStatement,
                  T.CatchClause, T.TernaryExpression)


def cyclomatic(node):
    cc = 1
    for _, n in node.filter(T.Node):
        if isinstance(n, DECISION_NODES):
            cc += 1
        elif isinstance(n, T.SwitchStatementCase):
            cc += sum(1 for label in n.case if label != "default")
        elif isinstance(n, T.BinaryOperation) and n.operator in ("&&", "||"):
            cc += 1
    return cc


# --- LCOM ------------------------------------------------------------------

def declared_names(node):
    names = set(p.name for p in node.parameters)
    for _, n in node.filter(T.VariableDeclarator):
        names.add(n.name)
    for _, n in node.filter(T.FormalParameter):
        names.add(n.name)
    for _, n in node.filter(T.CatchClauseParameter):
        names.add(n.name)
    for _, n in node.filter(T.LambdaExpression):
        for p in n.parameters:
            name = getattr(p, "name", None) or getattr(p, "member", None)
            if name:
                names.add(name)
    return names


def accessed_fields(node, fields):
    locals_ = declared_names(node)
    used = set()
    for _, n in node.filter(T.This):
        sel = n.selectors or []
        if sel and isinstance(sel[0], T.MemberReference) and sel[0].member in fields:
            used.add(sel[0].member)
    for _, n in node.filter(T.MemberReference):
        if not n.qualifier and n.member in fields and n.member not in locals_:
            used.add(n.member)
    for _, n in node.filter(T.MethodInvocation):
        if n.qualifier and n.qualifier in fields and n.qualifier not in locals_:
            used.add(n.qualifier)
    for _, n in node.filter(T.Assignment):
        target = n.expressionl
        if isinstance(target, T.MemberReference) and not target.qualifier and target.member in fields \
                and target.member not in locals_:
            used.add(target.member)
    return used


def lcom1(access_sets):
    p = q = 0
    for a, b in itertools.combinations(access_sets, 2):
        if a & b:
            q += 1
        else:
            p += 1
    return max(p - q, 0)


# --- driver ----------------------------------------------------------------

TYPE_DECLS = (T.ClassDeclaration, T.InterfaceDeclaration, T.EnumDeclaration)


def collect_types(decl, prefix, out):
    name = f"{prefix}.{decl.name}" if prefix else decl.name
    out.append((name, decl))
    for member in decl.body or []:
        if isinstance(member, TYPE_DECLS):
            collect_types(member, name, out)


def own_methods(decl):
    """Concrete methods and constructors of decl, plus methods of anonymous classes in its bodies."""
    result = []
    for member in decl.body or []:
        if isinstance(member, (T.MethodDeclaration, T.ConstructorDeclaration)) and member.body is not None:
            result.append(member)
            for _, creator in member.filter(T.ClassCreator):
                for inner in creator.body or []:
                    if isinstance(inner, T.MethodDeclaration) and inner.body is not None:
                        result.append(inner)
    return result


def analyze_file(root, rel):
    text = (root / rel).read_text(encoding="utf-8", errors="replace")
    lines = text.splitlines()
    flags = code_lines(lines)
    tokens = list(javalang.tokenizer.tokenize(text))
    unit = javalang.parse.parse(text)
    package = unit.package.name if unit.package else ""

    types = []
    for decl in unit.types:
        collect_types(decl, package, types)

    rows = []
    for cls_name, decl in types:
        methods = own_methods(decl)
        if not methods:
            continue
        fields = set()
        for member in decl.body or []:
            if isinstance(member, T.FieldDeclaration):
                fields.update(d.name for d in member.declarators)
        lcom = lcom1([accessed_fields(m, fields) for m in methods])
        seen = {}
        for m in methods:
            sig = signature(m)
            seen[sig] = seen.get(sig, 0) + 1
            if seen[sig] > 1:
                sig = f"{sig}${seen[sig] - 1}"
            start, end = method_span(tokens, m)
            loc = sum(flags[start - 1:end])
            rows.append((rel.as_posix(), cls_name, sig, cyclomatic(m), loc, lcom))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("root", type=pathlib.Path)
    ap.add_argument("-o", "--output", type=pathlib.Path)
    args = ap.parse_args(argv)

    rows = []
    for rel in java_files(args.root):
        rows.extend(analyze_file(args.root, rel))
    rows.sort(key=lambda r: (r[1], r[2]))

    out = open(args.output, "w", newline="") if args.output else sys.stdout
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["file", "class", "method", "cc", "loc", "lcom"])
    w.writerows(rows)
    if args.output:
        out.close()


if __name__ == "__main__":
    main()
