"""Text formats: instance files, DIMACS CNF and colored-graph edge lists.

Instance grammar (UTF-8, line oriented, ``#`` starts a comment)::

    agents 1 2 3 4
    prefs 1: (2 3) 4
    prefs 2: 1 3

An entry is a bare name (singleton tie group) or ``( names )`` (tie group);
groups appear in strictly decreasing preference.
"""

import re

from .errors import InstanceFormatError
from .logger import get_logger
from .model import Matching, Profile
from .reductions import CnfFormula, ColoredGraph

logger = get_logger(__name__)

_HEADER = re.compile(r"^#\s*([A-Za-z_][\w-]*)\s*=\s*(.*?)\s*$")
_RESERVED = set("()#:")


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _tokenize_entries(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _parse_entries(tokens: list[str], line_no: int, owner: str) -> list[list[str]]:
    groups: list[list[str]] = []
    current: list[str] | None = None
    for token in tokens:
        if token == "(":
            if current is not None:
                raise InstanceFormatError("nested '(' in tie group", line_no, owner)
            current = []
        elif token == ")":
            if current is None:
                raise InstanceFormatError("unmatched ')'", line_no, owner)
            if not current:
                raise InstanceFormatError("empty tie group", line_no, owner)
            groups.append(current)
            current = None
        elif current is not None:
            current.append(token)
        else:
            groups.append([token])
    if current is not None:
        raise InstanceFormatError("unterminated tie group", line_no, owner)
    return groups


def parse_instance(text: str) -> Profile:
    """Parse an instance file into a validated Profile.

    Raises:
        InstanceFormatError: with the offending line and agent
    """
    names: list[str] | None = None
    agents_line = 0
    entries: dict[str, list[list[str]]] = {}
    lines_of: dict[str, int] = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()

        if keyword == "agents":
            if names is not None:
                raise InstanceFormatError("duplicate 'agents' line", line_no)
            names = rest.split()
            agents_line = line_no
            if len(set(names)) != len(names):
                dup = next(x for x in names if names.count(x) > 1)
                raise InstanceFormatError("agent declared twice", line_no, dup)
            continue

        if keyword == "prefs":
            if names is None:
                raise InstanceFormatError("'prefs' before 'agents'", line_no)
            body = line[len("prefs"):].strip()
            owner, sep, listed = body.partition(":")
            owner = owner.strip()
            if not sep or not owner:
                raise InstanceFormatError("expected 'prefs <name>: <entries>'", line_no)
            if owner not in names:
                raise InstanceFormatError("unknown agent", line_no, owner)
            if owner in entries:
                raise InstanceFormatError("preferences given twice", line_no, owner)
            groups = _parse_entries(_tokenize_entries(listed), line_no, owner)
            seen: set[str] = set()
            for group in groups:
                for name in group:
                    if name not in names:
                        raise InstanceFormatError(f"lists unknown agent '{name}'", line_no, owner)
                    if name == owner:
                        raise InstanceFormatError("lists itself", line_no, owner)
                    if name in seen:
                        raise InstanceFormatError(f"lists '{name}' twice", line_no, owner)
                    seen.add(name)
            entries[owner] = groups
            lines_of[owner] = line_no
            continue

        raise InstanceFormatError(f"unknown keyword '{keyword}'", line_no)

    if names is None:
        raise InstanceFormatError("missing 'agents' line")

    for name in names:
        if not entries.get(name):
            raise InstanceFormatError("empty preference list", lines_of.get(name, agents_line), name)

    listed_by = {name: {x for group in entries[name] for x in group} for name in names}
    for name in names:
        for other in sorted(listed_by[name], key=names.index):
            if name not in listed_by[other]:
                raise InstanceFormatError(
                    f"lists '{other}' but '{other}' does not list it back",
                    lines_of[name],
                    name,
                )

    return Profile.from_named(names, {name: entries[name] for name in names})


def read_header(text: str) -> dict[str, str]:
    """``# key = value`` comment lines before the first statement."""
    header: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if not line.startswith("#"):
            break
        match = _HEADER.match(line)
        if match:
            header[match.group(1)] = match.group(2)
    return header


def _check_name(name: str) -> None:
    if not name or any(ch.isspace() or ch in _RESERVED for ch in name):
        raise InstanceFormatError("agent name cannot be written to an instance file", agent=name)


def serialize_instance(profile: Profile, header: dict[str, object] | None = None) -> str:
    """Canonical text form; ``parse_instance`` inverts it."""
    for name in profile.names:
        _check_name(name)
    out = []
    for key, value in (header or {}).items():
        out.append(f"# {key} = {value}")
    out.append("agents " + " ".join(profile.names))
    for i, groups in enumerate(profile.lists):
        rendered = []
        for group in groups:
            if len(group) == 1:
                rendered.append(profile.names[group[0]])
            else:
                rendered.append("(" + " ".join(profile.names[j] for j in group) + ")")
        out.append(f"prefs {profile.names[i]}: " + " ".join(rendered))
    return "\n".join(out) + "\n"


def format_matching(profile: Profile, m: Matching) -> list[list[str]]:
    """Matching as sorted ``[name, name]`` pairs."""
    return [profile.pair_names(e) for e in sorted(m)]


def parse_dimacs(text: str) -> CnfFormula:
    """Parse a DIMACS CNF file (``c`` comments, ``p cnf`` header, ``0``-terminated clauses)."""
    num_vars: int | None = None
    declared_clauses = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InstanceFormatError("expected 'p cnf <variables> <clauses>'", line_no)
            try:
                num_vars, declared_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise InstanceFormatError("non-integer in problem line", line_no)
            continue
        if num_vars is None:
            raise InstanceFormatError("clause before problem line", line_no)
        for token in line.split():
            try:
                literal = int(token)
            except ValueError:
                raise InstanceFormatError(f"bad literal '{token}'", line_no)
            if literal == 0:
                clauses.append(tuple(current))
                current = []
            elif abs(literal) > num_vars:
                raise InstanceFormatError(f"literal {literal} out of range", line_no)
            else:
                current.append(literal)

    if num_vars is None:
        raise InstanceFormatError("missing problem line")
    if current:
        clauses.append(tuple(current))
    if declared_clauses is not None and declared_clauses != len(clauses):
        logger.warning(f"DIMACS header declares {declared_clauses} clauses, found {len(clauses)}")
    return CnfFormula(num_vars, tuple(clauses))


def parse_graph(text: str) -> ColoredGraph:
    """Parse ``classes k`` / ``class j names`` / ``vertices names`` / ``edge u v`` lines."""
    declared = None
    classes: dict[int, list[str]] = {}
    edges: list[tuple[str, str]] = []
    edge_lines: list[int] = []
    owner: dict[str, int] = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        parts = line.split()
        keyword = parts[0]
        if keyword == "classes":
            if len(parts) != 2 or not parts[1].isdigit():
                raise InstanceFormatError("expected 'classes <k>'", line_no)
            declared = int(parts[1])
        elif keyword in ("class", "vertices"):
            if keyword == "class":
                if len(parts) < 2 or not parts[1].isdigit():
                    raise InstanceFormatError("expected 'class <j> <names>'", line_no)
                j, members = int(parts[1]), parts[2:]
            else:
                j, members = 1, parts[1:]
            if j in classes:
                raise InstanceFormatError(f"class {j} given twice", line_no)
            for v in members:
                if v in owner:
                    raise InstanceFormatError("vertex listed twice", line_no, v)
                owner[v] = j
            classes[j] = members
        elif keyword == "edge":
            if len(parts) != 3:
                raise InstanceFormatError("expected 'edge <u> <v>'", line_no)
            edges.append((parts[1], parts[2]))
            edge_lines.append(line_no)
        else:
            raise InstanceFormatError(f"unknown keyword '{keyword}'", line_no)

    for (u, v), line_no in zip(edges, edge_lines):
        for x in (u, v):
            if x not in owner:
                raise InstanceFormatError("edge uses unknown vertex", line_no, x)
        if u == v:
            raise InstanceFormatError("self-loop", line_no, u)

    k = declared if declared is not None else len(classes)
    if sorted(classes) != list(range(1, k + 1)):
        raise InstanceFormatError(f"expected classes numbered 1..{k}")
    return ColoredGraph(tuple(tuple(classes[j]) for j in range(1, k + 1)), tuple(edges))
