"""Line-oriented text formats for machines and MMNs.

Machine format::

    moore
    states <n> initial <q0>
    input <name> <name> ...
    output <name> <name> ...
    state <id> <output-name>
    trans <src> <input-name> <dst>
    end

States ascending, transitions sorted by (src, input symbol id), so the
round trip text -> machine -> text is bit exact.

MMN format: a ``network`` block (nodes, then edges with their alphabets in
declared order) followed by one ``machine`` block per component, in
component declaration order.  Component alphabets are re-derived from the
edge alphabets on load and symbol names are matched against them.
"""

from __future__ import annotations

from .alphabet import Alphabet
from .machine import DetMoore
from .network import Mmn, Network


class FormatError(ValueError):
    pass


def machine_to_text(m: DetMoore) -> str:
    lines = ["moore"]
    lines.append("states %d initial %d" % (m.n_states, m.initial))
    lines.append("input " + " ".join(m.input_alphabet.names()))
    lines.append("output " + " ".join(m.output_alphabet.names()))
    for q in range(m.n_states):
        lines.append("state %d %s" % (q, m.output_alphabet.name(m.outputs[q])))
    for q in range(m.n_states):
        for i in sorted(m.transitions[q]):
            lines.append(
                "trans %d %s %d" % (q, m.input_alphabet.name(i), m.transitions[q][i])
            )
    lines.append("end")
    return "\n".join(lines) + "\n"


def machine_from_text(text: str, input_alphabet: Alphabet | None = None,
                      output_alphabet: Alphabet | None = None) -> DetMoore:
    """Parse a machine; alphabets may be supplied (e.g. edge products) and
    are then only name-checked against the declarations."""
    lines = [ln for ln in (l.strip() for l in text.splitlines()) if ln]
    it = iter(lines)
    if next(it, None) != "moore":
        raise FormatError("expected 'moore' header")
    head = next(it, "").split()
    if len(head) != 4 or head[0] != "states" or head[2] != "initial":
        raise FormatError("bad states line")
    n_states, initial = int(head[1]), int(head[3])
    in_names = _alphabet_line(next(it, ""), "input")
    out_names = _alphabet_line(next(it, ""), "output")
    ia = input_alphabet if input_alphabet is not None else Alphabet(in_names)
    oa = output_alphabet if output_alphabet is not None else Alphabet(out_names)
    if ia.names() != in_names or oa.names() != out_names:
        raise FormatError("alphabet declarations do not match expected alphabets")
    outputs: dict[int, int] = {}
    transitions: list[dict[int, int]] = [dict() for _ in range(n_states)]
    for ln in it:
        parts = ln.split()
        if parts[0] == "state":
            outputs[int(parts[1])] = oa.symbol(parts[2])
        elif parts[0] == "trans":
            src, dst = int(parts[1]), int(parts[3])
            transitions[src][ia.symbol(parts[2])] = dst
        elif parts[0] == "end":
            break
        else:
            raise FormatError("unexpected line %r" % ln)
    if sorted(outputs) != list(range(n_states)):
        raise FormatError("missing state output lines")
    return DetMoore(
        ia, oa, n_states, initial,
        tuple(transitions), tuple(outputs[q] for q in range(n_states)),
    )


def _alphabet_line(line: str, kind: str) -> list[str]:
    parts = line.split()
    if not parts or parts[0] != kind or len(parts) < 2:
        raise FormatError("bad %s alphabet line" % kind)
    return parts[1:]


def mmn_to_text(mmn: Mmn) -> str:
    net = mmn.network
    lines = ["mmn", "network"]
    for name, cls in net.node_class.items():
        lines.append("node %s %s" % (name, cls))
    for e in net.edges:
        names = " ".join(net.edge_alphabet[e].names())
        lines.append("edge %s %s %s" % (e[0], e[1], names))
    for c in mmn.components:
        lines.append("machine %s" % c)
        lines.append(machine_to_text(mmn.machines[c]).rstrip("\n"))
    lines.append("end-mmn")
    return "\n".join(lines) + "\n"


def mmn_from_text(text: str) -> Mmn:
    lines = [ln for ln in (l.strip() for l in text.splitlines()) if ln]
    if not lines or lines[0] != "mmn" or lines[1] != "network":
        raise FormatError("expected 'mmn'/'network' header")
    nodes: list[tuple[str, str]] = []
    edges: list[tuple[str, str, Alphabet]] = []
    k = 2
    while k < len(lines):
        parts = lines[k].split()
        if parts[0] == "node":
            nodes.append((parts[1], parts[2]))
        elif parts[0] == "edge":
            edges.append((parts[1], parts[2], Alphabet(parts[3:])))
        else:
            break
        k += 1
    network = Network(nodes, edges)
    machines: dict[str, DetMoore] = {}
    while k < len(lines) and lines[k].startswith("machine "):
        comp = lines[k].split()[1]
        k += 1
        body = []
        while k < len(lines) and lines[k] != "end":
            body.append(lines[k])
            k += 1
        if k == len(lines):
            raise FormatError("unterminated machine block for %r" % comp)
        body.append("end")
        k += 1
        machines[comp] = machine_from_text(
            "\n".join(body),
            network.component_input_alphabet(comp),
            network.component_output_alphabet(comp),
        )
    if k >= len(lines) or lines[k] != "end-mmn":
        raise FormatError("missing end-mmn")
    return Mmn(network, machines)


def write_mmn(mmn: Mmn, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(mmn_to_text(mmn))


def read_mmn(path: str) -> Mmn:
    with open(path) as fh:
        return mmn_from_text(fh.read())
