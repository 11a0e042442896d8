"""Parse a polarity-annotated digraph, then walk its feedback structure.

Run:  python3 demos/01_loops_and_polarity.py
"""

from cldforge.dotio import emit_digraph, emit_render_dot, parse_digraph
from cldforge.model import enumerate_loops, exogenous_variables

CAR_MARKET = """
digraph {
"car production" -> "inventory" [arrowhead = vee]
"inventory" -> "market price" [arrowhead = tee]
"market price" -> "car production" [arrowhead = vee]
"market price" -> "retail sales" [arrowhead = tee]
"retail sales" -> "inventory" [arrowhead = tee]
}
"""


def main() -> None:
    diagram, diagnostics = parse_digraph(CAR_MARKET)
    assert not diagnostics

    print("variables:")
    for v in diagram.variables:
        print(f"  {v.raw}")

    print("\nlinks (vee = positive, tee = negative):")
    for lk in diagram.links:
        sign = "+" if lk.polarity.name == "POSITIVE" else "-"
        print(f"  {lk.source.raw} --({sign})--> {lk.target.raw}")

    exo = exogenous_variables(diagram)
    print(f"\nexogenous variables: {[v.raw for v in exo] or 'none'}")

    print("\nfeedback loops:")
    for loop in enumerate_loops(diagram):
        members = " -> ".join(lk.source.raw for lk in loop.links)
        print(f"  [{loop.kind.name.lower():11}] {members} -> ...")

    print("\ncanonical interchange form:")
    print(emit_digraph(diagram))

    print("\nrenderable DOT with loop badges (feed to graphviz):")
    print(emit_render_dot(diagram, annotate_loops=True))


if __name__ == "__main__":
    main()
