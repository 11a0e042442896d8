"""Score an imperfect generated diagram against expert ground truth.

The generated variant below flips one polarity and drops one link from the
car-market golden, which separates the three scoring layers: strict link
matching punishes both defects, lenient matching punishes only the dropped
link, and polarity accuracy isolates the flip.

Run:  python3 demos/03_score_a_generation.py
"""

from cldforge.corpus import bundled_goldens
from cldforge.dotio import parse_digraph
from cldforge.evaluate import evaluate

GENERATED = """
digraph {
"car production" -> "inventory" [arrowhead = vee]
"inventory" -> "market price" [arrowhead = tee]
"market price" -> "car production" [arrowhead = vee]
"market price" -> "retail sales" [arrowhead = vee]
}
"""


def show(label: str, scores) -> None:
    print(f"  {label:<13} precision {scores.precision:.3f}  "
          f"recall {scores.recall:.3f}  f1 {scores.f1:.3f}")


def main() -> None:
    truth = bundled_goldens().get("new-car-inventory").ground_truth
    generated, _ = parse_digraph(GENERATED)

    report = evaluate(generated, truth, threshold=0.8)

    print("scores at matching threshold 0.8:")
    show("node", report.node)
    show("link_strict", report.link_strict)
    show("link_lenient", report.link_lenient)
    print(f"  polarity_accuracy {report.polarity_accuracy:.3f}")

    def fmt(loops):
        return [f"{length}-{kind.value}" for length, kind in loops]

    print(f"\n  loops generated: {fmt(report.loops_generated)}")
    print(f"  loops truth:     {fmt(report.loops_truth)}")
    print(f"  loop count match: {report.loop_count_match}")

    print("\nvariable alignment (generated ~ truth, similarity):")
    for g, t, sim in report.matching.pairs:
        print(f"  {g.raw!r} ~ {t.raw!r}  ({sim:.2f})")


if __name__ == "__main__":
    main()
