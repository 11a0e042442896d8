"""Run the two-stage generation pipeline offline against recorded fixtures.

The mock provider replays completions keyed by prompt hash, so the exact
prompts the strategies build are exercised without any network access.
Fixtures seeded from the bundled golden corpus script each item's own
ground truth as the "model" answer.

Run:  python3 demos/02_mock_pipeline.py
"""

import tempfile

from cldforge.client import MockProvider, run_pipeline, write_golden_fixtures
from cldforge.corpus import bundled_goldens
from cldforge.dotio import emit_digraph
from cldforge.prompting import Strategy


def main() -> None:
    corpus = bundled_goldens()
    item = corpus.get("rabbit-population")

    with tempfile.TemporaryDirectory() as fixture_dir:
        count = write_golden_fixtures(fixture_dir, corpus, k=3)
        print(f"seeded {count} prompt fixtures in {fixture_dir}\n")

        record = run_pipeline(
            MockProvider(fixture_dir), Strategy.TWO_STAGE, item.dh, corpus, k=3)

    for i, (prompt, completion) in enumerate(record.stage_transcripts, start=1):
        print(f"--- stage {i} prompt ({len(prompt)} chars) ---")
        print(prompt[:240] + ("..." if len(prompt) > 240 else ""))
        print(f"--- stage {i} completion ---")
        print(completion)
        print()

    assert record.diagram is not None
    print("parsed diagram:")
    print(emit_digraph(record.diagram))
    print("\nround-trips to the golden ground truth:",
          record.diagram == item.ground_truth)


if __name__ == "__main__":
    main()
