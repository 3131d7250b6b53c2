"""Write the deterministic full-scale synthetic dataset and print its statistics.

Usage: python scripts/make_synthetic_dataset.py [OUT.jsonl]
"""

from __future__ import annotations

import sys

from pragqa.dataset import save_dataset, stats, synthesize_dataset


def main() -> None:
    out = sys.argv[1] if len(sys.argv) > 1 else "synthetic_dataset.jsonl"
    records = synthesize_dataset()
    save_dataset(records, out)
    print(f"wrote {len(records)} records to {out}")
    for source, s in stats(records).items():
        print(f"{source:7s} questions={s.n_questions:4d} inferences={s.n_inferences:5d} "
              f"%false/subjective={s.pct_false_subjective:.1f} %true={s.pct_true:.1f} "
              f"ans_sentences={s.mean_answer_sentences:.1f}")


if __name__ == "__main__":
    main()
