"""End-to-end offline demo: baseline vs. assumption-augmented answering.

Builds a toy corpus with the stub backends, runs both pipeline modes on one
question, and prints the bundles plus a small metric report. No network.

Usage: python scripts/run_offline_demo.py
"""

from __future__ import annotations

from pragqa.corpus import Document, chunk_document
from pragqa.evalkit import report, rouge_l
from pragqa.pipeline import Backends, PipelineConfig, QAEngine
from pragqa.retrieval import build_index
from pragqa.stubs import StubCompletion, StubEmbedding, StubRerank

DOCS = [
    ("fever", "Most infant fevers resolve with hydration and rest. Call a pediatrician "
              "for any fever in a baby under three months. Fevers after vaccination are "
              "a sign the immune system is responding. Medication is rarely needed unless "
              "the child is extremely uncomfortable. Keep the child drinking fluids."),
    ("bath", "Fill the basin with water that feels warm but not hot to the inside of "
             "your wrist or elbow. Babies lose heat rapidly and are not as adaptable to "
             "temperature change as adults. Two inches of warm water is enough for a "
             "newborn bath. Never leave a baby unattended in water."),
    ("feeding", "Newborns typically eat every two to three hours. Feeding on demand "
                "supports healthy weight gain. The interval between feedings can "
                "lengthen naturally as the baby grows. Talk to a pediatrician before "
                "changing a newborn's feeding schedule."),
]


def main() -> None:
    passages = []
    for name, text in DOCS:
        doc = Document(id=name, url=f"https://example.org/{name}", source_tag="demo",
                       title=name.title(), text=text)
        passages.extend(chunk_document(doc, chunk_size=12))

    embedder = StubEmbedding(dim=32)
    engine = QAEngine(
        passages=passages,
        index=build_index(passages, embedder.embed),
        backends=Backends(embed=embedder, rerank=StubRerank(),
                          read=StubCompletion(), generate=StubCompletion()),
        config=PipelineConfig(n_retrieve=50, n_question_passages=5),
    )

    question = "Should I give my baby fever medicine after shots?"
    inferences = [
        "Fever after shots always requires medication.",
        "Fever reducers are safe to give before vaccines.",
    ]

    baseline = engine.run_baseline(question, k=len(inferences))
    augmented = engine.run_augmented(question, inferences)

    print("=" * 72)
    print("BASELINE BUNDLE")
    print(baseline.to_json())
    print("=" * 72)
    print("AUGMENTED BUNDLE")
    print(augmented.to_json())

    reference = ("Fever after vaccination is usually a normal immune response. "
                 "Medication is only needed for an extremely uncomfortable child. "
                 "Keep the baby hydrated and call a pediatrician if concerned.")
    rows = {}
    for name, bundle in (("baseline", baseline), ("augmented", augmented)):
        score = rouge_l(bundle.answer_text, reference)
        rows[name] = {
            "ROUGE-L (F1)": [100 * score.f1],
            "ROUGE-L (Recall)": [100 * score.recall],
        }
    print("=" * 72)
    print(report(rows).table)


if __name__ == "__main__":
    main()
