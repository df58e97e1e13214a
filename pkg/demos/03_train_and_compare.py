"""Train all four classifiers on synthetic orthographies and compare them.

Three artificial spelling systems render the same base sentences, so a model
can only tell them apart by orthography, which mirrors the real task.
"""

import time

from lmo_ortho.corpus import class_distribution, stratified_split
from lmo_ortho.evaluation import accuracy_range, evaluate, select_best
from lmo_ortho.pipeline import train_model
from lmo_ortho.synthetic import RULES, synthetic_corpus

for name, rule in RULES.items():
    print(f"{name:<9} {rule}")

corpus = synthetic_corpus(300, seed=0)
print("\n" + class_distribution(corpus).table())
split = stratified_split(corpus, (0.8, 0.1, 0.1), seed=42)

candidates, per_class = [], {}
for kind in ("logreg", "svm", "nb", "rf"):
    for features in (("byte",), ("char",), ("word",)):
        start = time.perf_counter()
        extra = {"n_trees": 30} if kind == "rf" else {}
        model = train_model(kind, split.train, features, **extra)
        model_id = f"{kind}.{'+'.join(features)}"
        _, report = evaluate(model, split.test)
        candidates.append((model_id, model))
        per_class[model_id] = report.per_class_accuracy
        print(f"{model_id:<12} test {100 * report.overall_accuracy:6.2f}%  "
              f"avg class {100 * report.avg_class_accuracy:6.2f}%  ({time.perf_counter() - start:.1f}s)")

print("\nbest on validation:", select_best(candidates, split.valid))
print("\nper-class accuracy range (best, worst, spread):")
for cls, (best, worst, spread) in accuracy_range(per_class).items():
    print(f"  {cls:<9} {best:.3f} {worst:.3f} {spread:.3f}")
