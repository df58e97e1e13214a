"""Tag unlabelled lines with a saved model and inspect the confidence."""

import tempfile
from pathlib import Path

from lmo_ortho.classifiers import load_model, save_model
from lmo_ortho.evaluation import bulk_classify
from lmo_ortho.pipeline import train_model
from lmo_ortho.synthetic import base_sentences, spell, synthetic_corpus

model = train_model("logreg", synthetic_corpus(200, seed=1), ("byte",))
path = Path(tempfile.mkdtemp()) / "log.byte.model"
save_model(model, path)
header = path.read_bytes().split(b"\n", 1)[0].decode()
print(f"saved {path.stat().st_size} bytes; header: {header}")
model = load_model(path)

# unseen sentences in known orthographies, plus short fragments that carry
# almost no orthographic evidence
lines = [spell(s, o) for s in base_sentences(30, seed=99) for o in ("MILCLASS", "LOCC")]
lines += ["Milan", "1902", "New York", ""]

report = bulk_classify(model, lines)
print("\n" + report.summary())
print(f"MILCLASS+LOCC share {report.share(['MILCLASS', 'LOCC']):.1f}%")

print("\nlowest-confidence lines:")
for text, label, conf in sorted(report.records, key=lambda r: r[2])[:5]:
    print(f"  {conf:.3f} {label:<9} {text!r}")

strict = bulk_classify(model, lines, min_confidence=0.6)
print(f"\nwith min_confidence=0.6: {strict.counts}")
