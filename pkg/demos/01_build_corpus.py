"""From a MediaWiki XML dump to a tagged, filtered, split corpus.

A real run streams lmowiki-latest-pages-articles.xml.bz2; here a small
hand-written dump stands in for it so the script runs offline.
"""

import tempfile
from pathlib import Path

from lmo_ortho.corpus import class_distribution, stratified_split, write_jsonl
from lmo_ortho.wiki_ingest import extract_pages, ingest, load_config

DUMP = """<mediawiki>
  <page><title>Milan</title><ns>0</ns><revision><text>{{GrafMIL}}
'''Milan''' l'è 'na cittaa de la [[Lombardia]], la pussee granda del nord.
La cittaa la gh'ha on domm famos in tutt el mond, faa de marmor.
== Storia ==
Milan l'è stada fondada di Insubri, on popol di Celt, tanti secoi fa.
[[Categoria:Cittaa]]</text></revision></page>
  <page><title>Bergum</title><ns>0</ns><revision><text>{{GrafLORUNIF}}
Bèrghem l'è öna cità de la Lombardéa orientàl, sura ol Sère.
La cità ölta la sta sö öna colìna e la gh'à i müre venessiàne.</text></revision></page>
  <page><title>Comm</title><ns>0</ns><revision><text>Comm l'è 'na cittaa in riva al lagh, senza tag de ortografia.</text></revision></page>
  <page><title>Lecch</title><ns>0</ns><redirect title="Lecco"/><revision><text>#REDIRECT [[Lecco]]</text></revision></page>
</mediawiki>"""

tag_map, config = load_config()  # packaged defaults; pass a TOML path to override
print(f"{len(tag_map)} template aliases, min_words={config.min_words}")

result = ingest(extract_pages(DUMP.encode()), tag_map, config)
print(f"\n{result.n_pages} article pages, {result.n_lines} text lines")
print(result.report.to_text())
for s in result.samples:
    print(f"  {s.tag.value:<8} {s.text}")
print(f"untagged lines kept aside for bulk tagging: {result.untagged}")

print("\nclass distribution:")
print(class_distribution(result.samples).table())

split = stratified_split(result.samples, (0.6, 0.2, 0.2), seed=42)
print(f"\nsplit sizes train/valid/test: {split.sizes()}")

out = Path(tempfile.mkdtemp())
for name, part in zip(("train", "valid", "test"), (split.train, split.valid, split.test)):
    write_jsonl(part, out / f"{name}.jsonl")
print(f"written to {out}")
