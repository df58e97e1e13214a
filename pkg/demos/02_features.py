"""What the byte, char and word n-gram spaces look like for Lombard text."""

from lmo_ortho.features import NgramConfig, fit_union, fit_vectorizer, tokenize

lines = [
    "Sera settada in terra col coo in man, e i gombed sui genœucc",
    "Sera setada in tera cul coo in man, e i gumbed süi genögg",
    "S'era setada in terra col coo in man, e i gombet sui sgenoeugg",
]

# byte n-grams see the two UTF-8 bytes of "ü" separately; char n-grams do not
for analyzer in ("byte", "char", "word"):
    grams = tokenize("süi genögg", NgramConfig(analyzer, 1, 2))
    print(f"{analyzer:<5} {len(grams):>3} distinct 1-2 grams, e.g. {sorted(grams, key=str)[:6]}")

# a two-document corpus small enough to check by hand:
# idf(a) = ln(3/3) + 1 = 1, idf(b) = ln(3/2) + 1
v = fit_vectorizer(["a b", "a c"], NgramConfig("word", 1, 1))
print("\nvocabulary", v.terms, "idf", v.idf.round(6))
print("tf-idf of 'a b':", v.transform("a b").to_dense().round(6))

# one vectorizer per analyzer, each block L2-normalised, concatenated
union = fit_union(lines, [NgramConfig(a) for a in ("byte", "char", "word")])
print(f"\nunion dimension {union.dim} = " + " + ".join(str(m.dim) for m in union.members))
x = union.transform(lines[1])
for i, m in enumerate(union.members):
    block = x.to_dense()[union.block(i)]
    print(f"  {m.config.analyzer:<5} block norm {(block ** 2).sum() ** 0.5:.6f}")
