"""Acceptance criteria, one test per criterion.

Criteria 1-5 reproduce published figures and need the released corpus: set
LMO_ORTHO_DATA to a directory holding train.jsonl, valid.jsonl, test.jsonl and
(for criterion 5) untagged.jsonl. Without it they skip. Criteria 6-12 run on
generated data. Each test records a PASS/FAIL line shown in the terminal
summary.
"""

import os
import time
from collections import Counter
from pathlib import Path

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from lmo_ortho.classifiers import (
    balanced_class_weights,
    dumps,
    load_model,
    logreg_objective,
    save_model,
    train_logreg,
    train_nb,
    train_rf,
    train_svm,
)
from lmo_ortho.corpus import OrthographyClass, Sample, load_jsonl, stratified_split
from lmo_ortho.evaluation import bulk_classify, evaluate
from lmo_ortho.features import NgramConfig, fit_union, fit_vectorizer
from lmo_ortho.pipeline import train_model
from lmo_ortho.synthetic import synthetic_corpus
from lmo_ortho.wiki_ingest import FilterConfig, filter_lines

from .conftest import record_acceptance

DATA = os.environ.get("LMO_ORTHO_DATA")
MINORITY = ["SL", "NOL", "CRES", "BREMOD", "BERGDUC"]


def _check(criterion, ok, detail):
    record_acceptance(criterion, ok, detail)
    assert ok, detail


# ---------------------------------------------------------------------------
# reproduction of published figures


@pytest.fixture(scope="module")
def released():
    if not DATA:
        for n in range(1, 6):
            record_acceptance(n, None, "released corpus unavailable (LMO_ORTHO_DATA not set)")
        pytest.skip("released corpus unavailable: set LMO_ORTHO_DATA to its directory")
    root = Path(DATA)
    parts = {name: load_jsonl(root / f"{name}.jsonl") for name in ("train", "valid", "test")}
    untagged = root / "untagged.jsonl"
    parts["untagged"] = [s.text for s in load_jsonl(untagged)] if untagged.exists() else None
    return parts


@pytest.fixture(scope="module")
def released_models(released):
    out, timing = {}, {}
    for key, kind, feats in [("svm_all", "svm", ("byte", "char", "word")), ("log_byte", "logreg", ("byte",)),
                             ("svm_byte", "svm", ("byte",)), ("nb_byte", "nb", ("byte",))]:
        start = time.perf_counter()
        model = train_model(kind, released["train"], feats)
        cm, report = evaluate(model, released["test"])
        timing[key] = time.perf_counter() - start
        out[key] = (model, cm, report)
    return out, timing


def test_c1_svm_all_features(released_models):
    models, timing = released_models
    _, _, r = models["svm_all"]
    acc = 100 * r.overall_accuracy
    ok = abs(acc - 96.06) <= 2.0 and timing["svm_all"] < 600
    _check(1, ok, f"SVM byte+char+word overall {acc:.2f} (target 96.06 +/- 2.0), {timing['svm_all']:.0f}s")


def test_c2_logreg_byte(released_models):
    _, _, r = released_models[0]["log_byte"]
    acc, avg = 100 * r.overall_accuracy, 100 * r.avg_class_accuracy
    ok = abs(acc - 93.38) <= 2.0 and abs(avg - 85.78) <= 5.0
    _check(2, ok, f"logreg byte overall {acc:.2f} (93.38 +/- 2), avg class {avg:.2f} (85.78 +/- 5)")


def test_c3_nb_minority_collapse(released_models):
    _, _, r = released_models[0]["nb_byte"]
    accs = {c: 100 * r.per_class_accuracy.get(c, 0.0) for c in MINORITY}
    ok = all(a <= 20.0 for a in accs.values())
    _check(3, ok, "NB byte minority accuracies " + ", ".join(f"{c}={a:.1f}" for c, a in accs.items()))


def test_c4_top_error_pair(released_models):
    pairs = []
    for key in ("svm_all", "log_byte", "svm_byte"):
        errors = released_models[0][key][1].error_pairs()
        if not errors:
            pairs.append(f"{key}:no errors")
            continue
        top = errors[0]
        pairs.append(f"{key}:{top[0]}->{top[1]}")
        if {top[0], top[1]} != {"LOCC", "MILCLASS"}:
            _check(4, False, "top error pairs " + ", ".join(pairs))
    _check(4, True, "top error pairs " + ", ".join(pairs))


def test_c5_bulk_untagged(released, released_models):
    if released["untagged"] is None:
        record_acceptance(5, None, "untagged.jsonl missing from LMO_ORTHO_DATA")
        pytest.skip("untagged.jsonl missing")
    model = released_models[0]["log_byte"][0]
    report = bulk_classify(model, released["untagged"])
    share = report.share(["MILCLASS", "LOCC"])
    ok = share >= 70.0 and 0.25 <= report.mean_confidence <= 0.45
    _check(5, ok, f"MILCLASS+LOCC {share:.1f}% (>= 70), mean confidence {report.mean_confidence:.3f} in [0.25, 0.45]")


# ---------------------------------------------------------------------------
# property-based acceptance


def _fd_rel_error(rng):
    n, k, d = int(rng.integers(2, 31)), int(rng.integers(2, 5)), int(rng.integers(1, 11))
    X = sp.csr_matrix(rng.normal(size=(n, d)) * (rng.random((n, d)) < 0.7))
    yi = rng.integers(0, k, n)
    cw = balanced_class_weights(yi.tolist())
    w = np.array([cw[c] for c in yi])
    Y = np.eye(k)[yi]
    params = rng.normal(scale=0.3, size=k * (d + 1))
    l2 = float(rng.uniform(0.0, 2.0))
    _, grad = logreg_objective(params, X, Y, w, l2)
    h = 1e-6
    num = np.array([
        (logreg_objective(params + h * e, X, Y, w, l2)[0] - logreg_objective(params - h * e, X, Y, w, l2)[0]) / (2 * h)
        for e in np.eye(params.size)
    ])
    return np.linalg.norm(grad - num) / max(np.linalg.norm(num), 1e-12)


def test_c6_gradient_oracle():
    rng = np.random.default_rng(2024)
    worst = max(_fd_rel_error(rng) for _ in range(20))
    _check(6, worst <= 1e-5, f"max relative gradient error {worst:.2e} over 20 instances (<= 1e-5)")


def test_c7_nb_oracle():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(40):
        n, d, k = int(rng.integers(1, 30)), int(rng.integers(1, 21)), int(rng.integers(1, 5))
        X = rng.random((n, d)) * (rng.random((n, d)) < 0.5)
        y = [str(v) for v in rng.integers(0, k, n)]
        alpha = float(rng.uniform(0.1, 2.0))
        m = train_nb(X, y, alpha=alpha)
        probe = rng.random((4, d))
        for row, x in zip(m.decision_scores(probe), probe):
            for ci, c in enumerate(m.classes):
                idx = [i for i in range(n) if y[i] == c]
                counts = X[idx].sum(axis=0)
                log_theta = np.log((counts + alpha) / (counts.sum() + alpha * d))
                expect = np.log(len(idx) / n) + float(x @ log_theta)
                worst = max(worst, abs(row[ci] - expect))
    _check(7, worst <= 1e-9, f"max NB score deviation {worst:.1e} (<= 1e-9)")


def test_c8_tfidf_fixture_and_union_blocks():
    v = fit_vectorizer(["a b", "a c"], NgramConfig("word", 1, 1))
    x = v.transform("a b")
    idf_b = np.log(3 / 2) + 1
    norm = np.sqrt(1 + idf_b**2)
    fixture_err = max(abs(v.idf[0] - 1.0), abs(v.idf[1] - idf_b),
                      abs(x.values[0] - 1 / norm), abs(x.values[1] - idf_b / norm))
    docs = ["El vent el ciapa la strada", "la strada de cà", "Cà de vent növ"]
    u = fit_union(docs, [NgramConfig(a) for a in ("byte", "char", "word")])
    blocks_equal = all(
        np.array_equal(u.transform(t).to_dense()[u.block(i)], m.transform(t).to_dense())
        for t in docs + ["vent", ""] for i, m in enumerate(u.members)
    )
    ok = fixture_err <= 1e-9 and blocks_equal
    _check(8, ok, f"fixture max error {fixture_err:.1e} (<= 1e-9), union blocks equal: {blocks_equal}")


def test_c9_split_properties():
    rng = np.random.default_rng(9)
    tags = list(OrthographyClass.taggable())
    worst, deterministic = 0.0, True
    for _ in range(100):
        counts = {tags[i]: int(rng.integers(1, 80)) for i in rng.choice(9, int(rng.integers(1, 10)), replace=False)}
        samples = [Sample(f"{t.value} {j}", t) for t, n in counts.items() for j in range(n)]
        rng.shuffle(samples)
        seed = int(rng.integers(0, 2**31))
        split = stratified_split(samples, (0.8, 0.1, 0.1), seed)
        for part, r in zip((split.train, split.valid, split.test), (0.8, 0.1, 0.1)):
            got = Counter(s.tag for s in part)
            worst = max(worst, max(abs(got.get(t, 0) - r * n) for t, n in counts.items()))
        again = stratified_split(samples, (0.8, 0.1, 0.1), seed)
        deterministic &= all(np.array_equal(a, b) for a, b in zip(split.indices, again.indices))
    ok = worst <= 1 + 1e-9 and deterministic
    _check(9, ok, f"max per-class deviation {worst:.2f} samples over 100 corpora (<= 1), deterministic: {deterministic}")


def test_c10_synthetic_orthographies():
    start = time.perf_counter()
    split = stratified_split(synthetic_corpus(300, seed=0), (0.8, 0.1, 0.1), 42)
    log_acc = evaluate(train_model("logreg", split.train, ("char",)), split.test)[1].overall_accuracy
    nb_acc = evaluate(train_model("nb", split.train, ("char",)), split.test)[1].overall_accuracy
    elapsed = time.perf_counter() - start
    ok = log_acc >= 0.99 and nb_acc > 0.95 and elapsed < 30
    _check(10, ok, f"logreg-char {100 * log_acc:.2f}% (>= 99), NB {100 * nb_acc:.2f}% (> 95), {elapsed:.1f}s (< 30)")


def test_c11_model_round_trip(tmp_path):
    docs = [s.text for s in synthetic_corpus(20, seed=3)]
    y = [s.tag.value for s in synthetic_corpus(20, seed=3)]
    vec = fit_vectorizer(docs, NgramConfig("byte"))
    X = vec.transform_many(docs)
    models = [train_logreg(X, y, feature_space=vec), train_svm(X, y, feature_space=vec),
              train_nb(X, y, feature_space=vec), train_rf(X, y, n_trees=10, seed=4, feature_space=vec)]
    rng = np.random.default_rng(11)
    alphabet = list("abcdefghilmnoprstuvzöüàè .")
    probes = ["".join(rng.choice(alphabet, int(rng.integers(0, 60)))) for _ in range(100)]
    identical = True
    for m in models:
        path = tmp_path / f"{m.kind}.model"
        save_model(m, path)
        back = load_model(path)
        a, b = m.predict_texts(probes), back.predict_texts(probes)
        identical &= all(p.label == q.label and np.array_equal(p.scores, q.scores) for p, q in zip(a, b))
        identical &= dumps(back) == dumps(m)
    _check(11, identical, f"4 model kinds x 100 inputs, bit-exact after reload: {identical}")


_FUZZ_FAILURES = []


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.text(alphabet="abcdeöü'лж 0123", max_size=40),
            st.sampled_from([OrthographyClass.MILCLASS, OrthographyClass.LOCC, OrthographyClass.NO_TAG]),
        ),
        max_size=50,
    ),
    st.booleans(),
)
def _fuzz_filter(lines, dedup):
    config = FilterConfig(min_words=2, dedup=dedup, boilerplate_patterns=(r"^\d+ ",),
                          stoplists={"x": ["ab", "cd"]}, stoplist_threshold=0.5)
    kept, report = filter_lines(lines, config)
    again, report2 = filter_lines([(s.text, s.tag) for s in kept], config)
    if report.total != len(lines) or report.kept != len(kept):
        _FUZZ_FAILURES.append(("accounting", lines))
    if again != kept or report2.kept != len(kept):
        _FUZZ_FAILURES.append(("idempotence", lines))


def test_c12_filter_idempotence_and_accounting():
    _FUZZ_FAILURES.clear()
    _fuzz_filter()
    ok = not _FUZZ_FAILURES
    _check(12, ok, f"200 fuzzed line sets, violations: {len(_FUZZ_FAILURES)}")
