import random

import pytest

from parafact import acquisition, corpus
from parafact.acquisition import (
    PatternRow,
    SeedPattern,
    TableError,
    predicativity_check,
)

from conftest import analyze_one
from oracles import oracle_acquire_sentence


def rowset(rows):
    return {(r.schema, r.elt1, r.cat1, r.elt2, r.cat2, round(r.score, 9)) for r in rows}


def test_seed_requires_nonempty_words():
    with pytest.raises(ValueError):
        SeedPattern("", "société", "etq")


def test_predicativity(lexicon):
    assert predicativity_check("racheter", "V", lexicon)
    assert predicativity_check("reprise", "N", lexicon)
    assert not predicativity_check("charter", "A", lexicon)
    assert not predicativity_check("groupe", "N", lexicon)


def test_sentence_with_modifier_and_preposition(net, lexicon, stopwords, seed):
    sentence = analyze_one(
        "Le groupe a annoncé la reprise des activités charter.", lexicon, stopwords
    )
    rows = acquisition.acquire_sentence(seed, sentence, net, 2.0)
    assert rowset(rows) == {("+", "reprise", "N", "activité", "N", 2.5)}


def test_sentence_with_entity_expansion(net, lexicon, stopwords, seed):
    sentence = analyze_one("racheter *c-company*", lexicon, stopwords)
    rows = acquisition.acquire_sentence(seed, sentence, net, 2.0)
    assert rowset(rows) == {("-", "racheter", "V", "c-company", "N", 1.0)}


def test_sentence_without_head_candidate(net, lexicon, stopwords, seed):
    sentence = analyze_one("Le groupe mange des pommes.", lexicon, stopwords)
    assert acquisition.acquire_sentence(seed, sentence, net, 2.0) == []


def test_corpus_yields_exactly_five_rows(net, corpus_sentences, seed):
    table = acquisition.acquire_corpus(seed, corpus_sentences, net, 2.0)
    assert rowset(table) == {
        ("+", "cession", "N", "c-company", "N", 0.0),
        ("-", "racheter", "V", "c-company", "N", 1.0),
        ("-", "acquérir", "V", "magasin", "N", 2.5),
        ("+", "rachat", "N", "activité", "N", 2.5),
        ("+", "reprise", "N", "activité", "N", 2.5),
    }
    assert [r.score for r in table] == sorted(r.score for r in table)


def test_spurious_link_adds_one_irrelevant_row(spurious_net, net, corpus_sentences, seed):
    base = acquisition.acquire_corpus(seed, corpus_sentences, net, 2.0)
    spurious = acquisition.acquire_corpus(seed, corpus_sentences, spurious_net, 2.0)
    extra = rowset(spurious) - rowset(base)
    assert extra == {("-", "renoncer", "V", "acquéreur", "N", 3.0)}


def test_empty_corpus(net, seed):
    assert len(acquisition.acquire_corpus(seed, [], net, 2.0)) == 0


def test_dedup_keeps_minimum_score_and_merges_provenance(net, lexicon, stopwords, gazetteer, seed):
    text = "La cession de Universal est confirmée. La grande cession de Vivendi est confirmée."
    sentences = corpus.analyze(text, lexicon, gazetteer, stopwords, doc_id="x")
    table = acquisition.acquire_corpus(seed, sentences, net, 2.0)
    (row,) = list(table)
    assert row.score == 0.0
    assert len(row.provenance) == 2


def test_seed_self_recovery(net, lexicon, stopwords, seed):
    sentence = analyze_one("La cession de la société est confirmée.", lexicon, stopwords)
    rows = acquisition.acquire_sentence(seed, sentence, net, 2.0)
    assert any(r.score == 0.0 and (r.elt1, r.elt2) == ("cession", "société") for r in rows)


RANDOM_POOL = [
    "rachat", "reprise", "cession", "racheter", "acquérir", "société", "groupe",
    "activités", "magasins", "usine", "*c-company*", "charter", "suisses", "la",
    "le", "les", "des", "de", "du", "d'", "à", "se", "veut", "a", "été", "est",
    "annoncé", "zorg", ",", "acquéreur", "renoncer", "ensemble", "par",
]


def random_sentence(rng, lexicon, stopwords, gazetteer):
    words = [rng.choice(RANDOM_POOL) for _ in range(rng.randint(1, 14))]
    text = " ".join(words) + "."
    return analyze_one(text, lexicon, stopwords, gazetteer)


def test_sentence_acquisition_matches_bruteforce_oracle(net, lexicon, stopwords, gazetteer, seed):
    rng = random.Random(31337)
    for _ in range(300):
        sentence = random_sentence(rng, lexicon, stopwords, gazetteer)
        for threshold in (0.0, 1.0, 2.0):
            got = acquisition.acquire_sentence(seed, sentence, net, threshold)
            want = oracle_acquire_sentence(seed, sentence, net, threshold, lexicon)
            assert rowset(got) == rowset(want)
            assert [r.provenance for r in got] == [r.provenance for r in want]


def test_threshold_monotonicity(net, lexicon, stopwords, gazetteer, seed):
    rng = random.Random(777)
    thresholds = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0]
    for _ in range(100):
        sentence = random_sentence(rng, lexicon, stopwords, gazetteer)
        previous = set()
        for t in thresholds:
            current = {r.key for r in acquisition.acquire_sentence(seed, sentence, net, t)}
            assert previous <= current
            previous = current


def test_score_bound(net, lexicon, stopwords, gazetteer, seed):
    rng = random.Random(2020)
    for _ in range(150):
        sentence = random_sentence(rng, lexicon, stopwords, gazetteer)
        for row in acquisition.acquire_sentence(seed, sentence, net, 2.0):
            assert row.score <= 2 * 2.0


def test_table_round_trip(net, corpus_sentences, seed, tmp_path):
    table = acquisition.acquire_corpus(seed, corpus_sentences, net, 2.0)
    path = tmp_path / "table.tsv"
    acquisition.write_table(table, path)
    text = path.read_text(encoding="utf-8")
    assert text.splitlines()[0] == "\t".join(acquisition.TABLE_HEADER)
    assert "\t0.000000\t" in text  # six-decimal scores
    loaded = acquisition.read_table(path)
    assert rowset(loaded) == rowset(table)
    assert [r.row_id for r in loaded] == [r.row_id for r in table]


def test_table_rejects_duplicates_and_bad_fields():
    header = "\t".join(acquisition.TABLE_HEADER)
    row = "+\ta\tN\tb\tN\t1.000000\te\t$2\tproposed"
    with pytest.raises(TableError):
        acquisition.parse_table(f"{header}\n{row}\n{row}\n")
    with pytest.raises(TableError):
        acquisition.parse_table(f"{header}\n?\ta\tN\tb\tN\t1.0\te\t$2\tproposed\n")
    with pytest.raises(TableError):
        acquisition.parse_table("WRONG\theader\n")


def test_row_ids_depend_only_on_the_key():
    row = PatternRow("+", "reprise", "N", "activité", "N", 2.5, "entreprise_achetee", "$2")
    same_key = PatternRow("-", "reprise", "N", "activité", "N", 0.0, "entreprise_achetee", "$2")
    other_key = PatternRow("+", "reprise", "N", "magasin", "N", 2.5, "entreprise_achetee", "$2")
    assert row.row_id == same_key.row_id
    assert row.row_id != other_key.row_id
