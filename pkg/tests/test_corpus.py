import random

import pytest

from parafact import corpus
from parafact.corpus import LexiconError

from conftest import analyze_one


def test_load_lexicon_entries():
    lex = corpus.load_lexicon("rachat\trachat\tN\tpred\nrachetées\tracheter\tV\tpred\n")
    (entry,) = lex.lookup("rachat")
    assert (entry.lemma, entry.pos, entry.predicative) == ("rachat", "N", True)
    (entry,) = lex.lookup("Rachetées")  # case-folded lookup
    assert entry.lemma == "racheter"


def test_empty_lexicon():
    lex = corpus.load_lexicon("")
    assert lex.lookup("rien") == ()


def test_lexicon_bad_pos():
    with pytest.raises(LexiconError) as err:
        corpus.load_lexicon("a\tb\tZ\n")
    assert "line 1" in str(err.value)


def test_lexicon_ambiguous_surface_keeps_all_entries():
    lex = corpus.load_lexicon("des\tdes\tP\ndes\tun\tD\n")
    assert [e.pos for e in lex.lookup("des")] == ["P", "D"]


def test_forms_index(lexicon):
    assert "rachetées" in lexicon.forms("racheter", "V")
    assert "reprise" not in lexicon.forms("reprendre", "V")
    assert lexicon.forms("c-company", "N") == ("*c-company*",)


def test_normalize_entities_simple(lexicon, stopwords, gazetteer):
    sentence = analyze_one("Vivendi a racheté Universal.", lexicon, stopwords, gazetteer)
    surfaces = [t.surface for t in sentence.tokens]
    assert surfaces == ["*c-company*", "a", "racheté", "*c-company*", "."]
    assert sentence.tokens[0].entity_class == "c-company"
    assert sentence.tokens[0].lemma == "*c-company*"
    assert sentence.tokens[0].plain


def test_normalize_entities_empty_gazetteer(lexicon, stopwords):
    sentence = analyze_one("Vivendi a racheté Universal.", lexicon, stopwords, {})
    assert [t.surface for t in sentence.tokens][0] == "Vivendi"


def test_normalize_entities_longest_match(lexicon, stopwords, gazetteer):
    sentence = analyze_one("Groupe Danone a racheté Universal.", lexicon, stopwords, gazetteer)
    surfaces = [t.surface for t in sentence.tokens]
    assert surfaces == ["*c-company*", "a", "racheté", "*c-company*", "."]
    assert sentence.tokens[0].raw == "Groupe Danone"


def test_analyze_entity_np_chunk(lexicon, stopwords):
    sentence = analyze_one("Cession de *c-company*.", lexicon, stopwords)
    plain = [sentence.tokens[i].surface for i in sentence.plain_indices()]
    assert plain == ["Cession", "*c-company*"]
    assert len(sentence.tokens) == 4
    (chunk,) = sentence.chunks
    assert (chunk.kind, chunk.start, chunk.end) == ("NP", 0, 3)


def test_analyze_np_over_preposition(lexicon, stopwords):
    sentence = analyze_one(
        "Le groupe a annoncé la reprise des activités charter.", lexicon, stopwords
    )
    plain = [sentence.tokens[i].surface for i in sentence.plain_indices()]
    assert plain == ["groupe", "annoncé", "reprise", "activités", "charter"]
    spans = [(c.kind, [t.surface for t in sentence.tokens[c.start : c.end]]) for c in sentence.chunks]
    assert ("NP", ["la", "reprise", "des", "activités", "charter"]) in spans


def test_analyze_verb_cluster_absorbs_bare_complement(lexicon, stopwords):
    sentence = analyze_one("Vivendi veut racheter *c-company*.", lexicon, stopwords)
    vp = [c for c in sentence.chunks if c.kind == "VP"]
    assert len(vp) == 1
    covered = [t.surface for t in sentence.tokens[vp[0].start : vp[0].end]]
    assert covered == ["veut", "racheter", "*c-company*"]


def test_analyze_elision_and_infinitive_chain(lexicon, stopwords):
    sentence = analyze_one("La société envisage d'acquérir des magasins suisses.", lexicon, stopwords)
    surfaces = [t.surface for t in sentence.tokens]
    assert "d'" in surfaces and "acquérir" in surfaces
    vp = [c for c in sentence.chunks if c.kind == "VP"]
    covered = [t.surface for t in sentence.tokens[vp[0].start : vp[0].end]]
    assert covered == ["envisage", "d'", "acquérir", "des", "magasins", "suisses"]


def test_analyze_empty_text(lexicon, stopwords):
    assert corpus.analyze("", lexicon, {}, stopwords) == []


def test_unknown_words_are_plain_x(lexicon, stopwords):
    sentence = analyze_one("Zorglub mange.", lexicon, stopwords)
    token = sentence.tokens[0]
    assert (token.pos, token.plain, token.lemma) == ("X", True, "Zorglub")


def test_punctuation_tokens_are_not_plain(lexicon, stopwords):
    sentence = analyze_one("Vivendi, qui a racheté Universal.", lexicon, stopwords)
    comma = sentence.tokens[1]
    assert comma.surface == ","
    assert not comma.plain and not comma.is_word


def test_round_trip_fixture_docs(lexicon, stopwords, gazetteer, fixtures_dir):
    for _, text in corpus.load_corpus(fixtures_dir / "corpus"):
        sentences = corpus.analyze(text, lexicon, gazetteer, stopwords, doc_id="d")
        assert corpus.reconstruct(sentences) == text


def test_round_trip_random_text(lexicon, stopwords, gazetteer):
    rng = random.Random(99)
    pool = ["rachat", "la", "Vivendi", "d'", "zorg", ",", ".", "!", "des", "  ", "\n", "à", "21"]
    for _ in range(200):
        text = "".join(rng.choice(pool) + rng.choice(["", " ", "  "]) for _ in range(rng.randint(0, 25)))
        sentences = corpus.analyze(text, lexicon, gazetteer, stopwords, doc_id="r")
        if sentences:
            assert corpus.reconstruct(sentences) == text
        else:  # nothing tokenizable: only separators can be lost
            assert text.strip() == ""


def test_plain_words_preserve_order(lexicon, stopwords, corpus_sentences):
    for sentence in corpus_sentences:
        plains = sentence.plain_indices()
        assert plains == sorted(plains)


def test_chunks_disjoint_and_in_bounds(lexicon, stopwords, gazetteer):
    rng = random.Random(4242)
    pool = ["rachat", "la", "le", "des", "activités", "racheter", "veut", "charter", "de", "zorg", ".", ","]
    for _ in range(300):
        text = " ".join(rng.choice(pool) for _ in range(rng.randint(1, 15)))
        for sentence in corpus.analyze(text, lexicon, gazetteer, stopwords, doc_id="r"):
            seen = set()
            for chunk in sentence.chunks:
                assert 0 <= chunk.start < chunk.end <= len(sentence.tokens)
                span = set(range(chunk.start, chunk.end))
                assert not (span & seen)  # pairwise disjoint
                seen |= span


def test_analyze_is_deterministic(lexicon, stopwords, gazetteer, fixtures_dir):
    text = (fixtures_dir / "corpus" / "d1.txt").read_text(encoding="utf-8")
    first = corpus.analyze(text, lexicon, gazetteer, stopwords, doc_id="d1")
    second = corpus.analyze(text, lexicon, gazetteer, stopwords, doc_id="d1")
    assert first == second


def test_load_corpus_orders_by_doc_id(fixtures_dir):
    docs = corpus.load_corpus(fixtures_dir / "corpus")
    assert [d for d, _ in docs] == ["d1", "d2", "d3", "d4", "d5", "d6"]
