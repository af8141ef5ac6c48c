from pathlib import Path

import pytest

from parafact import acquisition, corpus, metagraph, semnet

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def net():
    return semnet.load_net_file(FIXTURES / "acq-net.net")


@pytest.fixture(scope="session")
def spurious_net():
    return semnet.load_net_file(FIXTURES / "acq-net-spurious.net")


@pytest.fixture(scope="session")
def lexicon():
    return corpus.load_lexicon_file(FIXTURES / "lexicon.tsv")


@pytest.fixture(scope="session")
def stopwords():
    return corpus.load_stopwords((FIXTURES / "stopwords.txt").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def gazetteer():
    return corpus.load_gazetteer((FIXTURES / "gazetteer.tsv").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def metas():
    return metagraph.parse_metagraphs((FIXTURES / "metagraphs.mg").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def corpus_sentences(lexicon, gazetteer, stopwords):
    return corpus.analyze_corpus(FIXTURES / "corpus", lexicon, gazetteer, stopwords)


@pytest.fixture(scope="session")
def eval_sentences(lexicon, gazetteer, stopwords):
    return corpus.analyze_corpus(FIXTURES / "eval", lexicon, gazetteer, stopwords)


@pytest.fixture(scope="session")
def seed():
    return acquisition.SeedPattern("cession", "société", "entreprise_achetee", "$2")


@pytest.fixture(scope="session")
def table51():
    return acquisition.read_table(FIXTURES / "table-51.tsv")


def analyze_one(text, lexicon, stopwords, gazetteer=None):
    """First sentence of a snippet analyzed with the fixture resources."""
    sentences = corpus.analyze(text, lexicon, gazetteer or {}, stopwords, doc_id="t")
    assert sentences, f"no sentence in {text!r}"
    return sentences[0]
