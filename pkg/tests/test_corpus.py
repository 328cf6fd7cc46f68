import json

import httpx
import pytest

from sciatlas.corpus import (
    CorpusError,
    fetch_citations_remote,
    load_citations,
    load_metric,
    load_publications,
    load_subset,
)


def write_pubs(path, records):
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


def rec(pub_id, year=2010, **extra):
    base = {
        "pub_id": pub_id,
        "year": year,
        "title": extra.pop("title", "some title"),
        "journal_title": extra.pop("journal_title", "Journal"),
        "mesh_terms": extra.pop("mesh_terms", []),
        "author_addresses": extra.pop("author_addresses", []),
        "pub_type": extra.pop("pub_type", "article"),
    }
    base.update(extra)
    return base


@pytest.fixture
def pub_file(tmp_path):
    def _make(records, name="publications.jsonl"):
        path = tmp_path / name
        write_pubs(path, records)
        return path
    return _make


class TestLoadPublications:
    def test_three_valid_records(self, pub_file):
        corpus = load_publications(pub_file([rec("1"), rec("2"), rec("3")]))
        assert len(corpus) == 3
        assert corpus.publication_report.kept == 3

    def test_year_boundaries_inclusive(self, pub_file):
        path = pub_file([rec("1", 1994), rec("2", 1995), rec("3", 2020)])
        corpus = load_publications(path, year_filter=(1995, 2020))
        assert sorted(corpus.publications) == ["2", "3"]
        assert corpus.publication_report.skipped_year == 1

    def test_editorial_skipped(self, pub_file):
        path = pub_file([rec("1"), rec("2", pub_type="editorial")])
        corpus = load_publications(path)
        assert len(corpus) == 1
        assert corpus.publication_report.skipped_type == 1

    def test_review_kept(self, pub_file):
        corpus = load_publications(pub_file([rec("1", pub_type="review")]))
        assert corpus.publications["1"].pub_type == "review"

    def test_missing_oa_status_defaults_unknown(self, pub_file):
        corpus = load_publications(pub_file([rec("1")]))
        assert corpus.publications["1"].oa_status == "unknown"

    def test_malformed_line_lenient(self, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_text(json.dumps(rec("1")) + "\nnot json\n")
        corpus = load_publications(path)
        assert len(corpus) == 1
        assert corpus.publication_report.skipped_malformed == 1

    def test_malformed_line_strict(self, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_text("not json\n")
        with pytest.raises(CorpusError):
            load_publications(path, strict=True)

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(CorpusError):
            load_publications(tmp_path / "missing.jsonl")

    def test_idempotent(self, pub_file):
        path = pub_file([rec("1"), rec("2", 2001, pub_type="review")])
        a = load_publications(path)
        b = load_publications(path)
        assert a.publications == b.publications

    def test_filter_then_count_equals_count_then_filter(self, pub_file):
        records = [rec(str(i), 1990 + i) for i in range(20)]
        path = pub_file(records)
        filtered = load_publications(path, year_filter=(1998, 2005))
        everything = load_publications(path, year_filter=(1980, 2030))
        recount = sum(1 for p in everything.publications.values() if 1998 <= p.year <= 2005)
        assert len(filtered) == recount


class TestLoadCitations:
    def make_corpus(self, pub_file, ids=("A", "B", "C")):
        return load_publications(pub_file([rec(i) for i in ids]))

    def test_ordered_pair_dedup(self, pub_file, tmp_path):
        corpus = self.make_corpus(pub_file)
        cit = tmp_path / "c.tsv"
        cit.write_text("A\tB\nA\tB\nB\tA\n")
        corpus = load_citations(cit, corpus)
        pairs = {(e.citing, e.cited) for e in corpus.citations}
        assert pairs == {("A", "B"), ("B", "A")}
        assert corpus.citation_report.duplicates == 1

    def test_self_loop_dropped(self, pub_file, tmp_path):
        corpus = self.make_corpus(pub_file)
        cit = tmp_path / "c.tsv"
        cit.write_text("A\tA\n")
        corpus = load_citations(cit, corpus)
        assert corpus.citations == []
        assert corpus.citation_report.self_loops == 1

    def test_dangling_dropped(self, pub_file, tmp_path):
        corpus = self.make_corpus(pub_file)
        cit = tmp_path / "c.tsv"
        cit.write_text("A\tZ\n")
        corpus = load_citations(cit, corpus)
        assert corpus.citations == []
        assert corpus.citation_report.dangling == 1

    def test_no_dangling_survives(self, pub_file, tmp_path):
        corpus = self.make_corpus(pub_file)
        cit = tmp_path / "c.tsv"
        cit.write_text("A\tB\nB\tZ\nQ\tC\n")
        corpus = load_citations(cit, corpus)
        for e in corpus.citations:
            assert e.citing in corpus.publications
            assert e.cited in corpus.publications

    def test_malformed_row_strict(self, pub_file, tmp_path):
        corpus = self.make_corpus(pub_file)
        cit = tmp_path / "c.tsv"
        cit.write_text("A B no tab\n")
        with pytest.raises(CorpusError):
            load_citations(cit, corpus, strict=True)


class TestLoadSubset:
    def test_all_known(self, pub_file, tmp_path):
        corpus = load_publications(pub_file([rec(str(i)) for i in range(5)]))
        sub = tmp_path / "s.txt"
        sub.write_text("".join(f"{i}\n" for i in range(5)))
        subset, report = load_subset(sub, corpus)
        assert subset == {"0", "1", "2", "3", "4"}
        assert report.unknown_ids == 0

    def test_two_unknown(self, pub_file, tmp_path):
        corpus = load_publications(pub_file([rec(str(i)) for i in range(5)]))
        sub = tmp_path / "s.txt"
        sub.write_text("0\n1\n2\nX\nY\n")
        subset, report = load_subset(sub, corpus)
        assert len(subset) == 3
        assert report.unknown_ids == 2

    def test_empty_file(self, pub_file, tmp_path):
        corpus = load_publications(pub_file([rec("1")]))
        sub = tmp_path / "s.txt"
        sub.write_text("")
        subset, _ = load_subset(sub, corpus)
        assert subset == set()


class TestLoadMetric:
    def test_values(self, tmp_path):
        path = tmp_path / "m.tsv"
        path.write_text("1\t0.5\n2\t3\n")
        assert load_metric(path) == {"1": 0.5, "2": 3.0}

    def test_bad_value(self, tmp_path):
        path = tmp_path / "m.tsv"
        path.write_text("1\tnope\n")
        with pytest.raises(CorpusError):
            load_metric(path)


class TestFetchRemote:
    def make_client(self, handler):
        return httpx.Client(transport=httpx.MockTransport(handler))

    def test_empty_id_list(self, tmp_path):
        calls = []

        def handler(request):
            calls.append(request)
            return httpx.Response(200, json={"links": []})

        n = fetch_citations_remote(set(), "http://x/cites", tmp_path / "out.tsv",
                                   client=self.make_client(handler))
        assert n == 0
        assert calls == []

    def test_batching_1200_ids(self, tmp_path):
        calls = []

        def handler(request):
            calls.append(request.url.params["ids"])
            return httpx.Response(200, json={"links": []})

        ids = {str(i) for i in range(1200)}
        fetch_citations_remote(ids, "http://x/cites", tmp_path / "out.tsv",
                               rate_limit=0, client=self.make_client(handler))
        assert len(calls) == 3
        sizes = sorted(len(c.split(",")) for c in calls)
        assert sizes == [200, 500, 500]

    def test_retry_on_429(self, tmp_path, monkeypatch):
        monkeypatch.setattr("sciatlas.corpus.FETCH_BACKOFF_BASE", 0.0)
        attempts = []

        def handler(request):
            attempts.append(1)
            if len(attempts) < 3:
                return httpx.Response(429)
            return httpx.Response(200, json={"links": [{"citing": "1", "cited": "2"}]})

        out = tmp_path / "out.tsv"
        n = fetch_citations_remote({"1"}, "http://x/cites", out,
                                   rate_limit=0, client=self.make_client(handler))
        assert n == 1
        assert len(attempts) == 3
        assert out.read_text() == "1\t2\n"

    def test_resume_skips_done_batches(self, tmp_path):
        calls = []

        def handler(request):
            calls.append(request.url.params["ids"])
            return httpx.Response(200, json={"links": []})

        out = tmp_path / "out.tsv"
        journal = tmp_path / "out.journal"
        journal.write_text("0\n")
        ids = [str(i) for i in range(700)]
        fetch_citations_remote(ids, "http://x/cites", out, rate_limit=0,
                               client=self.make_client(handler), journal_path=journal)
        assert len(calls) == 1  # only the second batch
