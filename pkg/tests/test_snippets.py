"""Keyword scanning, window extraction, and snippet-set construction."""

from __future__ import annotations

import random
from datetime import date

import pytest

from discoursekit.corpus.store import PageDocument
from discoursekit.errors import PreconditionError
from discoursekit.snippets import (
    build_snippet_set,
    extract_snippet,
    read_snippets_jsonl,
    scan_keyword_lines,
    snippet_id,
    snippet_to_json,
    write_snippets_jsonl,
)


def page(lines, lccn="sn84024738", day=9, seq=1):
    return PageDocument(
        lccn=lccn,
        issue_date=date(1856, 1, day),
        edition=1,
        sequence=seq,
        lines=tuple(lines),
        source_url="",
    )


class TestScan:
    def test_basic_hit(self):
        hits = scan_keyword_lines(page(["the slave was", "sold"]), {"slave"})
        assert hits == [(0, "slave")]

    def test_case_insensitive_fused_form(self):
        hits = scan_keyword_lines(page(["SLAVETO market"]), {"slaveto"})
        assert hits == [(0, "slaveto")]

    def test_token_match_not_substring(self):
        assert scan_keyword_lines(page(["enslavement"]), {"slave"}) == []

    def test_substring_vs_token_harness(self):
        # Brute-force comparison: substring matching would overcount on
        # lines where the keyword only appears embedded in longer tokens.
        rng = random.Random(6)
        carriers = ["enslavement", "slaveholder", "antislavery"]
        standalone = ["slave", "slave,", "Slave", '"slave"']
        for _ in range(300):
            tokens = [rng.choice(carriers + ["the", "of", "market"]) for _ in range(8)]
            expect = False
            if rng.random() < 0.5:
                tokens[rng.randrange(8)] = rng.choice(standalone)
                expect = True
            got = scan_keyword_lines(page([" ".join(tokens)]), {"slave"})
            assert bool(got) == expect

    def test_punctuation_stripped(self):
        hits = scan_keyword_lines(page(["the slave, was sold."]), {"slave"})
        assert hits == [(0, "slave")]

    def test_multiple_forms_one_line(self):
        hits = scan_keyword_lines(page(["slave slaveto slave"]), {"slave", "slaveto"})
        assert hits == [(0, "slave"), (0, "slaveto")]

    def test_sorted_by_line(self):
        doc = page(["nothing", "a slave here", "more", "slave again"])
        hits = scan_keyword_lines(doc, {"slave"})
        assert hits == [(1, "slave"), (3, "slave")]

    def test_empty_page(self):
        assert scan_keyword_lines(page([]), {"slave"}) == []

    def test_empty_forms_rejected(self):
        with pytest.raises(PreconditionError):
            scan_keyword_lines(page(["x"]), set())


class TestExtract:
    five = ["l0 slave", "l1", "l2 slave", "l3", "l4"]

    def test_edge_truncation(self):
        snip = extract_snippet(page(self.five), 0, 2, keyword="slave", matched_form="slave")
        assert snip.text == "l0 slave l1 l2 slave"

    def test_identity_window(self):
        snip = extract_snippet(page(self.five), 2, 0, keyword="slave", matched_form="slave")
        assert snip.text == "l2 slave"

    def test_full_page_window(self):
        snip = extract_snippet(page(self.five), 2, 2, keyword="slave", matched_form="slave")
        assert snip.text == " ".join(self.five)

    def test_out_of_range_anchor(self):
        with pytest.raises(PreconditionError):
            extract_snippet(page(self.five), 9, 2, keyword="slave", matched_form="slave")

    def test_window_monotonicity(self):
        doc = page([f"line{i} slave" for i in range(9)])
        for w in range(4):
            narrow = extract_snippet(doc, 4, w, keyword="slave", matched_form="slave")
            wide = extract_snippet(doc, 4, w + 1, keyword="slave", matched_form="slave")
            assert narrow.text in wide.text

    def test_id_is_pure_function_of_coordinates(self):
        a = snippet_id("sn1", date(1856, 1, 9), 1, 2, 7, "slave")
        b = snippet_id("sn1", date(1856, 1, 9), 1, 2, 7, "slave")
        c = snippet_id("sn1", date(1856, 1, 9), 1, 2, 8, "slave")
        assert a == b
        assert a != c

    def test_text_contains_matched_form(self):
        doc = page(["before", "the SLAVETO market", "after"])
        snip = extract_snippet(doc, 1, 1, keyword="slave", matched_form="slaveto")
        assert snip.matched_form.lower() in snip.text.lower()


class TestBuildSet:
    def test_empty_corpus(self):
        sset = build_snippet_set([], "slave", {"slave"}, 2)
        assert sset.snippets == []
        assert sset.per_newspaper_counts == {}

    def test_two_anchor_lines_two_snippets(self):
        doc = page(["a slave", "filler", "another slave line"])
        sset = build_snippet_set([doc], "slave", {"slave"}, 1)
        assert len(sset.snippets) == 2

    def test_adjacent_anchors_overlap_allowed(self):
        doc = page(["one slave", "two slave"])
        sset = build_snippet_set([doc], "slave", {"slave"}, 2)
        assert len(sset.snippets) == 2
        assert sset.snippets[0].text == sset.snippets[1].text

    def test_forms_must_include_keyword(self):
        with pytest.raises(PreconditionError):
            build_snippet_set([], "slave", {"slaveto"}, 2)

    def test_plant_and_count(self):
        rng = random.Random(77)
        pages = []
        planted = {"sn01": 0, "sn02": 0, "sn03": 0}
        for p, lccn in enumerate(sorted(planted)):
            for d in range(1, 6):
                lines = []
                for _ in range(20):
                    if rng.random() < 0.2:
                        lines.append("a slave appears here")
                        planted[lccn] += 1
                    else:
                        lines.append("plain filler text line")
                pages.append(page(lines, lccn=lccn, day=d, seq=p + 1))
        sset = build_snippet_set(pages, "slave", {"slave"}, 2)
        assert len(sset.snippets) == sum(planted.values())
        assert sset.per_newspaper_counts == planted

    def test_counts_sum_to_total(self):
        doc1 = page(["slave one"], lccn="sn01")
        doc2 = page(["slave two", "slave three"], lccn="sn02")
        sset = build_snippet_set([doc1, doc2], "slave", {"slave"}, 0)
        assert sum(sset.per_newspaper_counts.values()) == len(sset.snippets)

    def test_deterministic_serialization(self, tmp_path):
        docs = [page(["a slave b", "c", "slaveto d"], day=d) for d in (9, 11)]
        first = tmp_path / "a.jsonl"
        second = tmp_path / "b.jsonl"
        for target in (first, second):
            sset = build_snippet_set(docs, "slave", {"slave", "slaveto"}, 2)
            write_snippets_jsonl(sset.snippets, target)
        assert first.read_bytes() == second.read_bytes()


class TestJsonl:
    def test_roundtrip(self, tmp_path):
        doc = page(["the slave was", "sold"])
        sset = build_snippet_set([doc], "slave", {"slave"}, 2)
        path = tmp_path / "s.jsonl"
        write_snippets_jsonl(sset.snippets, path)
        back = read_snippets_jsonl(path)
        assert back == sset.snippets

    def test_fixed_field_order(self):
        doc = page(["the slave was"])
        snip = build_snippet_set([doc], "slave", {"slave"}, 1).snippets[0]
        keys = list(__import__("json").loads(snippet_to_json(snip)))
        assert keys == [
            "snippet_id",
            "keyword",
            "matched_form",
            "lccn",
            "issue_date",
            "edition",
            "sequence",
            "anchor_line",
            "window",
            "text",
        ]
