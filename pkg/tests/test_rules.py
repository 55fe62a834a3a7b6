"""Rule cascade for variant candidates: cited cases, precedence, totality."""

from __future__ import annotations

import random
import string

import pytest

from discoursekit.variants.rules import (
    RuleDecision,
    RuleFired,
    RuleLexicons,
    classify_candidate,
)


@pytest.fixture(scope="module")
def lex():
    return RuleLexicons.bundled()


class TestCitedCases:
    def test_dictionary_words_excluded(self, lex):
        for surface in ("hold", "buy"):
            decision, fired = classify_candidate(surface, "slave", lex)
            assert decision is RuleDecision.EXCLUDE
            assert fired is RuleFired.DICTIONARY_IRRELEVANT

    def test_function_tail_included(self, lex):
        for surface in ("slaveto", "slavewith"):
            decision, fired = classify_candidate(surface, "slave", lex)
            assert decision is RuleDecision.INCLUDE
            assert fired is RuleFired.FUNCTION_TAIL

    def test_gender_tail_included(self, lex):
        assert classify_candidate("slaveman", "slave", lex) == (
            RuleDecision.INCLUDE,
            RuleFired.GENDER_TAIL,
        )
        assert classify_candidate("servantwoman", "servant", lex) == (
            RuleDecision.INCLUDE,
            RuleFired.GENDER_TAIL,
        )

    def test_partial_forms_excluded(self, lex):
        for surface, keyword in (("slav", "slave"), ("sla", "slave"), ("serva", "servant")):
            decision, fired = classify_candidate(surface, keyword, lex)
            assert decision is RuleDecision.EXCLUDE
            assert fired is RuleFired.PARTIAL_FORM

    def test_unrecognized_needs_review(self, lex):
        assert classify_candidate("slove", "slave", lex) == (
            RuleDecision.NEEDS_REVIEW,
            RuleFired.NO_RULE,
        )

    def test_semantically_relevant_escapes_dictionary_rule(self, lex):
        # "slavery" is a dictionary word but semantically relevant, so it
        # skips the exclusion rule and lands in review.
        assert "slavery" in lex.dictionary
        decision, fired = classify_candidate("slavery", "slave", lex)
        assert decision is RuleDecision.NEEDS_REVIEW
        assert fired is RuleFired.NO_RULE


class TestPrecedenceAndEdges:
    def test_dictionary_beats_tail_parse(self, lex):
        # A dictionary word that also parses as keyword+tail is still
        # excluded by the first rule.
        custom = RuleLexicons(
            dictionary=frozenset({"slaveto"}),
            semantically_relevant=frozenset(),
            function_words=frozenset({"to"}),
            gender_words=frozenset(),
        )
        assert classify_candidate("slaveto", "slave", custom) == (
            RuleDecision.EXCLUDE,
            RuleFired.DICTIONARY_IRRELEVANT,
        )

    def test_partial_beats_nothing_below_three_chars(self, lex):
        decision, fired = classify_candidate("sl", "slave", lex)
        assert fired is RuleFired.NO_RULE

    def test_keyword_itself_is_not_partial(self, lex):
        decision, fired = classify_candidate("slave", "slave", lex)
        assert fired is not RuleFired.PARTIAL_FORM

    def test_tail_must_be_exact_lexicon_member(self, lex):
        # "without" is a function word; the tail matches whole, not "with".
        assert classify_candidate("slavewithout", "slave", lex) == (
            RuleDecision.INCLUDE,
            RuleFired.FUNCTION_TAIL,
        )
        # An arbitrary non-lexicon tail falls through to review.
        assert classify_candidate("slavexyz", "slave", lex)[1] is RuleFired.NO_RULE

    def test_strict_mode_maps_review_to_exclude(self, lex):
        decision, fired = classify_candidate("slove", "slave", lex, strict=True)
        assert decision is RuleDecision.EXCLUDE
        assert fired is RuleFired.NO_RULE

    def test_strict_mode_keeps_rule_hits(self, lex):
        assert classify_candidate("slaveto", "slave", lex, strict=True) == (
            RuleDecision.INCLUDE,
            RuleFired.FUNCTION_TAIL,
        )


class TestTotality:
    def test_fuzz_every_string_gets_a_decision(self, lex):
        rng = random.Random(99)
        alphabet = string.ascii_lowercase + "0123456789'"
        keywords = ("slave", "servant")
        for _ in range(100_000):
            n = rng.randint(0, 14)
            surface = "".join(rng.choice(alphabet) for _ in range(n))
            decision, fired = classify_candidate(surface, rng.choice(keywords), lex)
            assert isinstance(decision, RuleDecision)
            assert isinstance(fired, RuleFired)


class TestLexiconLoading:
    def test_roundtrip_from_directory(self, tmp_path):
        for name, words in (
            ("dictionary.txt", ["hold", "buy"]),
            ("semantically_relevant.txt", ["slavery"]),
            ("function_words.txt", ["to"]),
            ("gender_words.txt", ["man"]),
        ):
            (tmp_path / name).write_text("\n".join(words) + "\n", encoding="utf-8")
        lex = RuleLexicons.load(tmp_path)
        assert lex.dictionary == frozenset({"hold", "buy"})
        assert lex.gender_words == frozenset({"man"})

    def test_comments_and_case_normalized(self, tmp_path):
        (tmp_path / "dictionary.txt").write_text("# comment\nHOLD\n\n", encoding="utf-8")
        for name in ("semantically_relevant.txt", "function_words.txt", "gender_words.txt"):
            (tmp_path / name).write_text("", encoding="utf-8")
        lex = RuleLexicons.load(tmp_path)
        assert lex.dictionary == frozenset({"hold"})
