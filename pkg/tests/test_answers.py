import hashlib
import re

import pytest

from lateralprobe.answers import (
    ANSWER_SYSTEM_PROMPT,
    ANSWER_USER_TEMPLATE,
    AnswerSentence,
    build_answer_prompt,
    find_uncited_docs,
    generate_answer,
    parse_citations,
    render_doc_texts,
    split_sentences,
)
from lateralprobe.ingest import TextSegment
from lateralprobe.providers.mock import MockChatProvider
from lateralprobe.questions import LateralQuestion
from lateralprobe.retrieval import DocumentContext, ScoredSegment

QUESTION = LateralQuestion(index=2, text="Is the claim accurate?")


def context_of(num_docs=3, segments_per_doc=2):
    entries = []
    for d in range(1, num_docs + 1):
        scored = tuple(
            ScoredSegment(
                TextSegment(parent_doc=d, seq=s, text=f"doc {d} segment {s} words", word_count=5),
                score=1.0 - 0.1 * s,
            )
            for s in range(1, segments_per_doc + 1)
        )
        entries.append(DocumentContext(d, f"https://src.example/{d}", f"Title {d}", scored))
    return entries


class TestBuildAnswerPrompt:
    def test_document_headers_in_order(self):
        request = build_answer_prompt(QUESTION, context_of(3))
        headers = re.findall(r"Document \[(\d+)\] \((\S+)\):", request.user_text)
        assert headers == [
            ("1", "https://src.example/1"),
            ("2", "https://src.example/2"),
            ("3", "https://src.example/3"),
        ]

    def test_question_substituted(self):
        request = build_answer_prompt(QUESTION, context_of(1))
        assert f"My question is {QUESTION.text}." in request.user_text

    def test_default_temperature_is_tuned_value(self):
        assert build_answer_prompt(QUESTION, context_of(1)).temperature == 0.2

    def test_purity(self):
        assert build_answer_prompt(QUESTION, context_of(2)) == build_answer_prompt(
            QUESTION, context_of(2)
        )

    def test_empty_context_rejected(self):
        with pytest.raises(ValueError):
            build_answer_prompt(QUESTION, [])

    def test_system_prompt_carries_attribution_example(self):
        assert 'Hydroxychloroquine is not a cure for COVID-19 [1][3].' in ANSWER_SYSTEM_PROMPT

    def test_segments_blank_line_separated(self):
        rendered = render_doc_texts(context_of(1, segments_per_doc=2))
        assert "doc 1 segment 1 words\n\ndoc 1 segment 2 words" in rendered

    def test_template_digests_pinned(self):
        assert (
            hashlib.sha256(ANSWER_SYSTEM_PROMPT.encode()).hexdigest()
            == "762fb867741f344f37756c23d827abc271f3403baef5208be9e3be4738d14264"
        )
        assert (
            hashlib.sha256(ANSWER_USER_TEMPLATE.encode()).hexdigest()
            == "790c52f011500c7556392d07392a5a7e8dd5b9007b0fd719e17b63811a0cce8b"
        )


class TestSplitSentences:
    def test_canonical_two_sentences(self):
        assert split_sentences("A is true [1]. B is false [2][3].") == [
            "A is true [1].",
            "B is false [2][3].",
        ]

    def test_abbreviation_does_not_split(self):
        assert split_sentences("It works, e.g. here [1].") == ["It works, e.g. here [1]."]

    def test_three_terminators(self):
        # Hand-checked against the boundary rule.
        assert split_sentences("Claim [1]! Why? Because [2].") == [
            "Claim [1]!",
            "Why?",
            "Because [2].",
        ]

    def test_markers_after_terminator_attach_backwards(self):
        assert split_sentences("X. [2] Y follows.") == ["X. [2]", "Y follows."]

    def test_no_terminator_single_sentence(self):
        assert split_sentences("an unfinished thought [2]") == ["an unfinished thought [2]"]

    def test_whitespace_only_no_sentences(self):
        assert split_sentences("   ") == []
        assert split_sentences("") == []

    @pytest.mark.parametrize(
        "text",
        [
            "The dose, i.e. the amount, matters.",
            "Masks, gloves, etc. were used.",
            "It was 10 vs. 20 in trials.",
            "Dr. Smith disagreed.",
            "The U.S. approved it.",
        ],
    )
    def test_abbreviation_exception_list(self, text):
        assert split_sentences(text) == [text]

    def test_abbreviation_then_real_boundary(self):
        assert split_sentences("They compared apples vs. oranges. Results differed.") == [
            "They compared apples vs. oranges.",
            "Results differed.",
        ]

    def test_terminator_without_following_space_does_not_split(self):
        # Only the second period precedes whitespace, so only it is a boundary.
        assert split_sentences("A.B. two pieces") == ["A.B.", "two pieces"]
        assert split_sentences("version 2.5 shipped") == ["version 2.5 shipped"]


class TestParseCitations:
    def test_attribution_example(self):
        sentences, out_of_range = parse_citations(
            "Hydroxychloroquine is not a cure for COVID-19 [1][3].", 3
        )
        assert len(sentences) == 1
        assert sentences[0].citations == {1, 3}
        assert sentences[0].text == "Hydroxychloroquine is not a cure for COVID-19."
        assert out_of_range == set()

    def test_out_of_range_collected_and_stripped(self):
        sentences, out_of_range = parse_citations("Fact [4].", 3)
        assert sentences[0].citations == frozenset()
        assert sentences[0].text == "Fact."
        assert out_of_range == {4}

    def test_no_citations(self):
        sentences, out_of_range = parse_citations("No citations here.", 3)
        assert sentences[0].citations == frozenset()
        assert out_of_range == set()

    def test_mixed_range(self):
        sentences, out_of_range = parse_citations("Fact [2][7].", 3)
        assert sentences[0].citations == {2}
        assert out_of_range == {7}

    def test_non_integer_brackets_kept_as_text(self):
        sentences, _ = parse_citations("See [a] and [1,2] then [3].", 3)
        assert sentences[0].citations == {3}
        assert sentences[0].text == "See [a] and [1,2] then."

    def test_num_docs_validation(self):
        with pytest.raises(ValueError):
            parse_citations("x", 0)

    def test_rejoining_reproduces_raw_modulo_markers_and_whitespace(self):
        raw = "First claim [1]. Second claim,  spaced [2][3]. Third [1]."
        sentences, _ = parse_citations(raw, 3)
        squash = lambda s: re.sub(r"\s+", "", s)
        stripped_raw = re.sub(r"\[\d+\]", "", raw)
        assert squash(" ".join(s.text for s in sentences)) == squash(stripped_raw)


class TestFindUncited:
    def test_complement(self):
        sentences = [
            AnswerSentence("a", frozenset({1})),
            AnswerSentence("b", frozenset({3})),
        ]
        assert find_uncited_docs(sentences, 3) == {2}

    def test_all_cited_empty(self):
        sentences = [AnswerSentence("a", frozenset({1, 2, 3}))]
        assert find_uncited_docs(sentences, 3) == set()

    def test_none_cited_full(self):
        assert find_uncited_docs([AnswerSentence("a", frozenset())], 3) == {1, 2, 3}


def scripted_chat(answer_text):
    return MockChatProvider([], [answer_text])


def sources_of(context):
    return [(entry.doc_number, entry.url, entry.title) for entry in context]


class TestGenerateAnswer:
    def test_fully_cited_answer(self):
        context = context_of(3)
        answer = generate_answer(
            QUESTION, context, sources_of(context), scripted_chat("A [1]. B [2]. C [3].")
        )
        assert len(answer.sentences) == 3
        assert all(source.cited for source in answer.sources)
        assert answer.uncited_sources == []
        assert answer.word_count == 6  # hand count: A [1]. B [2]. C [3].
        assert answer.unattributed_sentence_count == 0
        assert not answer.overlength

    def test_uncited_sources_flagged(self):
        context = context_of(3)
        answer = generate_answer(
            QUESTION, context, sources_of(context), scripted_chat("Only one source [1].")
        )
        assert answer.uncited_sources == [2, 3]
        assert [s.cited for s in answer.sources] == [True, False, False]

    def test_overlength_flagged_not_rejected(self):
        long_text = " ".join(f"word{i}" for i in range(118)) + " [1]. And more [2]."
        context = context_of(2)
        answer = generate_answer(QUESTION, context, sources_of(context), scripted_chat(long_text))
        assert answer.overlength
        assert answer.word_count == 122
        assert len(answer.sentences) == 2

    def test_out_of_range_reported(self):
        context = context_of(2)
        answer = generate_answer(
            QUESTION, context, sources_of(context), scripted_chat("Fact [1][9].")
        )
        assert answer.out_of_range_citations == {9}
        assert answer.sources[0].cited

    def test_unattributed_sentences_counted(self):
        context = context_of(2)
        answer = generate_answer(
            QUESTION, context, sources_of(context), scripted_chat("Cited [1]. Bare claim. Also bare.")
        )
        assert answer.unattributed_sentence_count == 2

    def test_raw_text_preserved(self):
        context = context_of(1)
        answer = generate_answer(QUESTION, context, sources_of(context), scripted_chat("Keep [1]."))
        assert answer.raw_text == "Keep [1]."
        assert answer.question_index == QUESTION.index

    def test_non_contiguous_sources_rejected(self):
        context = context_of(2)
        sources = [(1, "u1", "t1"), (3, "u3", "t3")]
        with pytest.raises(ValueError):
            generate_answer(QUESTION, context, sources, scripted_chat("x [1]."))

    def test_deterministic_for_scripted_mock(self):
        context = context_of(2)
        first = generate_answer(
            QUESTION, context, sources_of(context), scripted_chat("Same [1][2].")
        )
        second = generate_answer(
            QUESTION, context, sources_of(context), scripted_chat("Same [1][2].")
        )
        assert first == second
