"""The 21 elementary summarization subtasks.

Each kind has three faces:
  * a planter that modifies a base document (keywords, markers, numbers,
    quotes, clause structure) and returns a record of what it planted,
  * a gold constructor that recomputes the reference summary from the
    record plus the modified document,
  * an acceptance oracle that decides whether a candidate summary is
    correct (exact match for deterministic kinds, a set for the kinds
    with several legal answers).

Records are self-contained: every token a kind planted or may emit is
stored in the record, so verification after a file round-trip needs no
scheme object. Sentence indices in records refer to the modified
document; planters never reorder or renumber sentences, so records stay
valid when several kinds are applied to disjoint sentences in turn.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable

from .corpus import DocPolicy, Document, Sentence
from .dataset import TaskInstance
from .keywords import KeywordScheme
from .vocab import Vocabulary

ELEMENTARY_KINDS = (
    "CheckKeyword",
    "ClassifyKeyword",
    "MajorityKeyword",
    "CopyFirstSentence",
    "CopyBulleted",
    "CopyQuoted",
    "CopyLastSentence",
    "CopyKwdOneSentence",
    "CopyKwdMultipleSentInOrder",
    "CopyKwdMultipleSentSorted",
    "CopyKwdMultipleSentShuffled",
    "ReplaceClassKeyword",
    "CompareNumbers",
    "SumOfNumbers",
    "ThresholdNumber",
    "LargestNumber",
    "TruncateSentence",
    "BreakClauses",
    "JoinClauses",
    "ParaphraseWords",
    "TopicSegregation",
)

COMMA = ","
NUMBER_RANGE = (0, 100)
THRESHOLD = 50


class PlacementError(ValueError):
    """Document cannot host this kind (too small or no legal position)."""


class ConsistencyError(ValueError):
    """Record does not match the document it claims to describe."""


@dataclass
class TaskRecord:
    kind: str
    params: dict

    def to_meta(self) -> dict:
        return {"kind": self.kind, "params": self.params}

    @classmethod
    def from_meta(cls, meta: dict) -> "TaskRecord":
        return cls(kind=meta["kind"], params=meta["params"])

    def footprint(self) -> frozenset[int]:
        return frozenset(self.params.get("touched", ()))


# --- document editing helpers -------------------------------------------


def _insert_words(doc: Document, s_idx: int, pos: int, new: tuple[str, ...]) -> Document:
    sent = doc.sentences[s_idx]
    words = sent.words[:pos] + new + sent.words[pos:]
    return _swap_sentence(doc, s_idx, Sentence(words, sent.terminator))


def _swap_sentence(doc: Document, s_idx: int, sentence: Sentence) -> Document:
    sentences = doc.sentences[:s_idx] + (sentence,) + doc.sentences[s_idx + 1 :]
    return Document(sentences)


def _word_slot(rng: random.Random, doc: Document, s_idx: int) -> int:
    return rng.randint(0, len(doc.sentences[s_idx].words))


def _sentence_at(doc: Document, s_idx: int) -> Sentence:
    if not 0 <= s_idx < doc.sentence_count:
        raise ConsistencyError(f"sentence index {s_idx} outside document")
    return doc.sentences[s_idx]


def _expect_word(doc: Document, s_idx: int, pos: int, token: str) -> None:
    words = _sentence_at(doc, s_idx).words
    if pos >= len(words) or words[pos] != token:
        raise ConsistencyError(
            f"expected {token!r} at sentence {s_idx} position {pos}"
        )


def _pick(rng: random.Random, allowed: list[int]) -> int:
    if not allowed:
        raise PlacementError("no sentence available")
    return allowed[rng.randrange(len(allowed))]


def _pick_many(rng: random.Random, allowed: list[int], k: int) -> list[int]:
    if len(allowed) < k:
        raise PlacementError(f"need {k} sentences, only {len(allowed)} available")
    return rng.sample(allowed, k)


# --- planters ------------------------------------------------------------

Planter = Callable[
    [Document, random.Random, KeywordScheme, Vocabulary, list[int]],
    tuple[Document, dict],
]

_PLANTERS: dict[str, Planter] = {}


def _planter(kind: str):
    def register(fn: Planter) -> Planter:
        _PLANTERS[kind] = fn
        return fn

    return register


@_planter("CheckKeyword")
def _plant_check(doc, rng, scheme, vocab, allowed):
    keyword = scheme.band("CheckKeyword")[0]
    present = rng.random() < 0.5
    params = {
        "present": present,
        "keyword": keyword,
        "yes": scheme.yes_token,
        "no": scheme.no_token,
        "sentence": None,
        "position": None,
        "touched": [],
    }
    if present:
        s = _pick(rng, allowed)
        pos = _word_slot(rng, doc, s)
        doc = _insert_words(doc, s, pos, (keyword,))
        params.update(sentence=s, position=pos, touched=[s])
    return doc, params


@_planter("ClassifyKeyword")
def _plant_classify(doc, rng, scheme, vocab, allowed):
    label = rng.choice(scheme.sentiment_classes)
    keyword = rng.choice(scheme.classed_keywords[label])
    s = _pick(rng, allowed)
    pos = _word_slot(rng, doc, s)
    doc = _insert_words(doc, s, pos, (keyword,))
    return doc, {
        "label": label,
        "keyword": keyword,
        "sentence": s,
        "position": pos,
        "touched": [s],
    }


@_planter("MajorityKeyword")
def _plant_majority(doc, rng, scheme, vocab, allowed):
    band = scheme.band("MajorityKeyword")
    kw_a, kw_b = rng.sample(band, 2)
    count_a = rng.randint(1, 4)
    count_b = rng.randint(1, 4)
    while count_b == count_a:
        count_b = rng.randint(1, 4)
    s_a, s_b = _pick_many(rng, allowed, 2)
    for _ in range(count_a):
        doc = _insert_words(doc, s_a, _word_slot(rng, doc, s_a), (kw_a,))
    for _ in range(count_b):
        doc = _insert_words(doc, s_b, _word_slot(rng, doc, s_b), (kw_b,))
    return doc, {
        "kw_a": kw_a,
        "kw_b": kw_b,
        "count_a": count_a,
        "count_b": count_b,
        "sentence_a": s_a,
        "sentence_b": s_b,
        "touched": sorted({s_a, s_b}),
    }


@_planter("CopyFirstSentence")
def _plant_copy_first(doc, rng, scheme, vocab, allowed):
    return doc, {"touched": [0]}


@_planter("CopyLastSentence")
def _plant_copy_last(doc, rng, scheme, vocab, allowed):
    return doc, {"touched": [doc.sentence_count - 1]}


@_planter("CopyBulleted")
def _plant_bulleted(doc, rng, scheme, vocab, allowed):
    s = _pick(rng, allowed)
    doc = _insert_words(doc, s, 0, (scheme.bullet_marker,))
    return doc, {"sentence": s, "bullet": scheme.bullet_marker, "touched": [s]}


@_planter("CopyQuoted")
def _plant_quoted(doc, rng, scheme, vocab, allowed):
    eligible = [i for i in allowed if len(doc.sentences[i].words) >= 2]
    s = _pick(rng, eligible)
    words = doc.sentences[s].words
    span = rng.randint(2, min(5, len(words)))
    start = rng.randint(0, len(words) - span)
    new = (
        words[:start]
        + (scheme.quote_open,)
        + words[start : start + span]
        + (scheme.quote_close,)
        + words[start + span :]
    )
    doc = _swap_sentence(doc, s, Sentence(new, doc.sentences[s].terminator))
    return doc, {
        "sentence": s,
        "open_pos": start,
        "span_len": span,
        "quote_open": scheme.quote_open,
        "quote_close": scheme.quote_close,
        "touched": [s],
    }


@_planter("CopyKwdOneSentence")
def _plant_copy_one(doc, rng, scheme, vocab, allowed):
    keyword = rng.choice(scheme.band("CopyKwdOneSentence"))
    s = _pick(rng, allowed)
    pos = _word_slot(rng, doc, s)
    doc = _insert_words(doc, s, pos, (keyword,))
    return doc, {"keyword": keyword, "sentence": s, "position": pos, "touched": [s]}


def _count_between(rng: random.Random, lo: int, hi: int) -> int:
    if hi < lo:
        raise PlacementError(f"need {lo} sentences, fewer available")
    return rng.randint(lo, hi)


def _plant_copy_multiple(kind: str):
    def plant(doc, rng, scheme, vocab, allowed):
        band = scheme.band(kind)
        m = _count_between(rng, 2, min(4, len(band), len(allowed)))
        keywords = rng.sample(band, m)
        sentences = _pick_many(rng, allowed, m)
        placements = []
        for kw, s in zip(keywords, sentences):
            pos = _word_slot(rng, doc, s)
            doc = _insert_words(doc, s, pos, (kw,))
            placements.append([kw, scheme.keyword_rank(kw), s, pos])
        params = {"placements": placements, "touched": sorted(sentences)}
        if kind == "CopyKwdMultipleSentShuffled":
            emit = list(range(m))
            rng.shuffle(emit)
            params["emit_order"] = emit
        return doc, params

    return plant


_PLANTERS["CopyKwdMultipleSentInOrder"] = _plant_copy_multiple("CopyKwdMultipleSentInOrder")
_PLANTERS["CopyKwdMultipleSentSorted"] = _plant_copy_multiple("CopyKwdMultipleSentSorted")
_PLANTERS["CopyKwdMultipleSentShuffled"] = _plant_copy_multiple("CopyKwdMultipleSentShuffled")


@_planter("ReplaceClassKeyword")
def _plant_replace(doc, rng, scheme, vocab, allowed):
    label = rng.choice(scheme.category_classes)
    keyword = rng.choice(scheme.classed_keywords[label])
    s = _pick(rng, allowed)
    pos = _word_slot(rng, doc, s)
    doc = _insert_words(doc, s, pos, (keyword,))
    return doc, {
        "label": label,
        "keyword": keyword,
        "sentence": s,
        "position": pos,
        "touched": [s],
    }


def _plant_numbers(doc, rng, scheme, allowed, values):
    sentences = _pick_many(rng, allowed, len(values))
    placements = []
    for v, s in zip(values, sentences):
        pos = _word_slot(rng, doc, s)
        doc = _insert_words(doc, s, pos, (scheme.numeric_trigger, str(v)))
        placements.append([s, pos])
    return doc, placements, sorted(set(sentences))


@_planter("CompareNumbers")
def _plant_compare(doc, rng, scheme, vocab, allowed):
    a = rng.randint(*NUMBER_RANGE)
    b = rng.randint(*NUMBER_RANGE)
    while b == a:
        b = rng.randint(*NUMBER_RANGE)
    doc, placements, touched = _plant_numbers(doc, rng, scheme, allowed, [a, b])
    return doc, {
        "values": [a, b],
        "placements": placements,
        "trigger": scheme.numeric_trigger,
        "touched": touched,
    }


@_planter("SumOfNumbers")
def _plant_sum(doc, rng, scheme, vocab, allowed):
    k = _count_between(rng, 2, min(4, len(allowed)))
    values = [rng.randint(*NUMBER_RANGE) for _ in range(k)]
    doc, placements, touched = _plant_numbers(doc, rng, scheme, allowed, values)
    return doc, {
        "values": values,
        "placements": placements,
        "trigger": scheme.numeric_trigger,
        "touched": touched,
    }


@_planter("ThresholdNumber")
def _plant_threshold(doc, rng, scheme, vocab, allowed):
    value = rng.randint(*NUMBER_RANGE)
    doc, placements, touched = _plant_numbers(doc, rng, scheme, allowed, [value])
    return doc, {
        "value": value,
        "placements": placements,
        "trigger": scheme.numeric_trigger,
        "above": scheme.above_token,
        "below": scheme.below_token,
        "touched": touched,
    }


@_planter("LargestNumber")
def _plant_largest(doc, rng, scheme, vocab, allowed):
    k = rng.randint(1, min(4, len(allowed)))
    values = [rng.randint(*NUMBER_RANGE) for _ in range(k)]
    doc, placements, touched = _plant_numbers(doc, rng, scheme, allowed, values)
    return doc, {
        "values": values,
        "placements": placements,
        "trigger": scheme.numeric_trigger,
        "touched": touched,
    }


@_planter("TruncateSentence")
def _plant_truncate(doc, rng, scheme, vocab, allowed):
    eligible = [i for i in allowed if len(doc.sentences[i].words) >= 2]
    s = _pick(rng, eligible)
    cut = rng.randint(1, len(doc.sentences[s].words) - 1)
    doc = _insert_words(doc, s, cut, (scheme.cutoff_keyword,))
    return doc, {
        "sentence": s,
        "position": cut,
        "cutoff": scheme.cutoff_keyword,
        "touched": [s],
    }


@_planter("BreakClauses")
def _plant_break(doc, rng, scheme, vocab, allowed):
    s = _pick(rng, allowed)
    n_clauses = rng.randint(2, 4)
    words: list[str] = []
    for i in range(n_clauses):
        if i:
            words.append(COMMA)
        words.extend(rng.choices(vocab.words, k=rng.randint(3, 6)))
    doc = _swap_sentence(doc, s, Sentence(tuple(words)))
    return doc, {"sentence": s, "touched": [s]}


@_planter("JoinClauses")
def _plant_join(doc, rng, scheme, vocab, allowed):
    count = rng.randint(2, 3)
    allowed_set = set(allowed)
    starts = [
        i
        for i in allowed
        if i + count <= doc.sentence_count and all(j in allowed_set for j in range(i, i + count))
    ]
    if not starts:
        raise PlacementError(f"no run of {count} consecutive sentences available")
    start = rng.choice(starts)
    keyword = rng.choice(scheme.band("JoinClauses"))
    for s in range(start, start + count):
        doc = _insert_words(doc, s, _word_slot(rng, doc, s), (keyword,))
    return doc, {
        "start": start,
        "count": count,
        "keyword": keyword,
        "touched": list(range(start, start + count)),
    }


@_planter("ParaphraseWords")
def _plant_paraphrase(doc, rng, scheme, vocab, allowed):
    source = rng.choice(sorted(scheme.synonyms))
    synonyms = list(scheme.synonyms[source])
    chosen = rng.choice(synonyms)
    s = _pick(rng, allowed)
    pos = _word_slot(rng, doc, s)
    doc = _insert_words(doc, s, pos, (source,))
    return doc, {
        "keyword": source,
        "synonyms": synonyms,
        "chosen": chosen,
        "sentence": s,
        "position": pos,
        "touched": [s],
    }


@_planter("TopicSegregation")
def _plant_topics(doc, rng, scheme, vocab, allowed):
    m = _count_between(rng, 2, min(4, len(allowed)))
    sentences = _pick_many(rng, allowed, m)
    placements = []
    for s in sentences:
        label = rng.choice(scheme.category_classes)
        keyword = rng.choice(scheme.classed_keywords[label])
        pos = _word_slot(rng, doc, s)
        doc = _insert_words(doc, s, pos, (keyword,))
        placements.append([label, keyword, s, pos])
    return doc, {
        "placements": placements,
        "class_order": list(scheme.category_classes),
        "headers": {c: scheme.section_headers[c] for c in scheme.category_classes},
        "touched": sorted(sentences),
    }


def apply_modification(
    kind: str,
    doc: Document,
    rng: random.Random,
    scheme: KeywordScheme,
    vocab: Vocabulary,
    allowed: list[int] | None = None,
) -> tuple[Document, TaskRecord]:
    """Plant one kind's trigger material; returns the new document and record.

    `allowed` restricts which sentences the kind may touch (used when
    several kinds share one document); None means all sentences.
    """
    if kind not in _PLANTERS:
        raise ValueError(f"unknown elementary kind {kind!r}")
    if allowed is None:
        allowed = list(range(doc.sentence_count))
    else:
        allowed = sorted(allowed)
    if not allowed:
        raise PlacementError("no sentences available")
    new_doc, params = _PLANTERS[kind](doc, rng, scheme, vocab, allowed)
    return new_doc, TaskRecord(kind=kind, params=params)


# --- gold summaries ------------------------------------------------------


def _sentence_tokens(doc: Document, s_idx: int) -> tuple[str, ...]:
    return _sentence_at(doc, s_idx).tokens()


def _gold_check(p, doc):
    if p["present"]:
        _expect_word(doc, p["sentence"], p["position"], p["keyword"])
        return (p["yes"], ".")
    return (p["no"], ".")


def _gold_classify(p, doc):
    _expect_word(doc, p["sentence"], p["position"], p["keyword"])
    return (p["label"], ".")


def _gold_majority(p, doc):
    got_a = _sentence_at(doc, p["sentence_a"]).words.count(p["kw_a"])
    got_b = _sentence_at(doc, p["sentence_b"]).words.count(p["kw_b"])
    if got_a != p["count_a"] or got_b != p["count_b"]:
        raise ConsistencyError("planted keyword counts do not match document")
    winner = p["kw_a"] if p["count_a"] > p["count_b"] else p["kw_b"]
    return (winner, ".")


def _gold_copy_first(p, doc):
    return _sentence_tokens(doc, 0)


def _gold_copy_last(p, doc):
    return _sentence_tokens(doc, doc.sentence_count - 1)


def _gold_bulleted(p, doc):
    sent = _sentence_at(doc, p["sentence"])
    if not sent.words or sent.words[0] != p["bullet"]:
        raise ConsistencyError("bullet marker missing")
    return sent.words[1:] + (sent.terminator,)


def _gold_quoted(p, doc):
    sent = _sentence_at(doc, p["sentence"])
    start, span = p["open_pos"], p["span_len"]
    close = start + span + 1
    if close >= len(sent.words) + 1:
        raise ConsistencyError("quote span outside sentence")
    if sent.words[start] != p["quote_open"] or sent.words[close] != p["quote_close"]:
        raise ConsistencyError("quote marks missing")
    return sent.words[start + 1 : close] + (".",)


def _gold_copy_one(p, doc):
    _expect_word(doc, p["sentence"], p["position"], p["keyword"])
    return _sentence_tokens(doc, p["sentence"])


def _multiple_blocks(p, doc) -> list[tuple[str, ...]]:
    for kw, _rank, s, pos in p["placements"]:
        _expect_word(doc, s, pos, kw)
    return [tuple(_sentence_tokens(doc, s)) for _kw, _rank, s, _pos in p["placements"]]


def _gold_multiple_in_order(p, doc):
    blocks = _multiple_blocks(p, doc)
    order = sorted(range(len(blocks)), key=lambda i: p["placements"][i][2])
    return tuple(tok for i in order for tok in blocks[i])


def _gold_multiple_sorted(p, doc):
    blocks = _multiple_blocks(p, doc)
    order = sorted(range(len(blocks)), key=lambda i: p["placements"][i][1])
    return tuple(tok for i in order for tok in blocks[i])


def _gold_multiple_shuffled(p, doc):
    blocks = _multiple_blocks(p, doc)
    return tuple(tok for i in p["emit_order"] for tok in blocks[i])


def _gold_replace(p, doc):
    _expect_word(doc, p["sentence"], p["position"], p["keyword"])
    sent = _sentence_at(doc, p["sentence"])
    pos = p["position"]
    words = sent.words[:pos] + (p["label"],) + sent.words[pos + 1 :]
    return words + (sent.terminator,)


def _check_numbers(p, doc):
    for v, (s, pos) in zip(p["values"] if "values" in p else [p["value"]], p["placements"]):
        _expect_word(doc, s, pos, p["trigger"])
        _expect_word(doc, s, pos + 1, str(v))


def _gold_compare(p, doc):
    _check_numbers(p, doc)
    return (str(max(p["values"])), ".")


def _gold_sum(p, doc):
    _check_numbers(p, doc)
    return (str(sum(p["values"])), ".")


def _gold_threshold(p, doc):
    _check_numbers(p, doc)
    return (p["above"] if p["value"] >= THRESHOLD else p["below"], ".")


def _gold_largest(p, doc):
    _check_numbers(p, doc)
    return (str(max(p["values"])), ".")


def _gold_truncate(p, doc):
    _expect_word(doc, p["sentence"], p["position"], p["cutoff"])
    sent = _sentence_at(doc, p["sentence"])
    return sent.words[: p["position"]] + (".",)


def _gold_break(p, doc):
    sent = _sentence_at(doc, p["sentence"])
    if COMMA not in sent.words:
        raise ConsistencyError("clause sentence has no commas")
    out: list[str] = []
    clause: list[str] = []
    for w in sent.words + (None,):
        if w in (COMMA, None):
            out.extend(clause)
            out.append(".")
            clause = []
        else:
            clause.append(w)
    return tuple(out)


def _gold_join(p, doc):
    words: list[str] = []
    for i, s in enumerate(range(p["start"], p["start"] + p["count"])):
        sent = _sentence_at(doc, s)
        if p["keyword"] not in sent.words:
            raise ConsistencyError("join keyword missing")
        if i:
            words.append(COMMA)
        words.extend(sent.words)
    words.append(".")
    return tuple(words)


def _paraphrase_candidates(p, doc) -> list[tuple[str, ...]]:
    _expect_word(doc, p["sentence"], p["position"], p["keyword"])
    sent = _sentence_at(doc, p["sentence"])
    pos = p["position"]
    return [
        sent.words[:pos] + (syn,) + sent.words[pos + 1 :] + (sent.terminator,)
        for syn in p["synonyms"]
    ]


def _gold_paraphrase(p, doc):
    candidates = _paraphrase_candidates(p, doc)
    return candidates[p["synonyms"].index(p["chosen"])]


def _gold_topics(p, doc):
    for _label, kw, s, pos in p["placements"]:
        _expect_word(doc, s, pos, kw)
    out: list[str] = []
    for label in p["class_order"]:
        out.append(p["headers"][label])
        for plab, _kw, s, _pos in sorted(p["placements"], key=lambda pl: pl[2]):
            if plab == label:
                out.extend(_sentence_tokens(doc, s))
    return tuple(out)


_GOLD: dict[str, Callable[[dict, Document], tuple[str, ...]]] = {
    "CheckKeyword": _gold_check,
    "ClassifyKeyword": _gold_classify,
    "MajorityKeyword": _gold_majority,
    "CopyFirstSentence": _gold_copy_first,
    "CopyLastSentence": _gold_copy_last,
    "CopyBulleted": _gold_bulleted,
    "CopyQuoted": _gold_quoted,
    "CopyKwdOneSentence": _gold_copy_one,
    "CopyKwdMultipleSentInOrder": _gold_multiple_in_order,
    "CopyKwdMultipleSentSorted": _gold_multiple_sorted,
    "CopyKwdMultipleSentShuffled": _gold_multiple_shuffled,
    "ReplaceClassKeyword": _gold_replace,
    "CompareNumbers": _gold_compare,
    "SumOfNumbers": _gold_sum,
    "ThresholdNumber": _gold_threshold,
    "LargestNumber": _gold_largest,
    "TruncateSentence": _gold_truncate,
    "BreakClauses": _gold_break,
    "JoinClauses": _gold_join,
    "ParaphraseWords": _gold_paraphrase,
    "TopicSegregation": _gold_topics,
}


def compute_gold(record: TaskRecord, doc: Document) -> tuple[str, ...]:
    """Recompute the reference summary; raises ConsistencyError on mismatch."""
    if record.kind not in _GOLD:
        raise ValueError(f"unknown elementary kind {record.kind!r}")
    return _GOLD[record.kind](record.params, doc)


def oracle_accepts(record: TaskRecord, doc: Document, candidate) -> bool:
    """True iff candidate is a correct summary for this record.

    Deterministic kinds accept exactly the gold; the shuffled-copy kind
    accepts any ordering of its marked sentences; the paraphrase kind
    accepts any listed synonym. Malformed candidates return False.
    """
    candidate = tuple(candidate)
    try:
        if record.kind == "CopyKwdMultipleSentShuffled":
            blocks = _multiple_blocks(record.params, doc)
            return any(
                candidate == tuple(tok for b in perm for tok in b)
                for perm in itertools.permutations(blocks)
            )
        if record.kind == "ParaphraseWords":
            return candidate in _paraphrase_candidates(record.params, doc)
        return candidate == compute_gold(record, doc)
    except (ConsistencyError, KeyError, TypeError, IndexError):
        return False


def generate_elementary(
    kind: str,
    rng: random.Random,
    scheme: KeywordScheme,
    vocab: Vocabulary,
    policy: DocPolicy | None = None,
    instance_id: str = "",
    doc: Document | None = None,
) -> TaskInstance:
    """Sample a base document, plant one kind, and emit the pair."""
    policy = policy or DocPolicy()
    base = doc if doc is not None else policy.sample(rng, vocab)
    modified, record = apply_modification(kind, base, rng, scheme, vocab)
    gold = compute_gold(record, modified)
    return TaskInstance(
        id=instance_id,
        task=kind,
        source=tuple(modified.tokens()),
        target=gold,
        meta={"records": [record.to_meta()]},
    )
