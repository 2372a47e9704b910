"""Reserved trigger tokens planted into documents by the summarization subtasks.

A scheme bundles the plain trigger keywords, classed keyword inventories
(three object categories shared by the replace/segregate tasks plus two
sentiment classes), a synonym table, markers, and the reserved answer
tokens. All reserved tokens must stay disjoint from the nonsense
vocabulary and from each other so oracles remain exact.

Schemes load from an INI-style file (see DEFAULT_SCHEME_TEXT) or fall
back to the built-in default.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass
from pathlib import Path

from .vocab import Vocabulary

# Kinds that draw from the plain keyword pool, in band order. Each gets a
# fixed contiguous slice of the pool so planted keywords identify their
# task inside composed instances.
BAND_KINDS = (
    "CheckKeyword",
    "MajorityKeyword",
    "CopyKwdOneSentence",
    "CopyKwdMultipleSentInOrder",
    "CopyKwdMultipleSentSorted",
    "CopyKwdMultipleSentShuffled",
    "JoinClauses",
)

STRUCTURAL_TOKENS = frozenset({".", "!", "?", ",", "[MASK]"})


@dataclass(frozen=True)
class KeywordScheme:
    plain_keywords: tuple[str, ...]
    classed_keywords: dict[str, tuple[str, ...]]
    category_classes: tuple[str, ...]
    sentiment_classes: tuple[str, ...]
    synonyms: dict[str, tuple[str, ...]]
    section_headers: dict[str, str]
    bullet_marker: str = "*"
    quote_open: str = '"'
    quote_close: str = '"'
    cutoff_keyword: str = "cutoff"
    numeric_trigger: str = "number"
    yes_token: str = "yeskwd"
    no_token: str = "nokwd"
    above_token: str = "above"
    below_token: str = "below"

    def band(self, kind: str) -> tuple[str, ...]:
        """This kind's slice of the plain keyword pool."""
        i = BAND_KINDS.index(kind)
        n = len(self.plain_keywords)
        per = n // len(BAND_KINDS)
        lo = i * per
        hi = lo + per if i < len(BAND_KINDS) - 1 else n
        return self.plain_keywords[lo:hi]

    def keyword_rank(self, keyword: str) -> int:
        """Canonical ordering index of a plain keyword."""
        return self.plain_keywords.index(keyword)

    def reserved_tokens(self) -> tuple[str, ...]:
        toks: list[str] = list(self.plain_keywords)
        for members in self.classed_keywords.values():
            toks.extend(members)
        toks.extend(self.classed_keywords.keys())
        for src, syns in self.synonyms.items():
            toks.append(src)
            toks.extend(syns)
        toks.extend(self.section_headers.values())
        toks.extend(
            [
                self.bullet_marker,
                self.quote_open,
                self.quote_close,
                self.cutoff_keyword,
                self.numeric_trigger,
                self.yes_token,
                self.no_token,
                self.above_token,
                self.below_token,
            ]
        )
        return tuple(toks)

    def validate(self, vocab: Vocabulary | None = None) -> None:
        tokens = self.reserved_tokens()
        # identical open/close quote marks are the one permitted duplicate
        dedup = list(tokens)
        if self.quote_open == self.quote_close:
            dedup.remove(self.quote_close)
        if len(set(dedup)) != len(dedup):
            dupes = sorted({t for t in dedup if dedup.count(t) > 1})
            raise ValueError(f"reserved tokens not pairwise distinct: {dupes}")
        for t in tokens:
            if not t or " " in t:
                raise ValueError(f"bad reserved token {t!r}")
            if t in STRUCTURAL_TOKENS:
                raise ValueError(f"reserved token {t!r} collides with structural tokens")
            if t.isdigit():
                raise ValueError(f"reserved token {t!r} would shadow planted numbers")
        if vocab is not None:
            clash = sorted(set(tokens) & vocab.word_set)
            if clash:
                raise ValueError(f"reserved tokens collide with vocabulary: {clash}")
        if len(self.plain_keywords) < 2 * len(BAND_KINDS):
            raise ValueError(
                f"need at least {2 * len(BAND_KINDS)} plain keywords, "
                f"got {len(self.plain_keywords)}"
            )
        if len(self.category_classes) != 3:
            raise ValueError("exactly 3 object categories required")
        if len(self.sentiment_classes) != 2:
            raise ValueError("exactly 2 sentiment classes required")
        for label in self.category_classes + self.sentiment_classes:
            if label not in self.classed_keywords or not self.classed_keywords[label]:
                raise ValueError(f"class {label!r} has no member keywords")
        members_seen: set[str] = set()
        for label, members in self.classed_keywords.items():
            if len(set(members)) != len(members):
                raise ValueError(f"class {label!r} members not distinct")
            if members_seen & set(members):
                raise ValueError("class member sets overlap")
            members_seen.update(members)
        for label in self.category_classes:
            if label not in self.section_headers:
                raise ValueError(f"missing section header for class {label!r}")
        if not self.synonyms:
            raise ValueError("synonym table is empty")
        for src, syns in self.synonyms.items():
            if not syns or len(set(syns)) != len(syns):
                raise ValueError(f"synonyms for {src!r} empty or not distinct")


DEFAULT_SCHEME_TEXT = """\
[keywords]
plain = keyword1 keyword2 keyword3 keyword4 keyword5 keyword6 keyword7 keyword8
    keyword9 keyword10 keyword11 keyword12 keyword13 keyword14 keyword15 keyword16
    keyword17 keyword18 keyword19 keyword20 keyword21 keyword22 keyword23 keyword24
    keyword25 keyword26 keyword27 keyword28

[classes]
class1 = class1word1 class1word2 class1word3 class1word4 class1word5 class1word6
class2 = class2word1 class2word2 class2word3 class2word4 class2word5 class2word6
class3 = class3word1 class3word2 class3word3 class3word4 class3word5 class3word6

[sentiment]
positive = positive1 positive2 positive3 positive4 positive5
negative = negative1 negative2 negative3 negative4 negative5

[synonyms]
src1 = tgt1a tgt1b tgt1c
src2 = tgt2a tgt2b tgt2c
src3 = tgt3a tgt3b tgt3c
src4 = tgt4a tgt4b tgt4c

[sections]
class1 = section1
class2 = section2
class3 = section3

[markers]
bullet = *
quote_open = "
quote_close = "
cutoff = cutoff
numeric_trigger = number

[answers]
yes = yeskwd
no = nokwd
above = above
below = below
"""


def _parse_scheme(parser: configparser.ConfigParser) -> KeywordScheme:
    def tokens(section: str, key: str) -> tuple[str, ...]:
        return tuple(parser.get(section, key).split())

    def token(section: str, key: str, fallback: str) -> str:
        if parser.has_option(section, key):
            return parser.get(section, key).strip()
        return fallback

    classed: dict[str, tuple[str, ...]] = {}
    categories: tuple[str, ...] = ()
    sentiments: tuple[str, ...] = ()
    if parser.has_section("classes"):
        categories = tuple(parser.options("classes"))
        for label in categories:
            classed[label] = tokens("classes", label)
    if parser.has_section("sentiment"):
        sentiments = tuple(parser.options("sentiment"))
        for label in sentiments:
            classed[label] = tokens("sentiment", label)
    synonyms = {}
    if parser.has_section("synonyms"):
        for src in parser.options("synonyms"):
            synonyms[src] = tokens("synonyms", src)
    headers = {}
    if parser.has_section("sections"):
        for label in parser.options("sections"):
            headers[label] = parser.get("sections", label).strip()
    return KeywordScheme(
        plain_keywords=tokens("keywords", "plain"),
        classed_keywords=classed,
        category_classes=categories,
        sentiment_classes=sentiments,
        synonyms=synonyms,
        section_headers=headers,
        bullet_marker=token("markers", "bullet", "*"),
        quote_open=token("markers", "quote_open", '"'),
        quote_close=token("markers", "quote_close", '"'),
        cutoff_keyword=token("markers", "cutoff", "cutoff"),
        numeric_trigger=token("markers", "numeric_trigger", "number"),
        yes_token=token("answers", "yes", "yeskwd"),
        no_token=token("answers", "no", "nokwd"),
        above_token=token("answers", "above", "above"),
        below_token=token("answers", "below", "below"),
    )


def load_scheme_text(text: str, vocab: Vocabulary | None = None) -> KeywordScheme:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep case and symbols in keys
    try:
        parser.read_file(io.StringIO(text))
        scheme = _parse_scheme(parser)
    except (configparser.Error, KeyError) as exc:
        raise ValueError(f"bad keyword scheme: {exc}") from exc
    scheme.validate(vocab)
    return scheme


def load_scheme(path: str | Path, vocab: Vocabulary | None = None) -> KeywordScheme:
    return load_scheme_text(Path(path).read_text(encoding="utf-8"), vocab)


def default_scheme(vocab: Vocabulary | None = None) -> KeywordScheme:
    return load_scheme_text(DEFAULT_SCHEME_TEXT, vocab)
