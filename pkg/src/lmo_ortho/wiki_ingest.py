"""Build a tagged corpus from a MediaWiki ``pages-articles`` XML export.

Pages are streamed out of the dump, their orthography template is looked up,
markup is stripped to plain lines, and the lines go through an ordered chain
of quality filters.
"""

from __future__ import annotations

import html
import io
import logging
import re
import sys
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator, Sequence
from xml.parsers import expat

from .corpus import OrthographyClass, Sample

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

CONFIG_ENV_VAR = "LMO_ORTHO_CONFIG"


class ConfigError(ValueError):
    pass


class DumpParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


# ---------------------------------------------------------------------------
# dump reading


@dataclass(frozen=True)
class RawPage:
    title: str
    wikitext: str
    namespace: int = 0

    def __post_init__(self):
        if not self.title:
            raise ValueError("page title is empty")


_REDIRECT_RE = re.compile(r"^\s*#\s*(redirect|rinvia|rimando)\b", re.IGNORECASE)


class _PageCollector:
    def __init__(self):
        self.pages: list[RawPage] = []
        self.path: list[str] = []
        self.buf: list[str] | None = None
        self._reset()

    def _reset(self):
        self.title = ""
        self.ns = "0"
        self.text = ""
        self.redirect = False

    def start(self, name, attrs):
        self.path.append(name)
        if name == "page":
            self._reset()
        elif name == "redirect" and len(self.path) >= 2 and self.path[-2] == "page":
            self.redirect = True
        elif self._capturing():
            self.buf = []

    def _capturing(self) -> bool:
        p = self.path
        if len(p) >= 2 and p[-2] == "page" and p[-1] in ("title", "ns"):
            return True
        return len(p) >= 3 and p[-3:-1] == ["page", "revision"] and p[-1] == "text"

    def data(self, chunk):
        if self.buf is not None:
            self.buf.append(chunk)

    def end(self, name):
        if self.buf is not None and self._capturing():
            value = "".join(self.buf)
            if name == "title":
                self.title = value
            elif name == "ns":
                self.ns = value.strip()
            else:
                self.text = value
            self.buf = None
        self.path.pop()
        if name == "page":
            is_article = self.ns in ("", "0")
            if is_article and not self.redirect and not _REDIRECT_RE.match(self.text) and self.title:
                self.pages.append(RawPage(self.title, self.text, 0))


def extract_pages(dump: BinaryIO | bytes, chunk_size: int = 1 << 20) -> Iterator[RawPage]:
    """Stream article pages (namespace 0, not redirects) in document order.

    Pages completed before a parse error are yielded before the
    :class:`DumpParseError` is raised.
    """
    if isinstance(dump, (bytes, bytearray)):
        dump = io.BytesIO(dump)
    parser = expat.ParserCreate()
    parser.buffer_text = True
    collector = _PageCollector()
    parser.StartElementHandler = collector.start
    parser.EndElementHandler = collector.end
    parser.CharacterDataHandler = collector.data

    def drain():
        pages, collector.pages = collector.pages, []
        return pages

    while True:
        chunk = dump.read(chunk_size)
        final = not chunk
        try:
            parser.Parse(chunk, final)
        except expat.ExpatError as exc:
            yield from drain()
            reason = expat.ErrorString(exc.code)
            if final and exc.code in (expat.errors.codes[expat.errors.XML_ERROR_NO_ELEMENTS],
                                      expat.errors.codes[expat.errors.XML_ERROR_UNCLOSED_TOKEN]):
                reason = f"truncated dump: {reason}"
            raise DumpParseError(f"malformed XML: {reason}", parser.ErrorByteIndex) from None
        yield from drain()
        if final:
            return


# ---------------------------------------------------------------------------
# markup stripping

# templates whose last positional argument is running text
TEXT_TEMPLATES = frozenset({"lang", "nowrap", "small", "big", "sc", "smallcaps", "lj", "transl", "nobr"})
DROP_LINK_NAMESPACES = frozenset({
    "file", "image", "immagine", "imagine", "archivi", "media", "category", "categoria",
    "categorie", "template", "wikipedia", "wp", "help", "portal", "portaal", "special",
})
_DROP_ELEMENTS = ("ref", "math", "gallery", "timeline", "source", "syntaxhighlight", "score",
                  "imagemap", "references", "chem", "hiero", "graph", "mapframe", "templatedata")

_COMMENT_RE = re.compile(r"<!--.*?(-->|\Z)", re.DOTALL)
_SELF_CLOSING_RE = re.compile(r"<(%s)\b[^>]*/>" % "|".join(_DROP_ELEMENTS), re.IGNORECASE)
_DROP_BLOCK_RE = re.compile(r"<(%s)\b[^>]*>.*?</\1\s*>" % "|".join(_DROP_ELEMENTS),
                            re.IGNORECASE | re.DOTALL)
_INNER_TEMPLATE_RE = re.compile(r"\{\{([^{}]*)\}\}")
_INNER_TABLE_RE = re.compile(r"\{\|(?:(?!\{\|).)*?\|\}", re.DOTALL)
_INNER_LINK_RE = re.compile(r"\[\[([^\[\]]*)\]\]")
_EXT_LINK_RE = re.compile(r"\[(?:https?:|ftp:)?//[^\s\]]+\s*([^\]]*)\]")
_BR_RE = re.compile(r"<br\s*/?>", re.IGNORECASE)
_TAG_RE = re.compile(r"</?[A-Za-z][^<>]*>")
_BOLD_ITALIC_RE = re.compile(r"'{2,}")
_MAGIC_RE = re.compile(r"__[A-Z]+__")
_HEADING_RE = re.compile(r"^=+.*=+$")
_INTERWIKI_RE = re.compile(r"^[a-z]{2,3}(-[a-z]+)?:")
_WS_RE = re.compile(r"\s+")


def _template_text(body: str) -> str:
    parts = body.split("|")
    name = _normalize_name(parts[0])
    if name in TEXT_TEMPLATES:
        positional = [p for p in parts[1:] if "=" not in p]
        if positional:
            return positional[-1]
    return ""


def _link_text(body: str) -> str:
    target, _, label = body.partition("|")
    target = target.strip()
    if target.startswith(":"):
        target = target[1:]
    elif ":" in target:
        prefix = target.split(":", 1)[0].strip().lower()
        if prefix in DROP_LINK_NAMESPACES or _INTERWIKI_RE.match(target):
            return ""
    if "|" in label:
        label = label.rsplit("|", 1)[1]
    return label if label.strip() else target


def _sub_until_stable(pattern: re.Pattern, repl, text: str) -> str:
    while True:
        new = pattern.sub(repl, text)
        if new == text:
            return new
        text = new


_RESIDUE = ("{{", "}}", "[[", "]]", "</")


def _scrub_residue(line: str) -> str:
    while any(tok in line for tok in _RESIDUE):
        for tok in _RESIDUE:
            line = line.replace(tok, "")
    return line


def strip_markup(wikitext: str, keep_lists: bool = False) -> list[str]:
    """Plain-text lines of a wikitext page.

    Templates are deleted except a few that wrap running text, ``[[t|label]]``
    becomes ``label``, file/category/interwiki links, tables, references,
    headings and (unless ``keep_lists``) list items are dropped. Never raises.
    """
    text = _COMMENT_RE.sub("", wikitext)
    text = _SELF_CLOSING_RE.sub("", text)
    text = _DROP_BLOCK_RE.sub("", text)
    text = _sub_until_stable(_INNER_TEMPLATE_RE, lambda m: _template_text(m.group(1)), text)
    text = _sub_until_stable(_INNER_TABLE_RE, "", text)
    text = _sub_until_stable(_INNER_LINK_RE, lambda m: _link_text(m.group(1)), text)
    text = _EXT_LINK_RE.sub(lambda m: m.group(1), text)
    text = _BR_RE.sub(" ", text)
    text = _TAG_RE.sub("", text)
    text = _BOLD_ITALIC_RE.sub("", text)
    text = _MAGIC_RE.sub("", text)

    lines = []
    for raw in text.split("\n"):
        line = raw.strip()
        if not line or _HEADING_RE.match(line) or line.startswith("----"):
            continue
        if line[0] in "*#:;":
            if not keep_lists:
                continue
            line = line.lstrip("*#:; ")
        if line[0] in "|!":
            continue
        line = _WS_RE.sub(" ", _scrub_residue(html.unescape(line))).strip()
        line = _scrub_residue(line)
        if line:
            lines.append(line)
    return lines


# ---------------------------------------------------------------------------
# orthography tags


def _normalize_name(name: str) -> str:
    name = _WS_RE.sub(" ", name.replace("_", " ")).strip().casefold()
    for prefix in ("template:", "modell:", "model:"):
        if name.startswith(prefix):
            name = name[len(prefix):].strip()
    return name


class TagMap:
    """Template name -> orthography class, names compared case-insensitively."""

    def __init__(self, aliases: dict):
        self.aliases: dict[str, OrthographyClass] = {}
        for cls, names in aliases.items():
            cls = OrthographyClass.parse(str(cls))
            if cls is OrthographyClass.NO_TAG:
                raise ConfigError("NO_TAG cannot be assigned to a template")
            for name in names:
                key = _normalize_name(name)
                if key in self.aliases and self.aliases[key] is not cls:
                    raise ConfigError(f"template {name!r} is mapped to two classes")
                self.aliases[key] = cls

    def lookup(self, template_name: str) -> OrthographyClass | None:
        return self.aliases.get(_normalize_name(template_name))

    def __len__(self):
        return len(self.aliases)


_TEMPLATE_NAME_RE = re.compile(r"\{\{([^{}|]*)")


def find_orthography_tags(wikitext: str, tag_map: TagMap) -> list[OrthographyClass]:
    """Every mapped template invocation, in document order."""
    found = []
    for m in _TEMPLATE_NAME_RE.finditer(wikitext):
        cls = tag_map.lookup(m.group(1))
        if cls is not None:
            found.append(cls)
    return found


def detect_orthography_tag(wikitext: str, tag_map: TagMap, title: str = "") -> OrthographyClass:
    tags = find_orthography_tags(wikitext, tag_map)
    if not tags:
        return OrthographyClass.NO_TAG
    if len(set(tags)) > 1:
        log.warning(
            "page %r carries several orthography templates %s; using %s",
            title, sorted({t.value for t in tags}), tags[0].value,
        )
    return tags[0]


# ---------------------------------------------------------------------------
# filtering

REMOVAL_REASONS = ("no_tag", "duplicate", "too_short", "non_latin", "foreign_language", "boilerplate")
_EDGE_PUNCT = "\"'«»“”‘’()[]{}.,;:!?¿¡-–—…/"


@dataclass(frozen=True)
class FilterConfig:
    min_words: int = 4
    dedup: bool = True
    latin_ratio_threshold: float = 0.5
    boilerplate_patterns: tuple[str, ...] = ()
    stoplists: dict = field(default_factory=dict)
    stoplist_threshold: float = 0.6

    def __post_init__(self):
        if self.min_words < 1:
            raise ConfigError("min_words must be >= 1")
        for name in ("latin_ratio_threshold", "stoplist_threshold"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        compiled = []
        for pat in self.boilerplate_patterns:
            try:
                compiled.append(re.compile(pat))
            except re.error as exc:
                raise ConfigError(f"invalid boilerplate pattern {pat!r}: {exc}") from None
        object.__setattr__(self, "boilerplate_patterns", tuple(self.boilerplate_patterns))
        object.__setattr__(self, "_compiled", tuple(compiled))
        object.__setattr__(
            self, "stoplists", {lang: frozenset(w.casefold() for w in words) for lang, words in self.stoplists.items()}
        )


@dataclass
class FilterReport:
    kept: int = 0
    removed: dict = field(default_factory=lambda: {r: 0 for r in REMOVAL_REASONS})
    untagged: list[str] = field(default_factory=list, repr=False)
    warnings: list[str] = field(default_factory=list, repr=False)

    @property
    def total(self) -> int:
        return self.kept + sum(self.removed.values())

    def to_text(self) -> str:
        total = self.total
        lines = [f"input_lines: {total}", f"kept: {self.kept}"]
        for reason in REMOVAL_REASONS:
            lines.append(f"removed.{reason}: {self.removed[reason]}")
        removed = sum(self.removed.values())
        lines.append(f"removed.total: {removed}")
        lines.append(f"removed.percent: {100.0 * removed / total if total else 0.0:.2f}")
        return "\n".join(lines) + "\n"


def tokens(line: str) -> list[str]:
    return line.split()


def latin_ratio(line: str) -> float:
    """Share of Latin-script letters among all letters; 0 when there are none."""
    letters = [ch for ch in line if ch.isalpha()]
    if not letters:
        return 0.0
    latin = sum(1 for ch in letters if unicodedata.name(ch, "").startswith("LATIN"))
    return latin / len(letters)


def stoplist_ratios(line: str, stoplists: dict) -> dict[str, float]:
    words = [w.strip(_EDGE_PUNCT).casefold() for w in line.split()]
    words = [w for w in words if w]
    if not words:
        return {lang: 0.0 for lang in stoplists}
    return {lang: sum(w in stop for w in words) / len(words) for lang, stop in stoplists.items()}


def _rejection(line: str, config: FilterConfig) -> str | None:
    if len(tokens(line)) < config.min_words:
        return "too_short"
    if latin_ratio(line) < config.latin_ratio_threshold:
        return "non_latin"
    ratios = stoplist_ratios(line, config.stoplists)
    if ratios and max(ratios.values()) >= config.stoplist_threshold:
        return "foreign_language"
    if any(p.search(line) for p in config._compiled):
        return "boilerplate"
    return None


def filter_lines(
    tagged_lines: Iterable[tuple[str, OrthographyClass]],
    config: FilterConfig,
) -> tuple[list[Sample], FilterReport]:
    """Apply, in order: untagged split-off, dedup, length, script, language, boilerplate.

    Untagged lines are counted under ``no_tag`` and kept on ``report.untagged``
    for later bulk classification.
    """
    report = FilterReport()
    seen: set[str] = set()
    kept: list[Sample] = []
    for line, tag in tagged_lines:
        line = _WS_RE.sub(" ", line).strip()
        if tag is OrthographyClass.NO_TAG:
            report.removed["no_tag"] += 1
            if line:
                report.untagged.append(line)
            continue
        if config.dedup:
            if line in seen:
                report.removed["duplicate"] += 1
                continue
            seen.add(line)
        reason = _rejection(line, config)
        if reason is not None:
            report.removed[reason] += 1
            continue
        kept.append(Sample(line, tag))
        report.kept += 1
    return kept, report


def borderline(samples: Sequence[Sample], config: FilterConfig, margin: float = 0.1) -> list[tuple[Sample, str]]:
    """Kept samples that passed a filter by a small margin, for manual review."""
    out = []
    for s in samples:
        notes = []
        if len(tokens(s.text)) == config.min_words:
            notes.append("min_words")
        if latin_ratio(s.text) < config.latin_ratio_threshold + margin:
            notes.append(f"latin_ratio={latin_ratio(s.text):.2f}")
        ratios = stoplist_ratios(s.text, config.stoplists)
        for lang, r in ratios.items():
            if r >= config.stoplist_threshold - margin:
                notes.append(f"{lang}={r:.2f}")
        if notes:
            out.append((s, ",".join(notes)))
    return out


# ---------------------------------------------------------------------------
# configuration


def default_config_text() -> str:
    return resources.files("lmo_ortho").joinpath("data/default_config.toml").read_text(encoding="utf-8")


def parse_config(text: str) -> tuple[TagMap, FilterConfig]:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    try:
        tag_map = TagMap(doc.get("tags", {}))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    f = dict(doc.get("filter", {}))
    unknown = set(f) - {"min_words", "dedup", "latin_ratio_threshold", "boilerplate_patterns", "stoplist_threshold"}
    if unknown:
        raise ConfigError(f"unknown [filter] keys: {sorted(unknown)}")
    stoplists = doc.get("stoplists", {})
    try:
        config = FilterConfig(
            boilerplate_patterns=tuple(f.pop("boilerplate_patterns", ())), stoplists=stoplists, **f
        )
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return tag_map, config


def load_config(path: str | Path | None = None) -> tuple[TagMap, FilterConfig]:
    """Parse a TOML config file; ``None`` loads the packaged defaults."""
    if path is None:
        return parse_config(default_config_text())
    return parse_config(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# whole pipeline


@dataclass
class IngestResult:
    samples: list[Sample]
    report: FilterReport
    n_pages: int
    n_lines: int

    @property
    def untagged(self) -> list[str]:
        return self.report.untagged


def tag_page_lines(pages: Iterable[RawPage], tag_map: TagMap) -> Iterator[tuple[str, OrthographyClass]]:
    for page in pages:
        tag = detect_orthography_tag(page.wikitext, tag_map, page.title)
        for line in strip_markup(page.wikitext):
            yield line, tag


def ingest(pages: Iterable[RawPage], tag_map: TagMap, config: FilterConfig) -> IngestResult:
    counter = {"pages": 0, "lines": 0}

    def counted():
        for page in pages:
            counter["pages"] += 1
            yield page

    def lines():
        for item in tag_page_lines(counted(), tag_map):
            counter["lines"] += 1
            yield item

    samples, report = filter_lines(lines(), config)
    return IngestResult(samples, report, counter["pages"], counter["lines"])
