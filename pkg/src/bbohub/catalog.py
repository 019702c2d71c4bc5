"""Package catalog: README-driven pages, the full-text/tag search index, and
the static site artifacts.

`catalog.json` and `search_index.json` are the frozen contract consumed by
both the CLI search and the browser frontend: the frontend re-implements the
same conjunctive TF-IDF semantics over identical bytes.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from . import mdtext
from .errors import ValidationError
from .registry import PackageManifest, ValidationReport, normalize_tag, parse_manifest, validate_package

SCHEMA_VERSION = 1

# term-frequency multipliers per field
FIELD_WEIGHTS = {"title": 3, "summary": 2, "tags": 2, "body": 1}

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric word-splitting; applied identically at index
    and query time (and mirrored by the frontend)."""
    return _TOKEN_RE.findall(text.lower())


@dataclass
class PageDoc:
    """One package page: README content merged with manifest metadata."""

    ref: str
    title: str
    summary: str
    authors: list[str]
    license: str
    tags: list[str]
    body_text: str
    body_html: str
    thumbnail: str | None = None
    example_snippet: str | None = None
    dependencies: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "ref": self.ref,
            "title": self.title,
            "summary": self.summary,
            "authors": list(self.authors),
            "license": self.license,
            "tags": list(self.tags),
            "body_text": self.body_text,
            "body_html": self.body_html,
            "thumbnail": self.thumbnail,
            "example_snippet": self.example_snippet,
            "dependencies": list(self.dependencies),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "PageDoc":
        return cls(
            ref=data["ref"],
            title=data["title"],
            summary=data["summary"],
            authors=list(data["authors"]),
            license=data["license"],
            tags=list(data["tags"]),
            body_text=data["body_text"],
            body_html=data["body_html"],
            thumbnail=data.get("thumbnail"),
            example_snippet=data.get("example_snippet"),
            dependencies=list(data.get("dependencies", [])),
        )


def build_page(readme_text: str, manifest: PackageManifest) -> PageDoc:
    """Derive the package page from its README plus manifest metadata."""
    if not readme_text or not readme_text.strip():
        raise ValidationError(f"{manifest.ref}: README.md is empty")
    title = mdtext.extract_title(readme_text) or manifest.name
    return PageDoc(
        ref=str(manifest.ref),
        title=title,
        summary=manifest.summary,
        authors=list(manifest.authors),
        license=manifest.license,
        tags=[normalize_tag(t) for t in manifest.tags],
        body_text=mdtext.markdown_to_text(readme_text),
        body_html=mdtext.render_markdown(readme_text),
        thumbnail=mdtext.extract_first_image(readme_text),
        example_snippet=mdtext.extract_first_fence(readme_text),
        dependencies=list(manifest.dependencies),
    )


@dataclass
class SearchIndex:
    """Inverted index over PageDocs: term -> (doc ordinal, weighted tf)."""

    docs: list[str]  # refs, ordered
    terms: dict[str, list[tuple[int, int]]]
    doc_lengths: list[int]
    tag_map: dict[str, list[int]]

    def to_dict(self) -> dict:
        return {
            "version": SCHEMA_VERSION,
            "docs": list(self.docs),
            "terms": {t: [[o, f] for o, f in postings] for t, postings in self.terms.items()},
            "doc_lengths": list(self.doc_lengths),
            "tag_map": {t: list(ords) for t, ords in self.tag_map.items()},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "SearchIndex":
        return cls(
            docs=list(data["docs"]),
            terms={t: [(int(o), int(f)) for o, f in postings] for t, postings in data["terms"].items()},
            doc_lengths=[int(n) for n in data["doc_lengths"]],
            tag_map={t: [int(o) for o in ords] for t, ords in data["tag_map"].items()},
        )


def build_index(docs: Sequence[PageDoc]) -> SearchIndex:
    """Index title/summary/tags/body with their field weights applied as
    term-frequency multipliers."""
    terms: dict[str, list[tuple[int, int]]] = {}
    doc_lengths: list[int] = []
    tag_map: dict[str, list[int]] = {}
    for ordinal, doc in enumerate(docs):
        counts: Counter[str] = Counter()
        for token in tokenize(doc.title):
            counts[token] += FIELD_WEIGHTS["title"]
        for token in tokenize(doc.summary):
            counts[token] += FIELD_WEIGHTS["summary"]
        for tag in doc.tags:
            for token in tokenize(tag):
                counts[token] += FIELD_WEIGHTS["tags"]
        for token in tokenize(doc.body_text):
            counts[token] += FIELD_WEIGHTS["body"]
        for token in sorted(counts):
            terms.setdefault(token, []).append((ordinal, counts[token]))
        doc_lengths.append(sum(counts.values()))
        for tag in doc.tags:
            ords = tag_map.setdefault(tag, [])
            if not ords or ords[-1] != ordinal:
                ords.append(ordinal)
    return SearchIndex(
        docs=[doc.ref for doc in docs],
        terms=dict(sorted(terms.items())),
        doc_lengths=doc_lengths,
        tag_map=dict(sorted(tag_map.items())),
    )


def _idf(n_docs: int, df: int) -> float:
    return math.log((n_docs + 1) / (df + 1)) + 1.0


def _doc_norms(index: SearchIndex) -> list[float]:
    n = len(index.docs)
    sums = [0.0] * n
    for _, postings in index.terms.items():
        idf = _idf(n, len(postings))
        for ordinal, tf in postings:
            w = tf * idf
            sums[ordinal] += w * w
    return [math.sqrt(s) for s in sums]


def search(index: SearchIndex, query: str, tags: Sequence[str] = ()) -> list[tuple[str, float]]:
    """Conjunctive full-text + tag search, ranked by TF-IDF cosine score.

    Candidates must contain every query token AND carry every requested tag;
    ties break by ref ascending. An empty query with tags returns all
    tag-matching docs ordered by ref.
    """
    n = len(index.docs)
    if n == 0:
        return []

    candidates = set(range(n))
    for tag in tags:
        candidates &= set(index.tag_map.get(normalize_tag(tag), []))
        if not candidates:
            return []

    query_tokens = tokenize(query)
    if not query_tokens:
        return [(index.docs[o], 0.0) for o in sorted(candidates, key=lambda o: index.docs[o])]

    tf_by_doc: dict[str, dict[int, int]] = {}
    for token in set(query_tokens):
        postings = index.terms.get(token)
        if not postings:
            return []
        tf_by_doc[token] = dict(postings)
        candidates &= set(tf_by_doc[token])
        if not candidates:
            return []

    norms = _doc_norms(index)
    query_counts = Counter(query_tokens)
    query_weights = {
        token: count * _idf(n, len(index.terms[token])) for token, count in query_counts.items()
    }
    query_norm = math.sqrt(sum(w * w for w in query_weights.values()))

    scored = []
    for ordinal in candidates:
        dot = sum(
            query_weights[token] * tf_by_doc[token][ordinal] * _idf(n, len(index.terms[token]))
            for token in query_weights
        )
        denom = query_norm * norms[ordinal]
        scored.append((index.docs[ordinal], dot / denom if denom > 0 else 0.0))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored


# --------------------------------------------------------------------------
# site emission


def _dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def emit_site(docs: Sequence[PageDoc], index: SearchIndex, out_dir: str | Path) -> list[Path]:
    """Write catalog.json, search_index.json, and one page file per package.

    Output bytes are a pure function of (docs, index)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ordered = sorted(docs, key=lambda d: d.ref)
    written: list[Path] = []

    catalog_path = out_dir / "catalog.json"
    catalog_path.write_text(
        _dump_json({"version": SCHEMA_VERSION, "packages": [d.to_dict() for d in ordered]}),
        encoding="utf-8",
    )
    written.append(catalog_path)

    index_path = out_dir / "search_index.json"
    index_path.write_text(_dump_json(index.to_dict()), encoding="utf-8")
    written.append(index_path)

    for doc in ordered:
        category, name = doc.ref.split("/")
        page_path = out_dir / "packages" / category / f"{name}.json"
        page_path.parent.mkdir(parents=True, exist_ok=True)
        page_path.write_text(_dump_json(doc.to_dict()), encoding="utf-8")
        written.append(page_path)
    return written


# --------------------------------------------------------------------------
# registry walking


def collect_pages(registry_root: str | Path) -> tuple[list[PageDoc], list[ValidationReport]]:
    """Validate and build a page for every package under a local registry
    tree. Invalid packages produce a failing report and are skipped; valid
    ones are still returned."""
    root = Path(registry_root) / "package"
    pages: list[PageDoc] = []
    reports: list[ValidationReport] = []
    if not root.is_dir():
        raise ValidationError(f"{registry_root} has no package/ tree")
    for pkg_dir in sorted(p for p in root.glob("*/*") if p.is_dir()):
        report = validate_package(pkg_dir)
        reports.append(report)
        if not report.ok:
            continue
        manifest, _ = parse_manifest(json.loads((pkg_dir / "manifest.json").read_text(encoding="utf-8")))
        pages.append(build_page((pkg_dir / "README.md").read_text(encoding="utf-8"), manifest))
    pages.sort(key=lambda d: d.ref)
    return pages, reports
