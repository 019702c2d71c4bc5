"""Minimal README markdown handling: sanitized HTML rendering, plain-text
extraction for indexing, and structural probes (title, first code fence,
first image).

The renderer escapes ALL raw HTML, so nothing executable can pass through;
script/style/iframe elements and inline event-handler attributes are removed
from the source outright. Supported constructs: ATX headings, fenced code,
unordered/ordered lists, blockquotes, horizontal rules, paragraphs, inline
code/bold/italic/links/images.
"""

from __future__ import annotations

import html
import re
import urllib.parse

_DANGEROUS_BLOCK_RE = re.compile(r"<(script|style|iframe)\b.*?</\1\s*>", re.IGNORECASE | re.DOTALL)
_DANGEROUS_OPEN_RE = re.compile(r"<(script|style|iframe)\b[^>]*>", re.IGNORECASE)
_EVENT_HANDLER_RE = re.compile(r"\son\w+\s*=\s*(\"[^\"]*\"|'[^']*'|[^\s>]+)", re.IGNORECASE)

_FENCE_RE = re.compile(r"^```\s*([\w+-]*)\s*$")
_HEADING_RE = re.compile(r"^(#{1,6})\s+(.*?)\s*#*\s*$")
_HR_RE = re.compile(r"^\s{0,3}([-*_])\s*(?:\1\s*){2,}$")
_ULIST_RE = re.compile(r"^\s{0,3}[-*+]\s+(.*)$")
_OLIST_RE = re.compile(r"^\s{0,3}\d+[.)]\s+(.*)$")
_QUOTE_RE = re.compile(r"^\s{0,3}>\s?(.*)$")
_TABLE_ROW_RE = re.compile(r"^\s{0,3}\|(.+)\|\s*$")
_TABLE_RULE_RE = re.compile(r"^\s{0,3}\|(\s*:?-+:?\s*\|)+\s*$")

_CODE_SPAN_RE = re.compile(r"`([^`]+)`")
_IMAGE_RE = re.compile(r"!\[([^\]]*)\]\(([^)\s]+)(?:\s+\"[^\"]*\")?\)")
_LINK_RE = re.compile(r"\[([^\]]+)\]\(([^)\s]+)(?:\s+\"[^\"]*\")?\)")
_BOLD_RE = re.compile(r"\*\*(.+?)\*\*")
_ITALIC_RE = re.compile(r"(?<!\*)\*([^*\s][^*]*?)\*(?!\*)")
_UNDER_ITALIC_RE = re.compile(r"(?<![\w_])_([^_]+)_(?![\w_])")
_RAW_TAG_RE = re.compile(r"<[^>\n]+>")

_SAFE_SCHEMES = ("http", "https", "mailto", "")


def strip_dangerous_html(source: str) -> str:
    """Drop executable HTML from README source before any other processing."""
    source = _DANGEROUS_BLOCK_RE.sub("", source)
    source = _DANGEROUS_OPEN_RE.sub("", source)
    source = _EVENT_HANDLER_RE.sub("", source)
    return source


def _safe_url(url: str) -> str:
    scheme = urllib.parse.urlparse(url).scheme.lower()
    return url if scheme in _SAFE_SCHEMES else "#"


def _inline(text: str) -> str:
    # pull code spans out first so their content is never re-processed
    spans: list[str] = []

    def stash(match: re.Match) -> str:
        spans.append(match.group(1))
        return f"\x00{len(spans) - 1}\x00"

    text = _CODE_SPAN_RE.sub(stash, text)
    text = html.escape(text, quote=True)
    text = _IMAGE_RE.sub(
        lambda m: f'<img src="{_safe_url(m.group(2))}" alt="{m.group(1)}" />', text
    )
    text = _LINK_RE.sub(lambda m: f'<a href="{_safe_url(m.group(2))}">{m.group(1)}</a>', text)
    text = _BOLD_RE.sub(r"<strong>\1</strong>", text)
    text = _ITALIC_RE.sub(r"<em>\1</em>", text)
    text = _UNDER_ITALIC_RE.sub(r"<em>\1</em>", text)
    for i, span in enumerate(spans):
        text = text.replace(f"\x00{i}\x00", f"<code>{html.escape(span, quote=True)}</code>")
    return text


def render_markdown(source: str) -> str:
    """Render README markdown to sanitized HTML."""
    lines = strip_dangerous_html(source).split("\n")
    out: list[str] = []
    i = 0
    while i < len(lines):
        line = lines[i]
        if not line.strip():
            i += 1
            continue

        fence = _FENCE_RE.match(line)
        if fence:
            lang = fence.group(1)
            body: list[str] = []
            i += 1
            while i < len(lines) and not _FENCE_RE.match(lines[i]):
                body.append(lines[i])
                i += 1
            i += 1  # closing fence (or EOF)
            cls = f' class="language-{html.escape(lang)}"' if lang else ""
            out.append(f"<pre><code{cls}>{html.escape(chr(10).join(body), quote=True)}</code></pre>")
            continue

        heading = _HEADING_RE.match(line)
        if heading:
            level = len(heading.group(1))
            out.append(f"<h{level}>{_inline(heading.group(2))}</h{level}>")
            i += 1
            continue

        if _HR_RE.match(line):
            out.append("<hr />")
            i += 1
            continue

        quote = _QUOTE_RE.match(line)
        if quote:
            body = [quote.group(1)]
            i += 1
            while i < len(lines) and (m := _QUOTE_RE.match(lines[i])):
                body.append(m.group(1))
                i += 1
            out.append(f"<blockquote><p>{_inline(' '.join(b for b in body if b.strip()))}</p></blockquote>")
            continue

        for pattern, tag in ((_ULIST_RE, "ul"), (_OLIST_RE, "ol")):
            item = pattern.match(line)
            if item:
                items = [item.group(1)]
                i += 1
                while i < len(lines) and (m := pattern.match(lines[i])):
                    items.append(m.group(1))
                    i += 1
                out.append(f"<{tag}>" + "".join(f"<li>{_inline(it)}</li>" for it in items) + f"</{tag}>")
                break
        else:
            para = [line.strip()]
            i += 1
            while i < len(lines) and lines[i].strip() and not _is_structural(lines[i]):
                para.append(lines[i].strip())
                i += 1
            out.append(f"<p>{_inline(' '.join(para))}</p>")
    return "\n".join(out)


def _is_structural(line: str) -> bool:
    return bool(
        _FENCE_RE.match(line)
        or _HEADING_RE.match(line)
        or _HR_RE.match(line)
        or _ULIST_RE.match(line)
        or _OLIST_RE.match(line)
        or _QUOTE_RE.match(line)
    )


def markdown_to_text(source: str) -> str:
    """Markup-stripped README text for full-text indexing."""
    source = strip_dangerous_html(source)
    lines = []
    in_fence = False
    for line in source.split("\n"):
        if _FENCE_RE.match(line):
            in_fence = not in_fence
            continue
        if in_fence:
            lines.append(line)
            continue
        heading = _HEADING_RE.match(line)
        if heading:
            line = heading.group(2)
        else:
            for pattern in (_QUOTE_RE, _ULIST_RE, _OLIST_RE):
                m = pattern.match(line)
                if m:
                    line = m.group(1)
                    break
            if _HR_RE.match(line):
                line = ""
        lines.append(line)
    text = "\n".join(lines)
    text = _IMAGE_RE.sub(lambda m: m.group(1), text)
    text = _LINK_RE.sub(lambda m: m.group(1), text)
    text = _CODE_SPAN_RE.sub(lambda m: m.group(1), text)
    text = text.replace("**", "").replace("*", " ")
    text = _RAW_TAG_RE.sub(" ", text)
    text = html.unescape(text)
    return re.sub(r"\s+", " ", text).strip()


def extract_title(source: str) -> str | None:
    """Text of the first top-level (single '#') heading, if any."""
    for line in strip_dangerous_html(source).split("\n"):
        match = re.match(r"^#\s+(.*?)\s*#*\s*$", line)
        if match:
            title = markdown_to_text(match.group(1))
            if title:
                return title
    return None


def extract_first_fence(source: str) -> str | None:
    """Content of the first fenced code block, if any."""
    lines = source.split("\n")
    for i, line in enumerate(lines):
        if _FENCE_RE.match(line):
            body = []
            for inner in lines[i + 1 :]:
                if _FENCE_RE.match(inner):
                    return "\n".join(body)
                body.append(inner)
            return "\n".join(body)
    return None


def extract_first_image(source: str) -> str | None:
    """Target of the first image reference, if any."""
    match = _IMAGE_RE.search(strip_dangerous_html(source))
    return match.group(2) if match else None
