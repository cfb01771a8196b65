"""PDF object-tree reconstruction and breadth-first URL extraction.

The parser favors robustness over spec coverage: indirect objects are
recovered by scanning the whole buffer (so damaged xref tables do not lose
objects), objects packed into compressed object streams are expanded, and
malformed subtrees are skipped and tallied instead of aborting the document.
"""

from __future__ import annotations

import hashlib
import re
import zlib
from collections import deque
from dataclasses import dataclass, field
from urllib.parse import urlsplit

from ..errors import EncryptedPdf, MalformedPdf

MAX_DEPTH = 64            # BFS depth cap against object-tree bombs
MAX_NODES = 1_000_000     # BFS node cap

WHITESPACE = b"\x00\t\n\x0c\r "
DELIMITERS = b"()<>[]{}/%"

OBJ_RE = re.compile(rb"(\d+)\s+(\d+)\s+obj\b")
TRAILER_RE = re.compile(rb"trailer\b")

URI_NODE = "UriNode"
ANNOT_LINK = "AnnotLink"


class Name(str):
    """A PDF name object (/Foo); subclass keeps it distinct from text strings."""


@dataclass(frozen=True)
class Ref:
    num: int
    gen: int


class PdfString:
    __slots__ = ("raw",)

    def __init__(self, raw: bytes):
        self.raw = raw

    def text(self) -> str:
        if self.raw.startswith(b"\xfe\xff"):
            return self.raw[2:].decode("utf-16-be", errors="replace")
        if self.raw.startswith(b"\xef\xbb\xbf"):
            return self.raw[3:].decode("utf-8", errors="replace")
        return self.raw.decode("latin-1")

    def __repr__(self):
        return f"PdfString({self.raw!r})"

    def __eq__(self, other):
        return isinstance(other, PdfString) and self.raw == other.raw

    def __hash__(self):
        return hash(self.raw)


@dataclass
class Stream:
    attrs: dict
    raw: bytes

    def data(self, diagnostics=None) -> bytes | None:
        """Decoded stream bytes, or None when the filter is unsupported."""
        filters = self.attrs.get(Name("Filter"))
        if filters is None:
            return self.raw
        if not isinstance(filters, list):
            filters = [filters]
        data = self.raw
        for filt in filters:
            if filt == Name("FlateDecode"):
                try:
                    data = zlib.decompress(data)
                except zlib.error:
                    if diagnostics is not None:
                        diagnostics["undecodable_streams"] += 1
                    return None
            else:
                if diagnostics is not None:
                    diagnostics["unsupported_filters"] += 1
                return None
        parms = self.attrs.get(Name("DecodeParms"))
        if isinstance(parms, dict) and parms.get(Name("Predictor"), 1) != 1:
            if diagnostics is not None:
                diagnostics["unsupported_filters"] += 1
            return None
        return data


@dataclass(frozen=True)
class ExtractedLink:
    url: str
    page: int
    node_kind: str           # URI_NODE | ANNOT_LINK


@dataclass
class PdfTree:
    objects: dict            # (num, gen) -> object
    trailer: dict
    pages: list              # page dicts in document order
    diagnostics: dict

    def resolve(self, obj, depth: int = 0):
        while isinstance(obj, Ref) and depth < 32:
            obj = self.objects.get((obj.num, obj.gen))
            depth += 1
        return obj


@dataclass
class PdfDocument:
    sha256: str
    page_count: int
    links: list
    title: str | None = None
    raster_ref: str | None = None
    tree: PdfTree | None = field(default=None, repr=False)
    raw: bytes = field(default=b"", repr=False)


class _Lexer:
    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def skip_ws(self):
        data, n = self.data, len(self.data)
        while self.pos < n:
            c = data[self.pos]
            if c in WHITESPACE:
                self.pos += 1
            elif c == 0x25:  # '%' comment
                while self.pos < n and data[self.pos] not in b"\r\n":
                    self.pos += 1
            else:
                return

    def peek(self, k: int = 1) -> bytes:
        return self.data[self.pos:self.pos + k]

    def read_regular(self) -> bytes:
        start = self.pos
        data, n = self.data, len(self.data)
        while self.pos < n and data[self.pos] not in WHITESPACE \
                and data[self.pos] not in DELIMITERS:
            self.pos += 1
        return data[start:self.pos]


def _parse_name(lex: _Lexer) -> Name:
    lex.pos += 1  # '/'
    raw = lex.read_regular()
    out = bytearray()
    i = 0
    while i < len(raw):
        if raw[i:i + 1] == b"#" and i + 2 < len(raw) + 1:
            try:
                out.append(int(raw[i + 1:i + 3], 16))
                i += 3
                continue
            except ValueError:
                pass
        out.append(raw[i])
        i += 1
    return Name(out.decode("latin-1"))


_ESCAPES = {b"n": b"\n", b"r": b"\r", b"t": b"\t", b"b": b"\b",
            b"f": b"\x0c", b"(": b"(", b")": b")", b"\\": b"\\"}


def _parse_literal_string(lex: _Lexer) -> PdfString:
    lex.pos += 1  # '('
    out = bytearray()
    depth = 1
    data, n = lex.data, len(lex.data)
    while lex.pos < n:
        c = data[lex.pos:lex.pos + 1]
        if c == b"\\":
            nxt = data[lex.pos + 1:lex.pos + 2]
            if nxt in _ESCAPES:
                out += _ESCAPES[nxt]
                lex.pos += 2
            elif nxt.isdigit():
                digits = b""
                lex.pos += 1
                while len(digits) < 3 and data[lex.pos:lex.pos + 1].isdigit():
                    digits += data[lex.pos:lex.pos + 1]
                    lex.pos += 1
                out.append(int(digits, 8) & 0xFF)
            else:
                lex.pos += 2  # line continuation or unknown escape
        elif c == b"(":
            depth += 1
            out += c
            lex.pos += 1
        elif c == b")":
            depth -= 1
            if depth == 0:
                lex.pos += 1
                return PdfString(bytes(out))
            out += c
            lex.pos += 1
        else:
            out += c
            lex.pos += 1
    raise MalformedPdf("unterminated string literal")


def _parse_hex_string(lex: _Lexer) -> PdfString:
    lex.pos += 1  # '<'
    end = lex.data.find(b">", lex.pos)
    if end < 0:
        raise MalformedPdf("unterminated hex string")
    hexdigits = re.sub(rb"\s", b"", lex.data[lex.pos:end])
    if len(hexdigits) % 2:
        hexdigits += b"0"
    lex.pos = end + 1
    try:
        return PdfString(bytes.fromhex(hexdigits.decode("ascii")))
    except ValueError as exc:
        raise MalformedPdf("bad hex string") from exc


def _parse_number_or_ref(lex: _Lexer):
    token = lex.read_regular()
    try:
        if b"." in token:
            value = float(token)
        else:
            value = int(token)
    except ValueError as exc:
        raise MalformedPdf(f"bad numeric token {token!r}") from exc
    if isinstance(value, int) and value >= 0:
        save = lex.pos
        lex.skip_ws()
        gen_tok = lex.read_regular()
        if gen_tok.isdigit():
            lex.skip_ws()
            if lex.read_regular() == b"R":
                return Ref(value, int(gen_tok))
        lex.pos = save  # not a reference; rewind the lookahead
    return value


def parse_object(lex: _Lexer):
    lex.skip_ws()
    head = lex.peek(2)
    if not head:
        raise MalformedPdf("unexpected end of data")
    if head == b"<<":
        lex.pos += 2
        out: dict = {}
        while True:
            lex.skip_ws()
            if lex.peek(2) == b">>":
                lex.pos += 2
                return out
            if not lex.peek(1):
                raise MalformedPdf("unterminated dictionary")
            key = parse_object(lex)
            if not isinstance(key, Name):
                raise MalformedPdf(f"dictionary key is not a name: {key!r}")
            out[key] = parse_object(lex)
    c = head[:1]
    if c == b"<":
        return _parse_hex_string(lex)
    if c == b"[":
        lex.pos += 1
        items = []
        while True:
            lex.skip_ws()
            if lex.peek(1) == b"]":
                lex.pos += 1
                return items
            if not lex.peek(1):
                raise MalformedPdf("unterminated array")
            items.append(parse_object(lex))
    if c == b"(":
        return _parse_literal_string(lex)
    if c == b"/":
        return _parse_name(lex)
    if c in b"+-.0123456789":
        return _parse_number_or_ref(lex)
    token = lex.read_regular()
    if token == b"true":
        return True
    if token == b"false":
        return False
    if token == b"null":
        return None
    raise MalformedPdf(f"unexpected token {token[:20]!r}")


def _read_stream_body(data: bytes, lex: _Lexer, attrs: dict) -> bytes:
    # lex.pos sits right after the 'stream' keyword
    if data[lex.pos:lex.pos + 2] == b"\r\n":
        lex.pos += 2
    elif data[lex.pos:lex.pos + 1] in (b"\n", b"\r"):
        lex.pos += 1
    start = lex.pos
    length = attrs.get(Name("Length"))
    if isinstance(length, Ref):
        length = None  # resolved lazily by falling back to the endstream scan
    if isinstance(length, int):
        end = start + length
        tail = data[end:end + 20].lstrip(bytes(WHITESPACE))
        if tail.startswith(b"endstream"):
            lex.pos = end
            return data[start:end]
    end = data.find(b"endstream", start)
    if end < 0:
        raise MalformedPdf("unterminated stream")
    body = data[start:end]
    if body.endswith(b"\r\n"):
        body = body[:-2]
    elif body.endswith(b"\n") or body.endswith(b"\r"):
        body = body[:-1]
    lex.pos = end
    return body


def _scan_objects(data: bytes, diagnostics: dict) -> dict:
    objects: dict = {}
    for match in OBJ_RE.finditer(data):
        # reject matches glued to another token, e.g. inside a name or string
        if match.start() > 0 and data[match.start() - 1] not in WHITESPACE \
                and data[match.start() - 1] not in DELIMITERS:
            continue
        num, gen = int(match.group(1)), int(match.group(2))
        lex = _Lexer(data, match.end())
        try:
            obj = parse_object(lex)
            lex.skip_ws()
            if data[lex.pos:lex.pos + 6] == b"stream":
                lex.pos += 6
                if not isinstance(obj, dict):
                    raise MalformedPdf("stream without attribute dictionary")
                body = _read_stream_body(data, lex, obj)
                obj = Stream(attrs=obj, raw=body)
        except MalformedPdf:
            diagnostics["skipped_objects"] += 1
            continue
        objects[(num, gen)] = obj
    return objects


def _expand_object_streams(objects: dict, diagnostics: dict) -> None:
    for key in list(objects):
        obj = objects[key]
        if not isinstance(obj, Stream):
            continue
        if obj.attrs.get(Name("Type")) != Name("ObjStm"):
            continue
        payload = obj.data(diagnostics)
        if payload is None:
            continue
        count = obj.attrs.get(Name("N"))
        first = obj.attrs.get(Name("First"))
        if not isinstance(count, int) or not isinstance(first, int):
            diagnostics["skipped_objects"] += 1
            continue
        header = payload[:first].split()
        if len(header) < 2 * count:
            diagnostics["skipped_objects"] += 1
            continue
        for i in range(count):
            try:
                num = int(header[2 * i])
                offset = int(header[2 * i + 1])
                inner = _Lexer(payload, first + offset)
                parsed = parse_object(inner)
            except (ValueError, MalformedPdf):
                diagnostics["skipped_objects"] += 1
                continue
            objects.setdefault((num, 0), parsed)


def _collect_trailer(data: bytes, objects: dict, diagnostics: dict) -> dict:
    trailer: dict = {}
    for match in TRAILER_RE.finditer(data):
        lex = _Lexer(data, match.end())
        try:
            parsed = parse_object(lex)
        except MalformedPdf:
            diagnostics["skipped_objects"] += 1
            continue
        if isinstance(parsed, dict):
            trailer.update(parsed)
    if Name("Root") not in trailer:
        # cross-reference streams carry the trailer fields in their dict
        for obj in objects.values():
            if isinstance(obj, Stream) and obj.attrs.get(Name("Type")) == Name("XRef"):
                trailer.update(obj.attrs)
    return trailer


def _walk_pages(tree: PdfTree) -> list:
    root = tree.resolve(tree.trailer.get(Name("Root")))
    if not isinstance(root, dict):
        raise MalformedPdf("document catalog missing")
    pages_root = tree.resolve(root.get(Name("Pages")))
    if not isinstance(pages_root, dict):
        raise MalformedPdf("page tree missing")
    leaves: list = []
    seen: set = set()
    stack = [(pages_root, 0)]
    while stack:
        node, depth = stack.pop()
        if depth > MAX_DEPTH or len(leaves) > MAX_NODES:
            raise MalformedPdf("page tree too deep or too large")
        if id(node) in seen:
            continue
        seen.add(id(node))
        kids = node.get(Name("Kids"))
        if node.get(Name("Type")) == Name("Page") or (
                kids is None and node.get(Name("Type")) != Name("Pages")):
            leaves.append(node)
            continue
        kids = tree.resolve(kids)
        if not isinstance(kids, list):
            if node.get(Name("Type")) == Name("Pages"):
                continue
            leaves.append(node)
            continue
        for kid in reversed(kids):
            kid = tree.resolve(kid)
            if isinstance(kid, dict):
                stack.append((kid, depth + 1))
            else:
                tree.diagnostics["skipped_subtrees"] += 1
    return leaves


def _absolute_http_url(value) -> str | None:
    if isinstance(value, PdfString):
        text = value.text()
    elif isinstance(value, str) and not isinstance(value, Name):
        text = value
    else:
        return None
    try:
        parts = urlsplit(text)
    except ValueError:
        return None
    if parts.scheme in ("http", "https") and parts.netloc:
        return text
    return None


def _qualifies_as_link_annot(tree: PdfTree, node: dict) -> bool:
    if tree.resolve(node.get(Name("Subtype"))) != Name("Link"):
        return False
    rect = node.get(Name("Rect"))
    if isinstance(rect, Ref):
        rect = tree.resolve(rect, depth=31)  # one level of indirection
        if isinstance(rect, Ref):
            tree.diagnostics["deep_indirection"] += 1
            return False
    if not isinstance(rect, list):
        return False
    return tree.resolve(node.get(Name("Type"))) == Name("Annot") \
        or Name("A") in node


def extract_links(tree: PdfTree) -> list:
    """URLs from URI nodes and qualifying link annotations, in BFS order.

    Malformed subtrees are skipped and tallied in tree.diagnostics;
    duplicates are preserved for downstream per-page counting.
    """
    links: list = []
    backrefs = (Name("Parent"), Name("P"))
    for page_no, page in enumerate(tree.pages, start=1):
        visited: set = set()
        consumed_actions: set = set()
        queue = deque([(page, 0)])
        nodes = 0
        while queue:
            node, depth = queue.popleft()
            nodes += 1
            if nodes > MAX_NODES:
                tree.diagnostics["node_cap_hits"] += 1
                break
            if depth > MAX_DEPTH:
                tree.diagnostics["depth_cap_hits"] += 1
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            if isinstance(node, dict):
                if _qualifies_as_link_annot(tree, node):
                    action = tree.resolve(node.get(Name("A")))
                    if isinstance(action, dict):
                        url = _absolute_http_url(tree.resolve(action.get(Name("URI"))))
                        if url is not None:
                            links.append(ExtractedLink(url, page_no, ANNOT_LINK))
                            consumed_actions.add(id(action))
                        else:
                            tree.diagnostics["non_http_uris"] += 1
                elif Name("URI") in node and id(node) not in consumed_actions:
                    url = _absolute_http_url(tree.resolve(node.get(Name("URI"))))
                    if url is not None:
                        links.append(ExtractedLink(url, page_no, URI_NODE))
                    else:
                        tree.diagnostics["non_http_uris"] += 1
                for key, value in node.items():
                    if key in backrefs:
                        continue
                    child = tree.resolve(value) if isinstance(value, Ref) else value
                    if isinstance(child, (dict, list)):
                        queue.append((child, depth + 1))
                    elif isinstance(child, Stream):
                        queue.append((child.attrs, depth + 1))
            elif isinstance(node, list):
                for value in node:
                    child = tree.resolve(value) if isinstance(value, Ref) else value
                    if isinstance(child, (dict, list)):
                        queue.append((child, depth + 1))
    return links


def extract_title(tree: PdfTree) -> str | None:
    """The /Title of the Document Information Dictionary, decoded to text."""
    info = tree.resolve(tree.trailer.get(Name("Info")))
    if not isinstance(info, dict):
        return None
    title = tree.resolve(info.get(Name("Title")))
    if isinstance(title, PdfString):
        return title.text()
    if isinstance(title, str) and not isinstance(title, Name):
        return title
    return None


def parse_tree(data: bytes) -> PdfTree:
    if not data:
        raise MalformedPdf("empty input")
    if b"%PDF-" not in data[:1024]:
        raise MalformedPdf("missing %PDF header")
    diagnostics = {
        "skipped_objects": 0, "skipped_subtrees": 0, "unsupported_filters": 0,
        "undecodable_streams": 0, "non_http_uris": 0, "deep_indirection": 0,
        "depth_cap_hits": 0, "node_cap_hits": 0,
    }
    objects = _scan_objects(data, diagnostics)
    if not objects:
        raise MalformedPdf("no indirect objects found")
    _expand_object_streams(objects, diagnostics)
    trailer = _collect_trailer(data, objects, diagnostics)
    if Name("Encrypt") in trailer:
        raise EncryptedPdf("document carries an /Encrypt dictionary")
    if Name("Root") not in trailer:
        raise MalformedPdf("no trailer /Root")
    tree = PdfTree(objects=objects, trailer=trailer, pages=[], diagnostics=diagnostics)
    tree.pages = _walk_pages(tree)
    if not tree.pages:
        raise MalformedPdf("document has no pages")
    return tree


def parse_pdf(data: bytes) -> PdfDocument:
    """Parse PDF bytes into a document with links, title and page count."""
    tree = parse_tree(data)
    return PdfDocument(
        sha256=hashlib.sha256(data).hexdigest(),
        page_count=len(tree.pages),
        links=extract_links(tree),
        title=extract_title(tree),
        tree=tree,
        raw=data,
    )
