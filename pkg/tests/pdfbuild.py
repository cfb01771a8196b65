"""Reference PDF writer for test fixtures.

Builds small but structurally honest PDFs (xref table, page tree, link
annotations, optional compressed object streams) and keeps a manifest of
every link it wrote, so tests can check extraction against ground truth
that never touches the parser under test.
"""

from __future__ import annotations

import zlib


def _esc(text: str) -> str:
    return text.replace("\\", r"\\").replace("(", r"\(").replace(")", r"\)")


class PdfWriter:
    def __init__(self):
        self.bodies = {}          # obj num -> bytes (None reserves a number)
        self._next = 1
        self.manifest = []        # (url, page_number, kind)

    def reserve(self) -> int:
        num = self._next
        self._next += 1
        self.bodies[num] = None
        return num

    def set(self, num: int, body: bytes) -> int:
        self.bodies[num] = body
        return num

    def add(self, body: bytes) -> int:
        return self.set(self.reserve(), body)

    def build(self, page_objs, info_obj=None, encrypt_obj=None,
              objstm_members=None) -> bytes:
        """Assemble the file; objstm_members are packed into one object stream."""
        pages_num = self.reserve()
        kids = " ".join(f"{n} 0 R" for n in page_objs)
        self.set(pages_num, (
            f"<< /Type /Pages /Kids [ {kids} ] /Count {len(page_objs)} >>"
        ).encode())
        catalog_num = self.add(
            f"<< /Type /Catalog /Pages {pages_num} 0 R >>".encode())

        objstm_members = set(objstm_members or ())
        if objstm_members:
            packed = sorted(objstm_members)
            offsets, payload = [], b""
            for num in packed:
                offsets.append((num, len(payload)))
                payload += self.bodies[num] + b"\n"
            header = " ".join(f"{n} {off}" for n, off in offsets).encode() + b"\n"
            data = zlib.compress(header + payload)
            stm_dict = (
                f"<< /Type /ObjStm /N {len(packed)} /First {len(header)} "
                f"/Filter /FlateDecode /Length {len(data)} >>"
            ).encode()
            self.add(stm_dict + b"\nstream\n" + data + b"\nendstream")
            for num in packed:
                self.bodies[num] = None  # only the packed copy survives

        out = bytearray(b"%PDF-1.5\n%\xe2\xe3\xcf\xd3\n")
        offsets = {}
        for num in sorted(self.bodies):
            body = self.bodies[num]
            if body is None and num not in objstm_members:
                continue
            if num in objstm_members:
                continue
            offsets[num] = len(out)
            out += f"{num} 0 obj\n".encode() + body + b"\nendobj\n"

        xref_at = len(out)
        max_num = max(self.bodies) if self.bodies else 0
        out += f"xref\n0 {max_num + 1}\n".encode()
        out += b"0000000000 65535 f \n"
        for num in range(1, max_num + 1):
            if num in offsets:
                out += f"{offsets[num]:010d} 00000 n \n".encode()
            else:
                out += b"0000000000 65535 f \n"
        trailer = f"<< /Size {max_num + 1} /Root {catalog_num} 0 R"
        if info_obj is not None:
            trailer += f" /Info {info_obj} 0 R"
        if encrypt_obj is not None:
            trailer += f" /Encrypt {encrypt_obj} 0 R"
        trailer += " >>"
        out += b"trailer\n" + trailer.encode()
        out += f"\nstartxref\n{xref_at}\n%%EOF\n".encode()
        return bytes(out)


def build_pdf(pages, title=None, title_utf16=False, encrypted=False,
              compress_links=False, extra_page_keys=None):
    """pages: list of page specs, each a list of link specs.

    Link spec: (url, kind) with kind "annot" (link annotation wrapping a URI
    action) or "uri" (bare URI action hung off a page key). Returns
    (pdf_bytes, manifest) where manifest lists (url, page_number, kind) in
    the order written.
    """
    writer = PdfWriter()
    in_objstm = set()
    page_nums = []
    for page_no, links in enumerate(pages, start=1):
        annot_refs, extra_keys = [], []
        for link_no, (url, kind) in enumerate(links):
            action = writer.add(f"<< /S /URI /URI ({_esc(url)}) >>".encode())
            if compress_links:
                in_objstm.add(action)
            if kind == "annot":
                annot = writer.add((
                    f"<< /Type /Annot /Subtype /Link /Rect [ 0 0 100 50 ] "
                    f"/A {action} 0 R >>"
                ).encode())
                annot_refs.append(annot)
                writer.manifest.append((url, page_no, "AnnotLink"))
            else:
                extra_keys.append((f"/BWAction{link_no}", f"{action} 0 R"))
                writer.manifest.append((url, page_no, "UriNode"))
        content_body = b"BT /F1 12 Tf 72 720 Td (page) Tj ET"
        content = writer.add(
            b"<< /Length %d >>\nstream\n" % len(content_body)
            + content_body + b"\nendstream")
        page_body = "<< /Type /Page /MediaBox [ 0 0 612 792 ] "
        if annot_refs:
            page_body += "/Annots [ " + " ".join(f"{n} 0 R" for n in annot_refs) + " ] "
        for key, val in extra_keys:
            page_body += f"{key} {val} "
        for key, val in (extra_page_keys or {}).items():
            page_body += f"{key} {val} "
        page_body += f"/Contents {content} 0 R >>"
        page_nums.append(writer.add(page_body.encode()))

    info = None
    if title is not None:
        if title_utf16:
            payload = b"\xfe\xff" + title.encode("utf-16-be")
            info = writer.add(b"<< /Title <" + payload.hex().encode() + b"> >>")
        else:
            info = writer.add(f"<< /Title ({_esc(title)}) >>".encode())
    encrypt = None
    if encrypted:
        encrypt = writer.add(b"<< /Filter /Standard /V 1 /R 2 >>")
    data = writer.build(page_nums, info_obj=info, encrypt_obj=encrypt,
                        objstm_members=in_objstm)
    return data, list(writer.manifest)
