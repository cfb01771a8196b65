"""First-page rasterization through an external renderer command.

Renderer contract: the command receives the PDF on stdin plus the arguments
`--dpi 150 --page 1` and writes an image (any format Pillow reads) to
stdout. Any renderer honoring that contract can be substituted.
"""

from __future__ import annotations

import io
import subprocess
from pathlib import Path

from PIL import Image

from ..errors import RenderFailed, RendererUnavailable

DPI = 150
TARGET_SIZE = (128, 128)


class CommandRasterizer:
    def __init__(self, command: str, dpi: int = DPI, timeout: float = 60.0):
        self.command = command
        self.dpi = dpi
        self.timeout = timeout

    def render(self, pdf_bytes: bytes) -> bytes:
        argv = [self.command, "--dpi", str(self.dpi), "--page", "1"]
        try:
            proc = subprocess.run(
                argv, input=pdf_bytes, capture_output=True, timeout=self.timeout,
            )
        except FileNotFoundError as exc:
            raise RendererUnavailable(self.command) from exc
        except subprocess.TimeoutExpired as exc:
            raise RenderFailed(f"{self.command} timed out") from exc
        if proc.returncode != 0:
            raise RenderFailed(
                f"{self.command} exited {proc.returncode}: "
                f"{proc.stderr[:200].decode('latin-1', 'replace')}")
        return proc.stdout


def rasterize_first_page(doc, renderer, out_dir) -> str:
    """Render page 1 at 150 dpi, resample to 128x128 RGB, record the path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    raw = renderer.render(doc.raw)
    try:
        image = Image.open(io.BytesIO(raw))
        image = image.convert("RGB").resize(TARGET_SIZE, Image.BILINEAR)
    except Exception as exc:
        raise RenderFailed(f"renderer output is not an image: {exc}") from exc
    path = out_dir / f"{doc.sha256}.png"
    image.save(path, format="PNG")
    doc.raster_ref = str(path)
    return str(path)
