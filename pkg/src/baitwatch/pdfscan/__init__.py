from .parser import (
    ExtractedLink,
    PdfDocument,
    PdfTree,
    extract_links,
    extract_title,
    parse_pdf,
)
from .seo import SeoVerdict, seo_metric
from .raster import CommandRasterizer, rasterize_first_page

__all__ = [
    "ExtractedLink", "PdfDocument", "PdfTree",
    "extract_links", "extract_title", "parse_pdf",
    "SeoVerdict", "seo_metric",
    "CommandRasterizer", "rasterize_first_page",
]
