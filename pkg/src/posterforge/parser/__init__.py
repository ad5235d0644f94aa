"""Paper PDF -> asset library (section synopses plus captioned figures and tables)."""

from .convert import ConversionResult, convert_pdf, ingest_markdown, load_conversion, save_conversion
from .filtering import filter_assets
from .library import (
    MAX_ASSETS_PER_KIND,
    AssetLibrary,
    FigureAsset,
    PaperDocument,
    PosterMeta,
    SectionSynopsis,
    load_library,
    resolve_file,
    save_library,
)
from .summarize import summarize_document, truncate_title

__all__ = [
    "MAX_ASSETS_PER_KIND",
    "AssetLibrary",
    "ConversionResult",
    "FigureAsset",
    "PaperDocument",
    "PosterMeta",
    "SectionSynopsis",
    "convert_pdf",
    "filter_assets",
    "ingest_markdown",
    "load_conversion",
    "load_library",
    "resolve_file",
    "save_conversion",
    "save_library",
    "summarize_document",
    "truncate_title",
]
