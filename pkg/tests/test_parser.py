from __future__ import annotations

import json
import logging

import pytest
from helpers import BODY_TITLES, PAPER_TITLE, outline_json
from PIL import Image

from posterforge.errors import ContractError, ConversionError, EmptyDocumentError, SchemaValidationError
from posterforge.gateway import BackendDescriptor, Gateway
from posterforge.parser import (
    AssetLibrary,
    FigureAsset,
    PaperDocument,
    PosterMeta,
    SectionSynopsis,
    convert_pdf,
    filter_assets,
    ingest_markdown,
    load_conversion,
    load_library,
    save_conversion,
    save_library,
    summarize_document,
    truncate_title,
)
from posterforge.parser.summarize import strip_citations

TEXT = BackendDescriptor("txt", "text")


def gateway_for(responder):
    calls = []

    def record(req):
        calls.append(req)
        return responder(req) if callable(responder) else responder

    gw = Gateway([TEXT], {"parser.summarize": "txt", "parser.filter": "txt"}, responders={"txt": record}, retry_wait=0)
    return gw, calls


# -- conversion -----------------------------------------------------------


def test_fixture_pdf_converts_to_markdown_and_two_figures(paper_pdf, tmp_path):
    result = convert_pdf(paper_pdf, tmp_path / "conv")
    assert result.document.page_count == 3
    assert PAPER_TITLE in result.document.markdown
    for title in BODY_TITLES:
        assert title in result.document.markdown
    assert len(result.figures) == 2 and result.tables == ()
    assert [f.caption.split(":")[0] for f in result.figures] == ["Figure 1", "Figure 2"]
    for fig in result.figures:
        with Image.open(fig.file) as im:
            assert im.size == (fig.width_px, fig.height_px)


def test_corrupt_or_empty_pdf_is_conversion_error(tmp_path):
    bad = tmp_path / "bad.pdf"
    bad.write_bytes(b"%PDF-1.4 this is not really a pdf")
    with pytest.raises(ConversionError):
        convert_pdf(bad, tmp_path / "out")
    empty = tmp_path / "empty.pdf"
    empty.write_bytes(b"")
    with pytest.raises(ConversionError):
        convert_pdf(empty, tmp_path / "out2")
    with pytest.raises(ConversionError):
        convert_pdf(tmp_path / "missing.pdf", tmp_path / "out3")


def test_failing_converter_command_carries_stderr(paper_pdf, tmp_path):
    cmd = ["python3", "-c", "import sys; sys.stderr.write('boom'); sys.exit(3)", "{pdf}", "{out}"]
    with pytest.raises(ConversionError) as err:
        convert_pdf(paper_pdf, tmp_path / "out", command=cmd)
    assert "boom" in err.value.stderr


def test_converter_without_text_is_empty_document_error(paper_pdf, tmp_path):
    cmd = ["python3", "-c", "import sys, pathlib; pathlib.Path(sys.argv[2], 'paper.md').write_text('  ')", "{pdf}", "{out}"]
    with pytest.raises(EmptyDocumentError):
        convert_pdf(paper_pdf, tmp_path / "out", command=cmd)


def test_markdown_ingestion_reads_caption_sidecar(tmp_path):
    Image.new("RGB", (200, 100), "red").save(tmp_path / "f.png")
    (tmp_path / "paper.md").write_text("# Title\n\nBody text.")
    (tmp_path / "captions.json").write_text(json.dumps([
        {"kind": "image", "file": "f.png", "caption": "Figure 1: red"},
        {"kind": "table", "file": "f.png", "caption": ""},
        {"kind": "image", "file": "missing.png", "caption": "gone"},
    ]))
    result = ingest_markdown(tmp_path / "paper.md")
    assert [f.caption for f in result.figures] == ["Figure 1: red"]
    assert result.tables[0].caption == "Table 1"
    assert result.figures[0].aspect == 2.0


def test_conversion_round_trip(paper_pdf, tmp_path):
    result = convert_pdf(paper_pdf, tmp_path / "conv")
    save_conversion(result, tmp_path / "conv" / "conversion.json")
    again = load_conversion(tmp_path / "conv" / "conversion.json")
    assert again.document == result.document
    assert again.figures == result.figures


def test_empty_markdown_is_rejected(tmp_path):
    (tmp_path / "paper.md").write_text("\n")
    with pytest.raises(EmptyDocumentError):
        ingest_markdown(tmp_path / "paper.md")
    with pytest.raises(ContractError):
        PaperDocument("", 1, "x")


def test_long_document_is_passed_through_whole():
    words = " ".join(f"word{k}" for k in range(30_000))
    doc = PaperDocument("# Big\n\n" + words, 55, "big.md")
    gw, calls = gateway_for(outline_json())
    summarize_document(doc, gw)
    assert words in calls[0].user_prompt


# -- summarize ------------------------------------------------------------


DOC = PaperDocument("# A paper\n\nSome text.", 1, "paper.md")


def test_scripted_outline_gives_title_plus_four_body_sections():
    gw, _ = gateway_for(outline_json())
    lib = summarize_document(DOC, gw)
    assert lib.meta.poster_title == PAPER_TITLE
    assert len(lib.sections) == 5
    assert [s.title for s in lib.body_sections] == BODY_TITLES


def test_outline_without_title_section_is_rejected_after_one_reprompt():
    bad = json.loads(outline_json())
    bad["sections"] = bad["sections"][1:]
    gw, calls = gateway_for(json.dumps(bad))
    with pytest.raises(SchemaValidationError):
        summarize_document(DOC, gw)
    assert len(calls) == 2


def test_long_section_titles_are_truncated_with_warning(caplog):
    data = json.loads(outline_json())
    data["sections"][1]["title"] = "A Very Long Section Heading"
    gw, _ = gateway_for(json.dumps(data))
    with caplog.at_level(logging.WARNING):
        lib = summarize_document(DOC, gw)
    assert lib.body_sections[0].title == "A Very Long"
    assert "truncated" in caplog.text


def test_truncate_title_keeps_short_titles():
    assert truncate_title("Method") == "Method"
    assert truncate_title("Related Prior Work Overview") == "Related Prior Work"


def test_citations_are_removed_from_synopses():
    assert strip_citations("as shown [3] and [4, 5] or [6-8].") == "as shown and or."


# -- filter ---------------------------------------------------------------


def library_with(n_figures: int, tmp_path=None) -> AssetLibrary:
    figs = tuple(FigureAsset(k, "image", f"Figure {k}", f"f{k}.png", 100, 50) for k in range(1, n_figures + 1))
    return AssetLibrary(PosterMeta("T"), (SectionSynopsis("Title", "T"), SectionSynopsis("Body", "text")), figs)


def kept(ids):
    return json.dumps({"image_information": {str(i): {} for i in ids}, "table_information": {}})


def test_filter_keeps_model_selection():
    gw, _ = gateway_for(kept([1, 3, 4]))
    out = filter_assets(library_with(8), gw)
    assert {f.id for f in out.figures} == {1, 3, 4}


def test_filter_caps_at_five_in_candidate_order():
    gw, _ = gateway_for(kept([7, 6, 5, 4, 3, 2, 1]))
    out = filter_assets(library_with(8), gw)
    assert [f.id for f in out.figures] == [1, 2, 3, 4, 5]


def test_filter_drops_unknown_ids_with_warning(caplog):
    gw, _ = gateway_for(kept([2, 99]))
    with caplog.at_level(logging.WARNING):
        out = filter_assets(library_with(3), gw)
    assert [f.id for f in out.figures] == [2]
    assert "unknown" in caplog.text


def test_filter_accepts_list_form():
    gw, _ = gateway_for(json.dumps({"image_information": [{"id": 2}, "3"], "table_information": []}))
    assert [f.id for f in filter_assets(library_with(4), gw).figures] == [2, 3]


def test_filter_without_candidates_makes_no_call():
    gw, calls = gateway_for(kept([]))
    lib = library_with(0)
    assert filter_assets(lib, gw) is lib
    assert calls == []


# -- library persistence --------------------------------------------------


def test_library_round_trip_relocates_images(tmp_path):
    src = tmp_path / "src"
    src.mkdir()
    Image.new("RGB", (100, 50)).save(src / "f1.png")
    lib = AssetLibrary(
        PosterMeta("T", "A", "B"),
        (SectionSynopsis("Title", "T"), SectionSynopsis("Body", "text")),
        (FigureAsset(1, "image", "Figure 1", str(src / "f1.png"), 100, 50),),
    )
    saved = save_library(lib, tmp_path / "assets")
    assert saved.figures[0].file == "images/image_1.png"
    assert load_library(tmp_path / "assets") == saved
    (tmp_path / "assets" / "images" / "image_1.png").unlink()
    with pytest.raises(FileNotFoundError):
        load_library(tmp_path / "assets")


def test_domain_types_reject_invalid_values():
    with pytest.raises(ContractError):
        FigureAsset(1, "image", " ", "f.png", 10, 10)
    with pytest.raises(ContractError):
        FigureAsset(1, "image", "cap", "f.png", 0, 10)
    with pytest.raises(ContractError):
        SectionSynopsis("", "x")
