#!/usr/bin/env python3
"""Builds the gold mini-corpus from inline markup.

Markup: <ESA>..</ESA>, <ESR>..</ESR>, <ORG>..</ORG>, <TE>..</TE>, <TH>..</TH>.
Tags nest (an ESR wraps its ESA). Offsets are code point positions.

Reads tests/data/gold/source.txt and writes gold.json, one MODS file per
document and a manifest next to it (or into the directory given as argument).
"""
import json
import re
import sys
from pathlib import Path
from xml.sax.saxutils import escape

CATEGORY = {"ESA": "ESA", "ESR": "ESR", "ORG": "Organization", "TE": "Temporal", "TH": "Thematic"}

def read_source(path):
    docs, current = [], None
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            continue
        if line.startswith("=== "):
            doc_id, lang, title = (part.strip() for part in line[4:].split("|", 2))
            current = [doc_id, lang, title, []]
            docs.append(current)
        elif line.strip() and current is not None:
            current[3].append(line.strip())
    return [(d, l, t, " ".join(body)) for d, l, t, body in docs]


TAG = re.compile(r"<(/?)(ESA|ESR|ORG|TE|TH)>")


def parse(markup):
    text, spans, stack, pos = [], [], [], 0
    for m in TAG.finditer(markup):
        text.append(markup[pos:m.start()])
        pos = m.end()
        offset = len("".join(text))
        if m.group(1):
            tag, start = stack.pop()
            if tag != m.group(2):
                raise ValueError(f"unbalanced </{m.group(2)}> in {markup!r}")
            spans.append({"start": start, "end": offset, "category": CATEGORY[tag]})
        else:
            stack.append((m.group(2), offset))
    text.append(markup[pos:])
    if stack:
        raise ValueError(f"unclosed tag in {markup!r}")
    spans.sort(key=lambda s: (s["start"], -s["end"], s["category"]))
    return "".join(text), spans


def mods(doc_id, title, lang, text):
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<mods xmlns="http://www.loc.gov/mods/v3" version="3.7">\n'
        f"  <titleInfo><title>{escape(title)}</title></titleInfo>\n"
        f'  <abstract lang="{lang}">{escape(text)}</abstract>\n'
        "  <recordInfo>\n"
        f"    <recordIdentifier>{doc_id}</recordIdentifier>\n"
        "    <recordContentSource>Other</recordContentSource>\n"
        "  </recordInfo>\n"
        "</mods>\n"
    )


def main():
    src = Path(__file__).resolve().parent.parent / "tests/data/gold"
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else src
    (out / "mods").mkdir(parents=True, exist_ok=True)
    gold, manifest = [], []
    for doc_id, lang, title, markup in read_source(src / "source.txt"):
        text, spans = parse(markup)
        gold.append({"id": doc_id, "lang": lang, "text": text, "spans": spans})
        (out / "mods" / f"{doc_id}.xml").write_text(mods(doc_id, title, lang, text), encoding="utf-8")
        manifest.append(f"mods/{doc_id}.xml")
    (out / "gold.json").write_text(json.dumps(gold, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
    (out / "manifest.txt").write_text("\n".join(manifest) + "\n", encoding="utf-8")
    for lang in ("fr", "en"):
        docs = [d for d in gold if d["lang"] == lang]
        words = sum(len([w for w in d["text"].split() if any(c.isalnum() for c in w)]) for d in docs)
        print(f"{lang}: {len(docs)} documents, {words} words, {words / max(len(docs), 1):.1f} per document")


if __name__ == "__main__":
    main()
