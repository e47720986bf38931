#!/usr/bin/env python3
# Copyright 2026 The privdistill Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Convert Text Anonymization Benchmark JSON into privdistill standoff docs.

Input: a JSON array of documents with "doc_id", "text" and
"annotations" -> {annotator: {"entity_mentions": [...]}}, where each mention has
character offsets "start_offset"/"end_offset" and "identifier_type".
Output: a JSON array of {"doc_id", "text", "spans": [{start, end, category}]}
with UTF-8 byte offsets. Entity counts go to stderr.
"""

import argparse
import json
import sys

CATEGORIES = ("DIRECT", "QUASI", "NO_MASK")


def byte_offsets(text):
    """Map each character offset (0..len) to its UTF-8 byte offset."""
    offsets = [0]
    for ch in text:
        offsets.append(offsets[-1] + len(ch.encode("utf-8")))
    return offsets


def merged_regions(spans):
    """Number of regions left after merging overlapping or adjacent spans."""
    count, reach = 0, -1
    for start, end in sorted(spans):
        if start > reach:
            count += 1
        reach = max(reach, end)
    return count


def convert(doc, annotator):
    text = doc["text"]
    to_byte = byte_offsets(text)
    spans, seen = [], set()
    for name, block in sorted(doc.get("annotations", {}).items()):
        if annotator and name != annotator:
            continue
        for mention in block.get("entity_mentions", []):
            category = mention.get("identifier_type", "NO_MASK")
            if category not in CATEGORIES:
                raise ValueError(f"{doc['doc_id']}: unknown identifier_type {category!r}")
            start, end = mention["start_offset"], mention["end_offset"]
            if not 0 <= start < end <= len(text):
                raise ValueError(f"{doc['doc_id']}: bad offsets {start}..{end}")
            key = (start, end, category)
            if key in seen:
                continue
            seen.add(key)
            spans.append({"start": to_byte[start], "end": to_byte[end], "category": category})
    spans.sort(key=lambda s: (s["start"], s["end"], s["category"]))
    return {"doc_id": doc["doc_id"], "text": text, "spans": spans}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("input", help="TAB split file, e.g. echr_test.json")
    parser.add_argument("output", help="standoff JSON to write")
    parser.add_argument("--annotator", help="keep one annotator (default: union of all)")
    args = parser.parse_args(argv)

    with open(args.input, encoding="utf-8") as f:
        source = json.load(f)
    docs = [convert(doc, args.annotator) for doc in source]
    with open(args.output, "w", encoding="utf-8") as f:
        json.dump(docs, f, ensure_ascii=False)

    for category in ("DIRECT", "QUASI"):
        raw = sum(1 for d in docs for s in d["spans"] if s["category"] == category)
        merged = sum(
            merged_regions([(s["start"], s["end"]) for s in d["spans"] if s["category"] == category])
            for d in docs
        )
        print(f"{category}: {raw} spans, {merged} merged regions", file=sys.stderr)
    print(f"documents: {len(docs)}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
