#!/usr/bin/env python3
"""Regenerate the static bundles under frontend/tests/fixtures/.

The base bundle carries one fully populated discipline node (label,
seven additional terms, hyperlink sentinel, children list) plus enough
surrounding nodes to exercise panning, search and hit-testing; the overlay
bundle reuses the exact coordinates with different sizes and colors.

Run from the repository root:  python3 scripts/make_viewer_fixture.py
"""

import math
import sys
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sciatlas.export import write_map
from sciatlas.mapbuild import (
    BaseMap,
    MapEdge,
    MapNode,
    children_summary_html,
    make_hyperlinks,
    node_size,
)

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"

DERMATOLOGY_CHILDREN = [
    ("skin neoplasm; pigmented nevus; malignant melanoma", 3825),
    ("psoriasis; psoriatic arthritis; rheumatology", 3762),
    ("atopic dermatitis; pruritus; allergy", 2981),
    ("healing; wound healing; keloid", 2887),
    ("alopecia; alopecia areata; hair", 1859),
    ("melanin; monophenol monooxygenase; melanocortin", 1815),
]


def discipline(path, label, terms, count, color, x, y, children):
    links = make_hyperlinks([str(9_000_000 + i) for i in range(count)]) \
        if count <= 5000 else f"Too many publ. ({count})"
    summary = children_summary_html(
        [(lab, n, make_hyperlinks([str(8_000_000 + i) for i in range(min(n, 12))]))
         for lab, n in children])
    return MapNode(
        id=path, label=label, size=node_size(count, "Discipline"), color=color,
        additional_terms=tuple(terms), level="Discipline", publ_count=count,
        hyperlinks=links, children_summary=summary, x=x, y=y)


def specialty(path, label, count, color, x, y):
    return MapNode(
        id=path, label=label, size=node_size(count, "Specialty"), color=color,
        additional_terms=("treatment", "risk factor"), level="Specialty",
        publ_count=count,
        hyperlinks=make_hyperlinks([str(7_000_000 + i) for i in range(count)]),
        children_summary=children_summary_html([("some topic", count // 2, [])]),
        x=x, y=y)


def main() -> None:
    purple = "rgba(104,14,75,0.5)"
    teal = "rgba(20,120,110,0.5)"
    nodes = [
        discipline("13.14", "dermatology; melanoma; skin",
                   ["psoriasis", "pathology", "atopic dermatitis", "skin disease",
                    "venereology", "keratinocyte", "disease"],
                   31_763, purple, 561.2, 551.5, DERMATOLOGY_CHILDREN),
        discipline("13.2", "immunology; microbiology; dendritic cell",
                   ["antigen", "cytokine", "allergy"], 4_200, purple,
                   480.0, 520.0, [("allele; tissue antigen; hla", 900)]),
        discipline("2.1", "cardiology; atrial fibrillation; heart failure",
                   ["arrhythmia", "ischemia"], 12_000, teal,
                   300.0, 400.0, [("heart valve; surgery; repair", 2_000)]),
        specialty("13.14.1", "skin neoplasm; pigmented nevus; malignant melanoma",
                  3_825, purple, 565.0, 548.0),
        specialty("13.14.2", "psoriasis; psoriatic arthritis; rheumatology",
                  3_762, purple, 558.0, 554.5),
        specialty("13.2.1", "allele; tissue antigen; hla", 900, purple, 481.5, 522.0),
        specialty("2.1.1", "heart valve; surgery; repair", 2_000, teal, 301.0, 402.0),
    ]
    edges = [
        MapEdge("13.14", "13.2", 0.0123),
        MapEdge("13.14", "2.1", 0.0021),
        MapEdge("13.14.1", "13.14.2", 0.0456),
    ]
    base = BaseMap(nodes=nodes, edges=edges,
                   metadata={"kind": "base", "seed": 0, "config_hash": "fixture"})
    write_map(base, OUT / "base", config={
        "title": "Viewer fixture map",
        "legend": [{"label": "Research area 13", "color": purple},
                   {"label": "Research area 2", "color": teal}],
    })

    gradient_low = "rgba(178,24,43,0.5)"
    gradient_high = "rgba(255,255,51,0.5)"
    overlay_nodes = []
    for i, node in enumerate(nodes):
        count = max(1, node.publ_count // (8 + i))
        overlay_nodes.append(replace(
            node,
            size=node_size(count, node.level),
            color=gradient_high if i % 2 == 0 else gradient_low,
            overlay_count=count,
            overlay_value=round(0.1 + 0.1 * i, 4),
            hyperlinks=make_hyperlinks([str(6_000_000 + k) for k in range(count)]),
        ))
    overlay = BaseMap(nodes=overlay_nodes, edges=edges,
                      metadata={"kind": "overlay", "overlay_mode": "subset_size",
                                "seed": 0, "config_hash": "fixture"})
    write_map(overlay, OUT / "overlay", config={
        "title": "Viewer fixture map - subset",
        "legend": [{"label": "Research area 13", "color": purple},
                   {"label": "Research area 2", "color": teal}],
        "gradientStops": [{"at": 0.0, "color": gradient_low},
                          {"at": 1.0, "color": gradient_high}],
    })
    expected = math.sqrt(31_763)
    print(f"fixtures written under {OUT} (13.14 size {expected:.4f})")


if __name__ == "__main__":
    main()
