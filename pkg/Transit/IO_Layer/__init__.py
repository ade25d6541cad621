"""
IO Layer

Canonical JSON instance / transition files, random instance generation
and 2-D SVG rendering.

Usage:
    from Transit.IO_Layer import parse_instance, write_transition, render_svg

    instance = parse_instance("instance.json")
    C_s, C_t, s, t = instance.require_transition()
    write_transition(seq, "transition.json")

    seq = parse_transition("transition.json")
    record = seq.diagrams[0]
    render_svg(seq.dataset, seq.clusterings[0], record.diagram, "step0.svg")
"""

from .instance_io import (
    Instance,
    InstanceFormatError,
    canonical_json,
    instance_from_text,
    parse_instance,
    instance_to_text,
    write_instance,
    transition_from_text,
    parse_transition,
    transition_to_text,
    write_transition,
    generate_instance,
)
from .rendering import (
    UnsupportedDimensionError,
    padded_bbox,
    clip_halfplane,
    cell_polygons,
    point_in_polygon,
    render_svg,
)

__all__ = [
    "Instance",
    "InstanceFormatError",
    "canonical_json",
    "instance_from_text",
    "parse_instance",
    "instance_to_text",
    "write_instance",
    "transition_from_text",
    "parse_transition",
    "transition_to_text",
    "write_transition",
    "generate_instance",
    "UnsupportedDimensionError",
    "padded_bbox",
    "clip_halfplane",
    "cell_polygons",
    "point_in_polygon",
    "render_svg",
]
