"""Exact displaceability analysis for toric and semitoric momentum polygons."""
