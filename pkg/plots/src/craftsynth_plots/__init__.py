from .render import (
    EmptyInput,
    PlotSpec,
    SchemaError,
    fig1_band_coords,
    read_rows,
    render,
    render_array,
    ternary_xy,
)

__all__ = ["EmptyInput", "PlotSpec", "SchemaError", "fig1_band_coords",
           "read_rows", "render", "render_array", "ternary_xy"]
