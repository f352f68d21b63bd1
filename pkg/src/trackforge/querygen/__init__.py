"""From aerodrome locations to grouped, altitude-bounded rectangular query boxes."""

from trackforge.querygen.boxes import (
    QueryBox,
    airspace_classes_of,
    box_timezone,
    elevation_range,
    filter_boxes,
    make_query_boxes,
    msl_bounds,
    nearest_distance_m,
    tz_offset,
)
from trackforge.querygen.geometry import (
    TERMINAL_RADIUS_M,
    Aerodrome,
    circle_polygon,
    read_aerodromes,
    union_polygons,
)
from trackforge.querygen.queries import (
    Query,
    QueryGenConfig,
    QueryGenResult,
    day_list,
    emit_queries,
    generate_queries,
    local_day_window,
    lpt_groups,
    write_box_outlines_csv,
    write_queries_csv,
)
from trackforge.querygen.rectilinear import (
    Rect,
    RectilinearRegion,
    cell_of,
    join_split_rectangles,
    rectilinear_cover,
    split_rect,
)

__all__ = [
    "Aerodrome", "Query", "QueryBox", "QueryGenConfig", "QueryGenResult", "Rect",
    "RectilinearRegion", "TERMINAL_RADIUS_M", "airspace_classes_of", "box_timezone", "cell_of",
    "circle_polygon", "day_list", "elevation_range", "emit_queries", "filter_boxes",
    "generate_queries", "join_split_rectangles", "local_day_window", "lpt_groups",
    "make_query_boxes", "msl_bounds", "nearest_distance_m", "read_aerodromes",
    "rectilinear_cover", "split_rect", "tz_offset", "union_polygons", "write_box_outlines_csv",
    "write_queries_csv",
]
