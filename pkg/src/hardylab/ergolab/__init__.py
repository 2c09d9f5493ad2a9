"""Measure-preserving systems on tori, Hardy iterates and multiple ergodic averages."""

from ..errors import ScheduleTooSmall
from .averages import (
    CSV_HEADER,
    AverageReport,
    geometric_mean_value,
    l2_ladder,
    multiple_average_L2,
    multiple_average_pointwise,
    pointwise_ladder,
    read_csv,
    recurrence_average,
    short_interval_double_average,
    vdc_inequality,
    weyl_ladder,
    weyl_sum,
    write_csv,
)
from .iterates import IterateSequence, floor_at, iterate_sequence
from .observables import CharacterObservable
from .seminorms import SeminormEstimate, hk_character_oracle, hk_seminorm_approx, product_rotation
from .systems import (
    FixedPoint,
    SkewProduct,
    ToralAutomorphism,
    TorusRotation,
    power_map,
    random_point,
    step,
    system_from_dict,
)

__all__ = [
    "TorusRotation", "SkewProduct", "ToralAutomorphism", "FixedPoint", "system_from_dict", "power_map",
    "step", "random_point", "CharacterObservable", "IterateSequence", "iterate_sequence", "floor_at",
    "AverageReport", "CSV_HEADER", "write_csv", "read_csv", "multiple_average_pointwise",
    "pointwise_ladder", "multiple_average_L2", "l2_ladder", "weyl_sum", "weyl_ladder",
    "short_interval_double_average", "recurrence_average", "vdc_inequality", "geometric_mean_value",
    "SeminormEstimate", "hk_seminorm_approx", "hk_character_oracle", "product_rotation",
    "ScheduleTooSmall",
]
