"""
Ordinal encoding of categorical features.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional

import numpy as np

MISSING = np.nan


@dataclass
class CategoryEncoder:
    """
    Maps raw category values to codes 0, 1, 2, ... in first-seen order.

    Values never seen while fitting, and absent values, encode as NaN (the
    missing marker the trees route by their default direction).
    """
    mapping: Dict[int, int] = field(default_factory=dict)

    def fit(self, values: Iterable[Optional[int]]) -> "CategoryEncoder":
        for v in values:
            if v is not None and v not in self.mapping:
                self.mapping[v] = len(self.mapping)
        return self

    def encode(self, value: Optional[int]) -> float:
        if value is None:
            return MISSING
        code = self.mapping.get(value)
        return MISSING if code is None else float(code)

    def __len__(self) -> int:
        return len(self.mapping)

    def to_dict(self) -> Dict[str, int]:
        return {str(k): v for k, v in self.mapping.items()}

    @classmethod
    def from_dict(cls, data: Dict[str, int]) -> "CategoryEncoder":
        return cls(mapping={int(k): int(v) for k, v in data.items()})


@dataclass
class CategoryEncoders:
    """The encoders for both categorical features, frozen after fitting."""
    vessel_type: CategoryEncoder = field(default_factory=CategoryEncoder)
    origin: CategoryEncoder = field(default_factory=CategoryEncoder)

    @classmethod
    def fit_trips(cls, trips) -> "CategoryEncoders":
        encoders = cls()
        for trip in trips:
            encoders.vessel_type.fit([trip.vessel_type])
            encoders.origin.fit([trip.origin_poi])
        return encoders

    def to_dict(self) -> Dict[str, Dict[str, int]]:
        return {"v_type": self.vessel_type.to_dict(), "origin": self.origin.to_dict()}

    @classmethod
    def from_dict(cls, data: Dict[str, Dict[str, int]]) -> "CategoryEncoders":
        return cls(
            vessel_type=CategoryEncoder.from_dict(data.get("v_type", {})),
            origin=CategoryEncoder.from_dict(data.get("origin", {})),
        )


def encode_categories(values: Iterable[Optional[int]], encoder: Optional[CategoryEncoder] = None) -> np.ndarray:
    """
    Encode a sequence of raw category values.

    Without an encoder, one is fitted on ``values`` first (first-seen order).
    """
    values = list(values)
    if encoder is None:
        encoder = CategoryEncoder().fit(values)
    return np.array([encoder.encode(v) for v in values], dtype=np.float64)
