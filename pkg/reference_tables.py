"""Published solvability percentages and l1 statistics used as comparison targets.

Rows are gates 0..6 in canonical order; columns are neuron variants. Only
encodings B and C have published values. In the l1 tables None marks a cell
with no solvable run, hence no statistic.
"""

from __future__ import annotations

from typing import Any, Dict, List, Optional, Tuple

try:
    from .encoding import EncodingVariant
    from .lif_neuron import NeuronVariant
except ImportError:
    from encoding import EncodingVariant  # type: ignore[no-redef]
    from lif_neuron import NeuronVariant  # type: ignore[no-redef]


_Table = Dict[NeuronVariant, List[float]]
_L1Table = Dict[NeuronVariant, List[Optional[float]]]

_V = NeuronVariant

_ENCODING_B_BETA_1: _Table = {
    _V.SRM: [30.0, 2.5, 3.0, 29.5, 1.5, 4.0, 2.0],
    _V.SRS: [27.5, 2.5, 2.5, 28.5, 3.0, 4.5, 1.0],
    _V.SRZ: [0.0] * 7,
    _V.PRM: [49.5, 1.0, 1.0, 50.0, 1.0, 0.5, 1.0],
    _V.PRS: [49.5, 1.0, 1.5, 49.5, 5.0, 1.5, 0.5],
    _V.PRZ: [0.0] * 7,
}

_ENCODING_B_BETA_HALF: _Table = {
    _V.SRM: [63.5, 20.0, 14.5, 70.0, 10.5, 5.0, 7.5],
    _V.SRS: [22.5, 0.0, 0.0, 22.5, 2.0, 2.0, 0.0],
    _V.SRZ: [0.0] * 7,
    _V.PRM: [93.0, 11.5, 11.5, 95.5, 2.5, 2.5, 3.0],
    _V.PRS: [25.0, 0.0, 0.0, 25.0, 1.0, 1.0, 0.0],
    _V.PRZ: [0.0] * 7,
}

_ENCODING_C_BETA_1: _Table = {
    _V.SRM: [61.0, 19.0, 24.0, 57.0, 34.0, 14.0, 13.0],
    _V.SRS: [72.0, 30.0, 29.0, 66.0, 41.0, 17.0, 17.0],
    _V.SRZ: [66.0, 27.0, 22.0, 70.0, 27.0, 8.0, 8.0],
    _V.PRM: [41.0, 3.0, 7.0, 59.0, 62.0, 5.0, 6.0],
    _V.PRS: [41.0, 3.0, 7.0, 59.0, 61.0, 5.0, 6.0],
    _V.PRZ: [40.0, 6.0, 7.0, 40.0, 38.0, 3.0, 3.0],
}

_ENCODING_C_BETA_HALF: _Table = {
    _V.SRM: [87.0, 15.0, 6.0, 95.0, 39.0, 2.0, 11.0],
    _V.SRS: [90.0, 15.0, 6.0, 98.0, 39.0, 2.0, 11.0],
    _V.SRZ: [88.0, 14.0, 6.0, 95.0, 37.0, 0.0, 8.0],
    _V.PRM: [39.0, 5.0, 0.0, 44.0, 44.0, 0.0, 5.0],
    _V.PRS: [39.0, 5.0, 0.0, 44.0, 44.0, 0.0, 5.0],
    _V.PRZ: [39.0, 5.0, 0.0, 44.0, 44.0, 0.0, 5.0],
}

_TABLES: Dict[Tuple[EncodingVariant, float], _Table] = {
    (EncodingVariant.B, 1.0): _ENCODING_B_BETA_1,
    (EncodingVariant.B, 0.5): _ENCODING_B_BETA_HALF,
    (EncodingVariant.C, 1.0): _ENCODING_C_BETA_1,
    (EncodingVariant.C, 0.5): _ENCODING_C_BETA_HALF,
}


_NA: List[Optional[float]] = [None] * 7

_L1_MEAN_B_BETA_1: _L1Table = {
    _V.SRM: [12.7, 32.2, 41.0, 5.6, 31.7, 17.0, 18.8],
    _V.SRS: [12.8, 37.0, 15.6, 10.2, 50.3, 27.3, 36.5],
    _V.SRZ: _NA,
    _V.PRM: [4.4, 5.0, 5.0, 3.4, 6.0, 6.0, 6.0],
    _V.PRS: [6.6, 18.0, 15.0, 4.5, 16.2, 16.0, 8.0],
    _V.PRZ: _NA,
}

_L1_MEAN_B_BETA_HALF: _L1Table = {
    _V.SRM: [5.9, 24.0, 11.4, 3.1, 42.0, 7.3, 3.8],
    _V.SRS: [5.2, None, None, 3.5, 6.5, 6.5, None],
    _V.SRZ: _NA,
    _V.PRM: [3.2, 3.2, 3.6, 2.2, 6.0, 8.8, 3.8],
    _V.PRS: [4.9, None, None, 3.4, 7.0, 7.0, None],
    _V.PRZ: _NA,
}

_L1_STD_B_BETA_1: _L1Table = {
    _V.SRM: [24.4, 47.9, 47.4, 9.2, 36.3, 25.1, 22.7],
    _V.SRS: [21.3, 39.6, 4.1, 25.0, 45.6, 31.8, 28.5],
    _V.SRZ: _NA,
    _V.PRM: [4.3, 1.0, 1.0, 3.5, 0.0, 0.0, 1.0],
    _V.PRS: [5.5, 1.0, 4.3, 3.7, 3.4, 7.0, 0.0],
    _V.PRZ: _NA,
}

_L1_STD_B_BETA_HALF: _L1Table = {
    _V.SRM: [16.6, 57.7, 33.9, 1.5, 75.1, 3.2, 1.0],
    _V.SRS: [1.8, None, None, 0.9, 0.9, 0.9, None],
    _V.SRZ: _NA,
    _V.PRM: [2.1, 0.4, 1.7, 1.3, 2.8, 3.7, 1.5],
    _V.PRS: [1.6, None, None, 0.8, 1.0, 1.0, None],
    _V.PRZ: _NA,
}

_L1_MEAN_C_BETA_1: _L1Table = {
    _V.SRM: [8.2, 6.2, 13.8, 4.3, 7.5, 21.9, 4.5],
    _V.SRS: [11.6, 14.7, 6.5, 4.1, 14.1, 25.4, 4.1],
    _V.SRZ: [6.7, 5.1, 5.0, 5.2, 12.1, 98.6, 26.4],
    _V.PRM: [7.5, 12.3, 9.4, 3.5, 5.7, 9.8, 4.7],
    _V.PRS: [8.3, 13.3, 9.9, 3.5, 5.9, 10.4, 4.7],
    _V.PRZ: [4.5, 5.8, 5.7, 3.2, 4.4, 190.0, 3.3],
}

_L1_MEAN_C_BETA_HALF: _L1Table = {
    _V.SRM: [3.7, 7.7, 8.0, 3.5, 6.2, 12.0, 5.1],
    _V.SRS: [3.6, 7.7, 8.0, 3.5, 6.2, 12.0, 5.1],
    _V.SRZ: [4.0, 5.7, 5.0, 3.2, 4.5, None, 4.1],
    _V.PRM: [5.4, 6.8, None, 3.8, 5.5, None, 4.4],
    _V.PRS: [5.4, 6.8, None, 3.8, 5.5, None, 4.4],
    _V.PRZ: [4.0, 6.0, None, 3.1, 4.2, None, 4.0],
}

_L1_STD_C_BETA_1: _L1Table = {
    _V.SRM: [13.4, 3.1, 33.6, 2.4, 4.0, 42.3, 1.5],
    _V.SRS: [24.8, 33.0, 3.6, 2.3, 28.3, 41.1, 1.6],
    _V.SRZ: [21.7, 1.6, 1.6, 11.5, 33.2, 91.4, 58.8],
    _V.PRM: [4.2, 3.3, 3.8, 1.7, 3.8, 3.2, 1.5],
    _V.PRS: [5.2, 3.1, 4.1, 1.7, 3.6, 3.1, 1.5],
    _V.PRZ: [1.1, 1.1, 1.0, 0.5, 1.1, 0.0, 0.5],
}

_L1_STD_C_BETA_HALF: _L1Table = {
    _V.SRM: [2.5, 3.0, 3.5, 1.0, 2.3, 2.0, 1.4],
    _V.SRS: [2.5, 3.0, 3.5, 1.0, 2.3, 2.0, 1.4],
    _V.SRZ: [10.6, 1.3, 1.5, 0.5, 1.0, None, 0.3],
    _V.PRM: [1.6, 1.6, None, 0.8, 1.6, None, 0.8],
    _V.PRS: [1.6, 1.6, None, 0.8, 1.6, None, 0.8],
    _V.PRZ: [0.0, 0.0, None, 0.3, 0.6, None, 0.0],
}

_L1_MEAN_TABLES: Dict[Tuple[EncodingVariant, float], _L1Table] = {
    (EncodingVariant.B, 1.0): _L1_MEAN_B_BETA_1,
    (EncodingVariant.B, 0.5): _L1_MEAN_B_BETA_HALF,
    (EncodingVariant.C, 1.0): _L1_MEAN_C_BETA_1,
    (EncodingVariant.C, 0.5): _L1_MEAN_C_BETA_HALF,
}

_L1_STD_TABLES: Dict[Tuple[EncodingVariant, float], _L1Table] = {
    (EncodingVariant.B, 1.0): _L1_STD_B_BETA_1,
    (EncodingVariant.B, 0.5): _L1_STD_B_BETA_HALF,
    (EncodingVariant.C, 1.0): _L1_STD_C_BETA_1,
    (EncodingVariant.C, 0.5): _L1_STD_C_BETA_HALF,
}


def _lookup(
    tables: Dict[Tuple[EncodingVariant, float], Any],
    encoding: EncodingVariant,
    variant: NeuronVariant,
    beta: float,
    gate_id: int,
) -> Optional[float]:
    table = tables.get((encoding, float(beta)))
    if table is None:
        return None
    column = table.get(variant)
    if column is None or not 0 <= int(gate_id) < len(column):
        return None
    return column[int(gate_id)]


def reference_probability(
    encoding: EncodingVariant, variant: NeuronVariant, beta: float, gate_id: int
) -> Optional[float]:
    """Published percentage for one cell, or None where nothing was published."""

    return _lookup(_TABLES, encoding, variant, beta, gate_id)


def reference_l1_mean(
    encoding: EncodingVariant, variant: NeuronVariant, beta: float, gate_id: int
) -> Optional[float]:
    return _lookup(_L1_MEAN_TABLES, encoding, variant, beta, gate_id)


def reference_l1_std(
    encoding: EncodingVariant, variant: NeuronVariant, beta: float, gate_id: int
) -> Optional[float]:
    return _lookup(_L1_STD_TABLES, encoding, variant, beta, gate_id)


def has_reference(encoding: EncodingVariant, beta: float) -> bool:
    return (encoding, float(beta)) in _TABLES
