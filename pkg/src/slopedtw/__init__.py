"""Slope-aware elastic distances and PSO medoid clustering for univariate time-series."""

from .distances import (
    BsdPoint,
    DistanceMatrix,
    DistanceSpec,
    DtwResult,
    bsd_point,
    dtw,
    dtw_bsd,
    dtw_ed,
    edr,
    lcss_distance,
    minkowski_point,
    sequence_distance,
)
from .pso import PsoConfig, PsoResult, assign, decode_position, fitness, medoid, run
from .series import (
    Dataset,
    RawSeries,
    SlopePoint,
    SlopeSeries,
    annotate_slopes,
    build_dataset,
    load_ucr,
    segment_extrema,
    standardize,
)
from .validity import (
    PairCounts,
    Partition,
    combined,
    compactness,
    csm,
    folkes_mallow,
    jaccard,
    pair_counts,
    purity,
    rand_index,
    separation,
    sse,
)

__version__ = "0.1.0"
