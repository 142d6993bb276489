from .io import (
    CONCENTRATION_INDICES,
    FEATURE_NAMES,
    GRID_SHAPE,
    SNAPSHOT_TIMES,
    TARGET_NAMES,
    DensityFrame,
    GroundTruth,
    TemporalRecord,
    load_density_frames,
    load_ground_truth,
    load_temporal,
    write_density_snapshots,
    write_ground_truth_csv,
    write_temporal_csv,
)
from .preprocess import (
    DatasetSplit,
    DegenerateColumnWarning,
    Normalizer,
    correlation_matrix,
    interpolate_missing,
    records_to_matrix,
    sliding_windows,
    split_dataset,
    window_sequences,
)
from .synth import (
    SynthConfig,
    SynthDataset,
    default_config,
    make_multiplicative_dataset,
    synthesize_streams,
    write_streams,
)
