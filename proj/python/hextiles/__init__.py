"""Hierarchical hexagonal tiles for multivariate polygon data."""

from ._hextiles import (
    ConfigError,
    ConflictError,
    CorruptionError,
    Dataset,
    Error,
    HexGrid,
    HexIndex,
    HierarchyExhausted,
    IncompatibleError,
    InvalidArgument,
    ParseError,
    RootHasNoParent,
    TileSet,
    TilesetConfig,
    UnsupportedVersion,
    ValidationError,
    aggregate,
    compile,
    deserialize,
    load,
    load_dataset,
    load_tileset_config,
    merge_datasets,
    run_cli,
    save,
    validate_config,
)

__all__ = [
    "ConfigError",
    "ConflictError",
    "CorruptionError",
    "Dataset",
    "Error",
    "HexGrid",
    "HexIndex",
    "HierarchyExhausted",
    "IncompatibleError",
    "InvalidArgument",
    "ParseError",
    "RootHasNoParent",
    "TileSet",
    "TilesetConfig",
    "UnsupportedVersion",
    "ValidationError",
    "aggregate",
    "compile",
    "deserialize",
    "load",
    "load_dataset",
    "load_tileset_config",
    "merge_datasets",
    "run_cli",
    "save",
    "validate_config",
]
