"""Graph partitioning, provider shares and integration."""
from .integrate import PartitionedGraph, compare_exchange, integrate, merge_runs, secure_config_k
from .partition import (
    EdgeParseError,
    EdgeRecord,
    GlobalConfig,
    LocalPartition,
    chunk_of,
    local_process,
    optimal_k,
    parse_edge_list,
    records_to_edges,
)
from .sharefile import (
    ProviderShareBundle,
    ShareFileError,
    combine_trio,
    read_share_file,
    share_partition,
    write_share_file,
)

__all__ = [
    "EdgeParseError", "EdgeRecord", "GlobalConfig", "LocalPartition", "PartitionedGraph",
    "ProviderShareBundle", "ShareFileError", "chunk_of", "combine_trio", "compare_exchange",
    "integrate", "local_process", "merge_runs", "optimal_k", "parse_edge_list", "read_share_file",
    "records_to_edges", "secure_config_k", "share_partition", "write_share_file",
]
