"""citnet: citation network construction, exploration, analysis and layout."""

from .analytics import (Partition, PathQueryResult, cluster, connected_components,
                        core_publications, extreme_path, quality, relatedness)
from .dagops import EdgeSubset, break_cycles, transitive_reduction
from .errors import (CitnetError, ContractError, DuplicateIdError, InputFormatError,
                     PreconditionError, UnknownIdError)
from .explore import (ExpansionSpec, SelectionSpec, Session, drill_down, expand,
                      history_navigate, intermediates, predecessors, successors,
                      title_search)
from .ingest import (CitedReference, MatchResult, RawRecord, match_citations,
                     parse_pair_files, parse_wos_export, write_pair_files)
from .layout import LayoutFrame, LayoutParams, compose_frame, display_subset
from .model import (AttributeUpdate, BuildResult, CitationNetwork, NetworkView,
                    Publication, build_network, citation_score, update_attributes)

__version__ = "0.1.0"

__all__ = [
    "AttributeUpdate", "BuildResult", "CitationNetwork", "CitedReference",
    "CitnetError", "ContractError", "DuplicateIdError", "EdgeSubset",
    "ExpansionSpec", "InputFormatError", "LayoutFrame", "LayoutParams",
    "MatchResult", "NetworkView", "Partition", "PathQueryResult",
    "PreconditionError", "Publication", "RawRecord", "SelectionSpec", "Session",
    "UnknownIdError", "break_cycles", "build_network", "citation_score",
    "cluster", "compose_frame", "connected_components", "core_publications",
    "display_subset", "drill_down", "expand", "extreme_path", "history_navigate",
    "intermediates", "match_citations", "parse_pair_files", "parse_wos_export",
    "predecessors", "quality", "relatedness", "successors", "title_search",
    "transitive_reduction", "update_attributes", "write_pair_files",
]
