"""Global geometry of a target over a window: strips, merge trees, domains, rules."""

from .delta import DeltaComponent, delta_components
from .domains import FundamentalDomain, fundamental_domains
from .merge import MergeNode, MergeTree, merge_tree
from .probe import ProbeReport, probe_symmetric_pair
from .rules import alternating_rule_check, matching_rule_check
from .strips import Strip, StripAtlas, build_atlas

__all__ = [
    "DeltaComponent",
    "ProbeReport",
    "delta_components",
    "probe_symmetric_pair",
    "FundamentalDomain",
    "MergeNode",
    "MergeTree",
    "Strip",
    "StripAtlas",
    "alternating_rule_check",
    "build_atlas",
    "fundamental_domains",
    "matching_rule_check",
    "merge_tree",
]
