"""Community detection on accumulated-era networks and tracking across eras."""

from eranet.community.detection import (
    CommunityPartition,
    community_stats,
    detect_communities,
    louvain,
    modularity,
)
from eranet.community.tracking import (
    DynamicCommunity,
    TrackingConfig,
    TrackingEvent,
    TrackingResult,
    diversity,
    era_presence_patterns,
    jaccard,
    theta_range,
    theta_sweep,
    track,
    tracking_summary,
)

__all__ = [
    "CommunityPartition",
    "DynamicCommunity",
    "TrackingConfig",
    "TrackingEvent",
    "TrackingResult",
    "community_stats",
    "detect_communities",
    "diversity",
    "era_presence_patterns",
    "jaccard",
    "louvain",
    "modularity",
    "theta_range",
    "theta_sweep",
    "track",
    "tracking_summary",
]
