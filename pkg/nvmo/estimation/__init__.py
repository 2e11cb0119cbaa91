from .observer import (
    NeighborEstimate,
    NetworkedObserver,
    ObserverState,
    network_round,
    networked_input,
    observer_step,
    vmo_input,
)

__all__ = [
    "NeighborEstimate",
    "NetworkedObserver",
    "ObserverState",
    "network_round",
    "networked_input",
    "observer_step",
    "vmo_input",
]
