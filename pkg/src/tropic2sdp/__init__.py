"""tropic2sdp: compile parity / mean payoff / simple stochastic games into
SDP feasibility instances through max-average constraint systems, with
exact-arithmetic verification of every stage."""

__version__ = "0.1.0"

__all__ = [
    "bridge",
    "cli",
    "dyadic",
    "gadget",
    "games",
    "generate",
    "kernels",
    "linalg",
    "maxavg",
    "nonarch",
    "realize",
    "sdpcore",
]
