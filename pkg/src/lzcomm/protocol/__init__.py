"""Two-party LCP and Hamming-distance protocols over LZ-compressed inputs."""

from lzcomm.protocol.engine import (
    HammingOutcome,
    LcpOutcome,
    NonCanonicalInput,
    ProtocolConfig,
    gap_max,
    hamming_protocol,
    lcp_protocol,
    run_inprocess,
)
from lzcomm.protocol.messages import (
    Control,
    Kind,
    Message,
    ProtocolError,
    PublicParams,
    ReplayReport,
    Speaker,
    Transcript,
    TransportError,
    replay,
)

__all__ = [
    "Control", "HammingOutcome", "Kind", "LcpOutcome", "Message", "NonCanonicalInput",
    "ProtocolConfig", "ProtocolError", "PublicParams", "ReplayReport", "Speaker", "Transcript",
    "TransportError", "gap_max", "hamming_protocol", "lcp_protocol", "replay", "run_inprocess",
]
