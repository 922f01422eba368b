"""OFDM link-level simulator: modem, fading channel, MAC framing and captures."""

from ._core import (
    CaptureError,
    ConfigError,
    CrcMismatchError,
    Error,
    HcsMismatchError,
    build_pdu,
    canonical_config,
    capture_read,
    capture_write,
    crc8_hcs,
    crc32,
    effective_channel,
    fft,
    ifft,
    loopback,
    occupied_bandwidth,
    parse_pdu,
    pn_sequence,
    psd,
    qpsk_demap,
    qpsk_map,
    qpsk_theory_ber,
    spread,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "CaptureError",
    "ConfigError",
    "CrcMismatchError",
    "Error",
    "HcsMismatchError",
    "build_pdu",
    "canonical_config",
    "capture_read",
    "capture_write",
    "crc8_hcs",
    "crc32",
    "effective_channel",
    "fft",
    "ifft",
    "loopback",
    "occupied_bandwidth",
    "parse_pdu",
    "pn_sequence",
    "psd",
    "qpsk_demap",
    "qpsk_map",
    "qpsk_theory_ber",
    "spread",
    "sweep",
]
