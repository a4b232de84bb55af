"""Noisy-link simulation: Gray-coded 64-QAM over AWGN, plus a binary
symmetric channel, and OFDM frame-capacity accounting.

The noiseless sentinel is ``snr_db = math.inf``. All randomness derives
from the 64-bit seed in LinkConfig via the splitmix64 stream.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import rng

AWGN64QAM = "awgn64qam"
BSC = "bsc"

PROTECTED = "protected"
UNPROTECTED = "unprotected"

# protected header length in octets; must match the codec header
HEADER_OCTETS = 21

# per-axis Gray map: 3-bit code -> amplitude level
# 000 -> -7, 001 -> -5, 011 -> -3, 010 -> -1, 110 -> +1, 111 -> +3, 101 -> +5, 100 -> +7
_LEVEL_BY_CODE = np.array([-7, -5, -1, -3, 7, 5, 1, 3], dtype=np.float64)
# level index i (level = 2i-7) -> 3-bit code
_CODE_BY_LEVEL_INDEX = np.array([0, 1, 3, 2, 6, 7, 5, 4], dtype=np.int64)
_SCALE = 1.0 / math.sqrt(42.0)  # unit average symbol energy


@dataclass(frozen=True)
class LinkConfig:
    snr_db: float = math.inf
    channel_kind: str = AWGN64QAM
    bsc_flip_prob: float = 0.0
    seed: int = 0
    header_protection: str = PROTECTED

    def __post_init__(self):
        if self.channel_kind not in (AWGN64QAM, BSC):
            raise ValueError(f"unknown channel kind {self.channel_kind!r}")
        if not 0.0 <= self.bsc_flip_prob <= 0.5:
            raise ValueError(f"bsc_flip_prob {self.bsc_flip_prob} outside [0, 0.5]")
        if self.header_protection not in (PROTECTED, UNPROTECTED):
            raise ValueError(f"unknown header protection {self.header_protection!r}")
        if math.isnan(self.snr_db):
            raise ValueError("snr_db is NaN")


@dataclass(frozen=True)
class FrameGrid:
    subcarriers: int = 132
    symbols_per_frame: int = 14
    bits_per_symbol: int = 6
    streams: int = 1

    @property
    def bits_per_frame(self):
        return self.subcarriers * self.symbols_per_frame * self.bits_per_symbol * self.streams


def qam64_map(bits):
    """Map a bit array to unit-energy 64-QAM symbols.

    Pads with zero bits to a multiple of 6; returns (symbols, pad_len).
    First 3 bits of each group select the in-phase level, last 3 the
    quadrature level.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    pad = (-bits.size) % 6
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    groups = bits.reshape(-1, 6)
    code_i = groups[:, 0] * 4 + groups[:, 1] * 2 + groups[:, 2]
    code_q = groups[:, 3] * 4 + groups[:, 4] * 2 + groups[:, 5]
    symbols = (_LEVEL_BY_CODE[code_i] + 1j * _LEVEL_BY_CODE[code_q]) * _SCALE
    return symbols, pad


def awgn(symbols, snr_db, seed):
    """Add circularly-symmetric complex Gaussian noise at the given SNR."""
    if math.isinf(snr_db) and snr_db > 0:
        return np.array(symbols, copy=True)
    n0 = 10.0 ** (-snr_db / 10.0)
    sigma = math.sqrt(n0 / 2.0)
    z = rng.normals(seed, 2 * len(symbols))
    return symbols + sigma * (z[0::2] + 1j * z[1::2])


def _decide_axis(u):
    """Nearest-level decision on unnormalized amplitudes; midway ties go to
    the lower-magnitude level (-1 at the origin)."""
    q = (u + 7.0) / 2.0
    low = np.floor(q)
    tie = q - low == 0.5
    idx = np.where(tie, _tie_index(low), np.round(q))
    return np.clip(idx, 0, 7).astype(np.int64)


def _tie_index(low):
    lvl_low = 2.0 * low - 7.0
    lvl_high = lvl_low + 2.0
    return np.where(np.abs(lvl_low) <= np.abs(lvl_high), low, low + 1.0)


def qam64_demap(symbols, pad=0):
    """Hard per-axis nearest-level decision and inverse Gray map."""
    u = np.asarray(symbols) / _SCALE
    idx_i = _decide_axis(u.real)
    idx_q = _decide_axis(u.imag)
    code_i = _CODE_BY_LEVEL_INDEX[idx_i]
    code_q = _CODE_BY_LEVEL_INDEX[idx_q]
    bits = np.empty((len(u), 6), dtype=np.uint8)
    for k in range(3):
        bits[:, k] = (code_i >> (2 - k)) & 1
        bits[:, 3 + k] = (code_q >> (2 - k)) & 1
    flat = bits.reshape(-1)
    return flat[: flat.size - pad] if pad else flat


def _channel_bits(bits, cfg):
    if bits.size == 0:
        return bits.copy()
    if cfg.channel_kind == BSC:
        if cfg.bsc_flip_prob == 0.0:
            return bits.copy()
        flips = rng.uniforms(cfg.seed, bits.size) < cfg.bsc_flip_prob
        return bits ^ flips.astype(np.uint8)
    symbols, pad = qam64_map(bits)
    noisy = awgn(symbols, cfg.snr_db, cfg.seed)
    return qam64_demap(noisy, pad)


def transmit(payload, cfg):
    """Send payload octets through the configured channel.

    Returns (received_payload, bit_error_count). With protected headers the
    first 21 octets bypass the channel entirely.
    """
    data = np.frombuffer(bytes(payload), dtype=np.uint8)
    bits = np.unpackbits(data)
    guard = 0
    if cfg.header_protection == PROTECTED:
        guard = min(HEADER_OCTETS * 8, bits.size)
    body = _channel_bits(bits[guard:], cfg)
    received_bits = np.concatenate([bits[:guard], body])
    errors = int(np.count_nonzero(received_bits != bits))
    return np.packbits(received_bits).tobytes(), errors


def frames_required(payload_len_octets, grid=FrameGrid()):
    """OFDM frames needed for a payload on a fully loaded uncoded grid."""
    if payload_len_octets <= 0:
        raise ValueError("payload length must be positive")
    return -(-8 * payload_len_octets // grid.bits_per_frame)
