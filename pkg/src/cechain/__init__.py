"""Signature-chained Wi-Fi connection establishment.

An AP signs (MAC, time), slices the signature across the preambles of its
CE frames and binds the last slice to channel and sequence number. The
station collects the slices, enforces a per-frame time bound and a retry
limit, and verifies before it connects.

Subpackages: ``sigchain`` (slicing, masking, switch tracking, roaming),
``codec`` (SECDED), ``phych`` (bit-flip channels), ``timebound`` (relay
timing and detectors), ``protofsm`` (state machines, model checker),
``sigpca`` (frame identification) and ``harness`` (scenarios and CLI).
"""

__version__ = "0.1.0"

from . import bits, codec, harness, phych, protofsm, sigchain, sigpca, timebound  # noqa: F401
