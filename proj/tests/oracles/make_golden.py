#!/usr/bin/env python3
"""Straight-line reference for the golden vectors under tests/golden.

Written from the byte layouts only; shares no code with the C++ tree.
Re-run to regenerate:  python3 tests/oracles/make_golden.py tests/golden
"""
import hashlib
import struct
import sys
from pathlib import Path

from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives import serialization


def h(*parts):
    return hashlib.sha256(b"".join(parts)).digest()


def chain(seed, n):
    """states[i], keys[i] for epochs 0..n; state n is the seed."""
    states = [None] * (n + 1)
    states[n] = seed
    for i in range(n, 0, -1):
        states[i - 1] = h(b"\x01", states[i])
    return states, [h(b"\x02", s) for s in states]


def write_chain(out, seed, n):
    states, keys = chain(seed, n)
    lines = [f"# seed {seed.hex()} max_epochs {n}", "# epoch state key"]
    lines += [f"{i} {states[i].hex()} {keys[i].hex()}" for i in range(n + 1)]
    out.write_text("\n".join(lines) + "\n")


def chunk_vector(out):
    sk = Ed25519PrivateKey.from_private_bytes(bytes([1]) * 32)
    pk = sk.public_key().public_bytes(serialization.Encoding.Raw, serialization.PublicFormat.Raw)
    owner_id = h(pk)
    stream_id = h(b"golden-stream")
    t0, delta, index, epoch = 1_700_000_000_000, 60_000, 2, 3
    start = t0 + index * delta
    records = [(start, b"a"), (start + 1000, b"bc"), (start + 2500, b"")]
    prev = h(b"prev")
    _, keys = chain(bytes(32), 8)
    key = keys[epoch]

    header = b"SVC1" + bytes([(1 << 4) | 0]) + stream_id
    header += struct.pack(">Qqq", index, start, start + delta) + prev + struct.pack(">II", epoch, len(records))
    block = struct.pack(">I", len(records))
    for ts, v in records:
        block += struct.pack(">qH", ts, len(v)) + v
    nonce = h(b"\x03", stream_id, struct.pack(">QI", index, epoch))[:12]
    payload = AESGCM(key).encrypt(nonce, block, header)
    sig = sk.sign(h(header, payload))
    wire = header + struct.pack(">I", len(payload)) + payload + sig
    chunk_key = h(stream_id, owner_id, h(struct.pack(">q", start)))

    fields = {
        "owner_seed": (bytes([1]) * 32).hex(),
        "owner_pk": pk.hex(),
        "stream_id": stream_id.hex(),
        "t0": str(t0),
        "delta": str(delta),
        "chunk_index": str(index),
        "epoch": str(epoch),
        "prev_hash": prev.hex(),
        "records": ";".join(f"{ts}:{v.hex()}" for ts, v in records),
        "nonce": nonce.hex(),
        "wire": wire.hex(),
        "digest": h(wire).hex(),
        "chunk_key": chunk_key.hex(),
    }
    out.write_text("".join(f"{k} {v}\n" for k, v in fields.items()))


def keymat_vector(out):
    stream_id = h(b"golden-stream")
    grantee = h(b"grantee")
    rows = [
        (7, bytes(32)),
        (7, grantee),
        (0, grantee),
    ]
    lines = ["# epoch grantee key"]
    for epoch, g in rows:
        key = h(b"\x21", stream_id, struct.pack(">I", epoch), g)
        lines.append(f"{epoch} {g.hex()} {key.hex()}")
    out.write_text("\n".join(lines) + "\n")


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "tests/golden")
    out.mkdir(parents=True, exist_ok=True)
    write_chain(out / "key_regression_zero_n8.txt", bytes(32), 8)
    write_chain(out / "key_regression_n300.txt", h(b"streamvault"), 300)
    chunk_vector(out / "chunk_wire.txt")
    keymat_vector(out / "keymat_keys.txt")


if __name__ == "__main__":
    main()
