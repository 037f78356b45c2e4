import os

import numpy as np

from utils.errors import FormatError
from utils.io import write_sidecar, read_sidecar, sidecar_path

PACKED = "packed"
UNPACKED = "unpacked"
PACKED_TAG = "packed-msb"

def get_bit_format(name):
    if name in ("packed", "packed-msb"):
        return PACKED
    elif name in ("unpacked", "one-bit-per-byte", "byte"):
        return UNPACKED
    else:
        raise FormatError(f"Invalid bit file format chosen: {name}")

class BitStream:
    """Ordered bits kept packed MSB-first, with an explicit bit count.

    Padding bits of the last byte are always zero, so two streams are equal
    iff their packed bytes and lengths are equal.
    """

    def __init__(self, packed, length):
        packed = np.asarray(packed, dtype=np.uint8)
        if length < 0 or length > 8 * packed.shape[0]:
            raise FormatError(f"Bit count {length} does not fit in {packed.shape[0]} bytes")
        n_bytes = (length + 7) // 8
        packed = packed[:n_bytes].copy()
        if length % 8:
            packed[-1] &= np.uint8((0xFF << (8 - length % 8)) & 0xFF)
        packed.flags.writeable = False
        self._packed = packed
        self._length = int(length)

    @classmethod
    def from_bits(cls, bits):
        bits = np.asarray(bits, dtype=np.uint8).ravel()
        if bits.shape[0] and bits.max() > 1:
            raise FormatError("Bit values must be 0 or 1")
        return cls(np.packbits(bits), bits.shape[0])

    @classmethod
    def from_string(cls, text):
        return cls.from_bits([int(c) for c in text if c in "01"])

    @classmethod
    def empty(cls):
        return cls(np.zeros(0, dtype=np.uint8), 0)

    @classmethod
    def concat(cls, streams):
        streams = list(streams)
        if not streams:
            return cls.empty()
        return cls.from_bits(np.concatenate([s.bits for s in streams]))

    @property
    def bits(self):
        return np.unpackbits(self._packed, count=self._length)

    @property
    def packed(self):
        return self._packed

    def invert(self):
        return BitStream.from_bits(1 - self.bits)

    def to_string(self):
        return "".join(str(b) for b in self.bits)

    def __len__(self):
        return self._length

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return BitStream.from_bits(self.bits[idx])
        if idx < 0:
            idx += self._length
        if not 0 <= idx < self._length:
            raise IndexError(f"Bit index {idx} out of range for {self._length} bits")
        return int((self._packed[idx >> 3] >> (7 - (idx & 7))) & 1)

    def __eq__(self, other):
        if not isinstance(other, BitStream):
            return NotImplemented
        return self._length == other._length and np.array_equal(self._packed, other._packed)

    def __hash__(self):
        return hash((self._length, self._packed.tobytes()))

    def __repr__(self):
        if self._length <= 32:
            return f"BitStream('{self.to_string()}')"
        return f"BitStream(len={self._length})"

def pack(bs):
    return bs.packed.tobytes()

def unpack(data, n_bits):
    data = np.frombuffer(bytes(data), dtype=np.uint8)
    if n_bits < 0 or n_bits > 8 * data.shape[0]:
        raise FormatError(f"Cannot unpack {n_bits} bits from {data.shape[0]} bytes")
    return BitStream(data, n_bits)

def write_bits(path, bs, fmt=PACKED, extra=None):
    fmt = get_bit_format(fmt)
    if fmt == PACKED:
        with open(path, 'wb') as f:
            f.write(pack(bs))
        fields = {"bits": len(bs), "format": PACKED_TAG}
        if extra:
            fields.update(extra)
        write_sidecar(path, fields)
    else:
        bs.bits.tofile(path)

def read_bits(path, fmt="auto"):
    if fmt == "auto":
        fmt = PACKED if os.path.exists(sidecar_path(path)) else UNPACKED
    fmt = get_bit_format(fmt)

    if fmt == PACKED:
        meta = read_sidecar(path, required=("bits", "format"))
        if meta["format"] != PACKED_TAG:
            raise FormatError(f"Unsupported packed format '{meta['format']}' in {sidecar_path(path)}")
        try:
            n_bits = int(meta["bits"])
        except ValueError:
            raise FormatError(f"Malformed bit count '{meta['bits']}' in {sidecar_path(path)}")
        with open(path, 'rb') as f:
            data = f.read()
        if len(data) != (n_bits + 7) // 8:
            raise FormatError(f"{path} holds {len(data)} bytes, sidecar declares {n_bits} bits")
        return unpack(data, n_bits)

    raw = np.fromfile(path, dtype=np.uint8)
    if raw.shape[0] and raw.max() > 1:
        bad = int(np.argmax(raw > 1))
        raise FormatError(f"{path}: byte {bad} is 0x{raw[bad]:02x}, expected 0x00 or 0x01")
    return BitStream.from_bits(raw)

def read_bits_metadata(path):
    return read_sidecar(path, required=("bits", "format"))

class BitWriter:
    """Appends bit chunks of any length to a bit file; the sidecar is written on close."""

    def __init__(self, path, fmt=PACKED, extra=None):
        self.path = path
        self.fmt = get_bit_format(fmt)
        self.extra = extra
        self.count = 0
        self.carry = np.zeros(0, dtype=np.uint8)
        self.f = None

    def __enter__(self):
        self.f = open(self.path, 'wb')
        return self

    def write(self, bits):
        bits = np.asarray(bits, dtype=np.uint8)
        self.count += bits.shape[0]
        if self.fmt == UNPACKED:
            bits.tofile(self.f)
            return
        bits = np.concatenate((self.carry, bits))
        whole = bits.shape[0] - bits.shape[0] % 8
        np.packbits(bits[:whole]).tofile(self.f)
        self.carry = bits[whole:]

    def __exit__(self, *exc):
        if self.fmt == PACKED:
            if self.carry.shape[0]:
                np.packbits(self.carry).tofile(self.f)
            fields = {"bits": self.count, "format": PACKED_TAG}
            if self.extra:
                fields.update(self.extra)
            write_sidecar(self.path, fields)
        self.f.close()
        return False
