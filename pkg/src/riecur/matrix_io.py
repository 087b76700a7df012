"""Matrix files and grayscale video frame I/O.

Matrices use a small binary container (magic ``RPCAMAT1``, one dtype
byte, little-endian uint64 row/column counts, row-major float64 payload)
that round-trips bitwise; ``.csv`` paths fall back to plain
comma-separated text. Video frames are binary 8-bit PGM (P5); a frame
directory maps to a matrix with one vectorized frame per column.
"""

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"RPCAMAT1"
_DTYPE_F64 = 0x01
_HEADER_LEN = 8 + 1 + 8 + 8


class FormatError(Exception):
    """A file violated an on-disk format contract."""


@dataclass(frozen=True)
class VideoMatrixMeta:
    """Frame geometry needed to fold matrix columns back into frames."""

    frame_height: int
    frame_width: int
    frame_count: int


def _validated(m, context):
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.size == 0:
        raise FormatError(f"{context}: matrix must be 2-D and non-empty, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise FormatError(f"{context}: matrix contains non-finite entries")
    return m


def write_matrix(m, path):
    """Write a matrix; binary container by default, text for .csv paths."""
    path = Path(path)
    m = _validated(m, str(path))
    if path.suffix == ".csv":
        np.savetxt(path, m, delimiter=",", fmt="%.17g")
        return
    header = MAGIC + bytes([_DTYPE_F64]) + struct.pack("<QQ", *m.shape)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(m, dtype="<f8").tobytes())


def read_matrix(path):
    """Read a matrix written by write_matrix; errors carry byte offsets."""
    path = Path(path)
    if path.suffix == ".csv":
        try:
            m = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
        except ValueError as exc:
            raise FormatError(f"{path}: bad CSV matrix: {exc}") from exc
        return _validated(m, str(path))
    data = path.read_bytes()
    if len(data) < 8 or data[:8] != MAGIC:
        raise FormatError(f"{path}: bad magic at byte 0, expected {MAGIC.decode()}")
    if len(data) < 9 or data[8] != _DTYPE_F64:
        got = f"0x{data[8]:02x}" if len(data) > 8 else "missing"
        raise FormatError(f"{path}: unsupported dtype byte at byte 8: {got}")
    if len(data) < _HEADER_LEN:
        raise FormatError(
            f"{path}: truncated header, expected {_HEADER_LEN} bytes, got {len(data)}"
        )
    rows, cols = struct.unpack_from("<QQ", data, 9)
    if rows == 0 or cols == 0:
        raise FormatError(f"{path}: empty matrix ({rows}x{cols}) at byte 9")
    expected = rows * cols * 8
    actual = len(data) - _HEADER_LEN
    if actual != expected:
        raise FormatError(
            f"{path}: payload at byte {_HEADER_LEN}: expected {expected} bytes, got {actual}"
        )
    m = np.frombuffer(data, dtype="<f8", offset=_HEADER_LEN).reshape(rows, cols).copy()
    return _validated(m, str(path))


def _pgm_token(data, pos, path):
    """Next whitespace-delimited header token, skipping # comments."""
    while pos < len(data):
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    if pos >= len(data):
        raise FormatError(f"{path}: truncated PGM header at byte {pos}")
    start = pos
    while pos < len(data) and not data[pos : pos + 1].isspace():
        pos += 1
    return data[start:pos], pos


def read_pgm(path):
    """Read a binary 8-bit PGM into a uint8 height x width array."""
    path = Path(path)
    data = path.read_bytes()
    if data[:2] != b"P5":
        raise FormatError(f"{path}: not a binary PGM (P5) file")
    pos = 2
    fields = []
    for _ in range(3):
        token, pos = _pgm_token(data, pos, path)
        try:
            fields.append(int(token))
        except ValueError:
            raise FormatError(f"{path}: bad PGM header token {token!r}") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise FormatError(f"{path}: bad PGM dimensions {width}x{height}")
    if not 0 < maxval < 256:
        raise FormatError(f"{path}: only 8-bit PGM supported, maxval={maxval}")
    pos += 1  # single whitespace byte after maxval
    expected = width * height
    payload = data[pos : pos + expected]
    if len(payload) != expected:
        raise FormatError(
            f"{path}: truncated PGM payload at byte {pos}: expected {expected} bytes, "
            f"got {len(payload)}"
        )
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(frame, path):
    """Write a uint8 height x width array as binary PGM."""
    frame = np.asarray(frame)
    if frame.ndim != 2 or frame.dtype != np.uint8:
        raise ValueError(f"frame must be a 2-D uint8 array, got {frame.dtype} {frame.shape}")
    height, width = frame.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(frame).tobytes())


def video_to_matrix(frame_dir):
    """Stack the PGM frames of a directory as matrix columns.

    Frames are taken in lexicographic filename order; column j is frame j
    flattened in row-major pixel order, as float64 in [0, 255].
    """
    frame_dir = Path(frame_dir)
    files = sorted(frame_dir.glob("*.pgm"))
    if not files:
        raise FormatError(f"{frame_dir}: no PGM frames found")
    first = read_pgm(files[0])
    height, width = first.shape
    m = np.empty((height * width, len(files)))
    m[:, 0] = first.reshape(-1)
    for j, f in enumerate(files[1:], start=1):
        frame = read_pgm(f)
        if frame.shape != (height, width):
            raise FormatError(
                f"{f}: frame size {frame.shape[0]}x{frame.shape[1]} does not match "
                f"first frame {height}x{width}"
            )
        m[:, j] = frame.reshape(-1)
    return m, VideoMatrixMeta(height, width, len(files))


def matrix_to_frames(m, meta, out_dir):
    """Write each matrix column as a PGM frame, clamped and rounded.

    Values are clipped to [0, 255] then rounded half-to-even. Files are
    named frame_00000.pgm onward; returns the written paths.
    """
    m = np.asarray(m, dtype=np.float64)
    pixels = meta.frame_height * meta.frame_width
    if m.ndim != 2 or m.shape[0] != pixels:
        raise ValueError(
            f"matrix with {m.shape[0] if m.ndim == 2 else '?'} rows cannot hold "
            f"{meta.frame_height}x{meta.frame_width} frames"
        )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for j in range(m.shape[1]):
        frame = np.rint(np.clip(m[:, j], 0.0, 255.0)).astype(np.uint8)
        path = out_dir / f"frame_{j:05d}.pgm"
        write_pgm(frame.reshape(meta.frame_height, meta.frame_width), path)
        paths.append(path)
    return paths
