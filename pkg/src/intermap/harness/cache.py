"""Binary matrix cache.

Layout (little-endian): magic ``IQMP``, version u16, n_q u8, variant u8,
alpha flag u8 (0 rational, 1 real) followed by either ``a, b`` as two u64 or
the float64 value padded with 8 zero bytes, seed u64, realization u64, then
``N*N`` complex entries row-major as float64 pairs.
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path

import numpy as np

from ..core import Alpha, MapSpec, VARIANTS
from ..map_operator import MOMENTUM, to_position

log = logging.getLogger(__name__)

MAGIC = b"IQMP"
VERSION = 1
_HEAD = struct.Struct("<4sHBBB16sQQ")


class CacheError(ValueError):
    pass


def encode_header(spec: MapSpec) -> bytes:
    if spec.alpha.is_rational:
        if spec.alpha.a < 0:
            raise CacheError("negative numerators are not representable; use a/b with a >= 0")
        flag, payload = 0, struct.pack("<QQ", spec.alpha.a, spec.alpha.b)
    else:
        flag, payload = 1, struct.pack("<dQ", spec.alpha.real, 0)
    return _HEAD.pack(MAGIC, VERSION, spec.n_q, VARIANTS.index(spec.variant), flag, payload, spec.seed, spec.realization)


def decode_header(data: bytes) -> dict:
    if len(data) < _HEAD.size:
        raise CacheError("truncated header")
    magic, version, n_q, variant, flag, payload, seed, realization = _HEAD.unpack_from(data)
    if magic != MAGIC:
        raise CacheError(f"bad magic {magic!r}")
    if version != VERSION:
        raise CacheError(f"unsupported cache version {version}")
    if variant >= len(VARIANTS) or flag > 1:
        raise CacheError("corrupt header fields")
    if flag == 0:
        a, b = struct.unpack("<QQ", payload)
        alpha = Alpha.rational(a, b)
    else:
        alpha = Alpha.from_float(struct.unpack("<dQ", payload)[0])
    return {"n_q": n_q, "variant": VARIANTS[variant], "alpha": alpha, "seed": seed, "realization": realization}


def write_matrix(path, spec: MapSpec, U: np.ndarray) -> Path:
    path = Path(path)
    N = spec.N
    if U.shape != (N, N):
        raise ValueError(f"matrix shape {U.shape} does not match N={N}")
    body = np.ascontiguousarray(U, dtype="<c16").tobytes()
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_bytes(encode_header(spec) + body)
    tmp.replace(path)
    return path


def load_matrix(path) -> np.ndarray:
    data = Path(path).read_bytes()
    head = decode_header(data)
    N = 2 ** head["n_q"]
    body = data[_HEAD.size :]
    if len(body) != 16 * N * N:
        raise CacheError(f"payload has {len(body)} bytes, expected {16 * N * N}")
    return np.frombuffer(body, dtype="<c16").reshape(N, N).astype(complex)


def cache_path(spec: MapSpec, cache_dir) -> Path:
    return Path(cache_dir) / f"{spec.digest()}.iqmp"


def cache_matrix(spec: MapSpec, cache_dir) -> Path:
    """Momentum-space matrix for ``spec`` on disk, built only on a miss."""
    from ..isrm import realize

    path = cache_path(spec, cache_dir)
    if path.exists():
        log.info("cache hit %s", path.name)
        return path
    log.info("cache miss %s", path.name)
    return write_matrix(path, spec, realize(spec, MOMENTUM))


def get_matrix(spec: MapSpec, rep: str = MOMENTUM, cache_dir=None) -> np.ndarray:
    from ..isrm import realize

    if cache_dir is None:
        return realize(spec, rep)
    U = load_matrix(cache_matrix(spec, cache_dir))
    return U if rep == MOMENTUM else to_position(U)
