"""Counter-based normal streams.

Stream ``philox4x64-ndtri-v1``: the 64-bit words of Philox-4x64-10 keyed by
``(seed, stream)`` with counter starting at zero are turned into uniforms
``u = ((w >> 11) + 0.5) / 2**53`` in (0, 1) and then into standard normals by
inversion, ``z = ndtri(u)``. Every value therefore depends only on
``(seed, stream, position)``, so any replicate can be regenerated on its own.
"""

import numpy as np
from scipy.special import ndtri

STREAM_NAME = "philox4x64-ndtri-v1"

_MASK64 = (1 << 64) - 1


def _key(seed: int, stream: int) -> np.ndarray:
    return np.array([int(seed) & _MASK64, int(stream) & _MASK64], dtype=np.uint64)


def uniforms(seed: int, stream: int, size: int) -> np.ndarray:
    bitgen = np.random.Philox(key=_key(seed, stream))
    words = bitgen.random_raw(size).astype(np.uint64)
    return ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


def normals(seed: int, stream: int, size: int) -> np.ndarray:
    """``size`` standard normal variates of stream ``stream``."""
    return ndtri(uniforms(seed, stream, size))


def complex_normals(seed: int, stream: int, shape) -> np.ndarray:
    """Complex array whose real and imaginary parts are independent N(0, 1).

    The real parts are the first ``prod(shape)`` values of the stream, the
    imaginary parts the next ``prod(shape)``, both in C order.
    """
    n = int(np.prod(shape))
    z = normals(seed, stream, 2 * n)
    return (z[:n] + 1j * z[n:]).reshape(shape)
