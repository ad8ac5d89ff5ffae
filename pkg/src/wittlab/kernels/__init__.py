"""Kernel dispatch: compiled extension when available, pure Python otherwise.

Set WITTLAB_PURE=1 to force the pure implementation (used by the benchmark
and by tests that compare the two).
"""

import os

if os.environ.get("WITTLAB_PURE"):
    from wittlab.kernels import pure as _impl
else:
    try:
        from wittlab.kernels import _speed as _impl  # type: ignore[no-redef]
    except ImportError:
        from wittlab.kernels import pure as _impl

from wittlab.kernels import pure as _pure

IMPLEMENTATION = _impl.IMPLEMENTATION

howell_aug = _impl.howell_aug
reduce_vec = _impl.reduce_vec


def snf_divisors(A):
    """Elementary divisors; compiled fast path with big-integer fallback."""
    try:
        return _impl.snf_divisors(A)
    except OverflowError:
        return _pure.snf_divisors(A)


def implementations():
    """All importable kernel implementations, for benchmarks and tests."""
    impls = {"pure": _pure}
    try:
        from wittlab.kernels import _speed

        impls["speed"] = _speed
    except ImportError:
        pass
    return impls
