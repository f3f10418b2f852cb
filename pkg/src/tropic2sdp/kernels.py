"""Kernel selection: compiled extension if available, pure Python otherwise.

Set ``TROPIC2SDP_PURE=1`` to force the pure path.  The compiled kernel
works on int64 and raises OverflowError on large intermediates; wrappers
here transparently retry on the pure bigint path, so results never depend
on which kernel is active.
"""

from __future__ import annotations

import os

from . import _psd_pure

_impl = _psd_pure
if not os.environ.get("TROPIC2SDP_PURE"):
    try:
        from . import _psd_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        pass

ACTIVE_IMPL: str = _impl.IMPL


def psd_int(entries, dim: int) -> bool:
    try:
        return _impl.psd_int(entries, dim)
    except OverflowError:
        return _psd_pure.psd_int(entries, dim)


def psd_int_many(mats, dim: int) -> list[bool]:
    try:
        return _impl.psd_int_many(mats, dim)
    except OverflowError:
        return _psd_pure.psd_int_many(mats, dim)
