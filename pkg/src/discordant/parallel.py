"""Order-preserving map over worker processes, capped by ``DISCORDANT_THREADS``."""
import os
from concurrent.futures import ProcessPoolExecutor

from .errors import ValidationError

ENV_VAR = "DISCORDANT_THREADS"


def worker_count(env=None):
    """Number of workers allowed by ``DISCORDANT_THREADS`` (default 1)."""
    env = os.environ if env is None else env
    raw = env.get(ENV_VAR, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError("threads", f"{ENV_VAR} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValidationError("threads", f"{ENV_VAR} must be a positive integer, got {raw!r}")
    return n


def ordered_map(fn, items, workers=None):
    """``list(map(fn, items))``, spread over processes when more than one worker is allowed.

    Results come back in input order, so output does not depend on the worker count.
    ``fn`` must be picklable (a module-level function or a ``functools.partial`` of one).
    """
    items = list(items)
    n = worker_count() if workers is None else workers
    if n <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * n))))
