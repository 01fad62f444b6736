"""Small helpers shared across the package."""


def ekey(x):
    """Canonical sort key for carrier elements.

    Elements are built from strings, ints, tuples and frozensets; a plain
    `sorted()` over mixed types would raise, so everything is flattened to a
    string that is stable across runs.
    """
    if isinstance(x, str):
        return "s:" + x
    if isinstance(x, bool):
        return "b:" + str(x)
    if isinstance(x, int):
        return "i:%020d" % (x + 10**18)
    if isinstance(x, tuple):
        return "t:(" + ",".join(ekey(v) for v in x) + ")"
    if isinstance(x, frozenset):
        return "f:{" + ",".join(sorted(ekey(v) for v in x)) + "}"
    return "r:" + repr(x)


def esort(xs):
    return tuple(sorted(xs, key=ekey))


def mapping_key(m):
    """Canonical hashable form of a dict keyed/valued by carrier elements."""
    return tuple(sorted(((k, v) for k, v in m.items()),
                        key=lambda kv: ekey(kv[0])))
