"""Version graphs and the create/delete presence semantics.

Version sets are handled internally as integer bitmasks over the versions
in topological order. An element with creation versions CV and deletion
versions DV is present in version t iff some c in CV reaches t and no d in
DV lies on a path from c to t (c ->* d ->* t).
"""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping, Optional, Sequence

from .errors import HistoryError

VersionId = Hashable


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class VersionGraph:
    """A DAG of versions with a unique initial version reaching all others."""

    def __init__(self, parents: Mapping[VersionId, Sequence[VersionId]], initial: Optional[VersionId] = None):
        parents = {v: tuple(ps) for v, ps in parents.items()}
        for v, ps in parents.items():
            for p in ps:
                if p not in parents:
                    raise HistoryError(f"version {v!r} has unknown parent {p!r}")
            if len(set(ps)) != len(ps):
                raise HistoryError(f"version {v!r} lists a parent twice")
        if not parents:
            raise HistoryError("a version graph needs at least one version")
        roots = [v for v, ps in parents.items() if not ps]
        if len(roots) != 1:
            raise HistoryError(f"expected exactly one initial version, found {len(roots)}: {roots!r}")
        if initial is not None and roots[0] != initial:
            raise HistoryError(f"declared initial version {initial!r} has parents")
        self.initial = roots[0]

        children: dict = {v: [] for v in parents}
        for v, ps in parents.items():
            for p in ps:
                children[p].append(v)
        # Kahn's algorithm; ties broken by declaration order
        indeg = {v: len(ps) for v, ps in parents.items()}
        order = []
        ready = [v for v in parents if indeg[v] == 0]
        while ready:
            v = ready.pop(0)
            order.append(v)
            for c in children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        if len(order) != len(parents):
            cyclic = sorted((str(v) for v, d in indeg.items() if d > 0))
            raise HistoryError(f"version graph contains a cycle through {cyclic}")

        self.versions: tuple = tuple(order)
        self.index = {v: i for i, v in enumerate(order)}
        self.parents = parents
        self.children = {v: tuple(cs) for v, cs in children.items()}
        n = len(order)
        self.all_mask = (1 << n) - 1
        anc = [0] * n
        for v in order:
            i = self.index[v]
            m = 1 << i
            for p in parents[v]:
                m |= anc[self.index[p]]
            anc[i] = m
        desc = [0] * n
        for v in reversed(order):
            i = self.index[v]
            m = 1 << i
            for c in children[v]:
                m |= desc[self.index[c]]
            desc[i] = m
        self.anc_mask = anc
        self.desc_mask = desc
        self._presence_cache: dict = {}
        self._encode_cache: dict = {}

    def __len__(self):
        return len(self.versions)

    def __contains__(self, v):
        return v in self.index

    def __eq__(self, other):
        if not isinstance(other, VersionGraph):
            return NotImplemented
        return self.parents == other.parents

    __hash__ = None

    @property
    def suc(self) -> frozenset:
        return frozenset((p, v) for v, ps in self.parents.items() for p in ps)

    def reaches(self, a: VersionId, b: VersionId) -> bool:
        return bool(self.desc_mask[self.index[a]] >> self.index[b] & 1)

    def mask(self, versions: Iterable[VersionId]) -> int:
        m = 0
        for v in versions:
            try:
                m |= 1 << self.index[v]
            except KeyError:
                raise HistoryError(f"unknown version {v!r}") from None
        return m

    def bit(self, v: VersionId) -> int:
        try:
            return 1 << self.index[v]
        except KeyError:
            raise HistoryError(f"unknown version {v!r}") from None

    def versions_of(self, mask: int) -> frozenset:
        return frozenset(self.versions[i] for i in _bits(mask))

    def ordered(self, mask: int) -> list:
        return [self.versions[i] for i in _bits(mask)]

    def presence(self, cv: int, dv: int) -> int:
        """Versions in which an element with creation set ``cv`` and
        deletion set ``dv`` is present."""
        key = (cv, dv)
        hit = self._presence_cache.get(key)
        if hit is not None:
            return hit
        desc = self.desc_mask
        p = 0
        for c in _bits(cv):
            reach = desc[c]
            killed = 0
            for d in _bits(dv & reach):
                killed |= desc[d]
            p |= reach & ~killed
        self._presence_cache[key] = p
        return p

    def encode(self, present: int) -> tuple[int, int]:
        """Creation/deletion sets realising exactly ``present``.

        Versions are visited in topological order; a creation link is added
        where the element is present but not inherited, a deletion link where
        it is absent but would be inherited. Only ancestors influence a
        version, so earlier decisions stay valid.
        """
        hit = self._encode_cache.get(present)
        if hit is not None:
            return hit
        desc, anc = self.desc_mask, self.anc_mask
        cv = dv = 0
        for i in range(len(self.versions)):
            a = anc[i]
            inherited = False
            for c in _bits(cv & a):
                if not dv & desc[c] & a:
                    inherited = True
                    break
            want = bool(present >> i & 1)
            if want and not inherited:
                cv |= 1 << i
            elif inherited and not want:
                dv |= 1 << i
        self._encode_cache[present] = (cv, dv)
        return cv, dv
