"""Disjoint-set union with union by rank and path compression."""


class DisjointSetUnion:
    """Tracks a partition of ``0..n-1`` into mergeable groups.

    ``link`` merges by rank and tells the caller whether the number of
    groups actually decreased; ``find`` compresses paths, so a long chain
    of operations runs in near-constant amortized time per call.
    """

    def __init__(self, n):
        n = int(n)
        if n < 0:
            raise ValueError("size must be non-negative")
        self.parent = list(range(n))
        self.rank = [0] * n
        self.groups = n

    def __len__(self):
        return len(self.parent)

    def _check(self, x):
        if not (0 <= x < len(self.parent)):
            raise IndexError(f"element {x} out of range")

    def find(self, x) -> int:
        self._check(x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def same(self, x, y) -> bool:
        return self.find(x) == self.find(y)

    def link(self, x, y) -> bool:
        """Merge the groups of ``x`` and ``y``; True if they were distinct."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        if self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1
        self.groups -= 1
        return True

    def component_sizes(self) -> dict:
        """Mapping of representative -> member count."""
        sizes = {}
        for x in range(len(self.parent)):
            r = self.find(x)
            sizes[r] = sizes.get(r, 0) + 1
        return sizes
