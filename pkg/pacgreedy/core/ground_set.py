import operator
from typing import Iterable, Iterator, List, Optional, FrozenSet

from ..messages import ParameterError, ElementRangeError, DuplicateElementError

#===============================================================================
class GroundSet:
    """
    Finite ground set of elements identified by ids ``0 .. n-1``
    """
    def __init__(self, n: int):
        if n < 1:
            raise ParameterError("Ground set needs at least one element, got n=%d" % n)
        self.n = n

    def __repr__(self) -> str:
        return "<%s n=%d>" % (self.__class__.__qualname__, self.n)

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.n))

    def __contains__(self, i: object) -> bool:
        try:
            i = operator.index(i) # type: ignore
        except TypeError:
            return False
        return 0 <= i < self.n

    def check_element(self, i: int) -> None:
        if i not in self:
            raise ElementRangeError("Element %r is outside the ground set 0..%d" % (i, self.n - 1))

    def remaining(self, A: 'Subset') -> List[int]:
        """
        Elements of the ground set that are not in ``A``, in ascending id order
        """
        return [i for i in range(self.n) if i not in A]

#===============================================================================
class Subset:
    """
    Ordered subset of distinct element ids.

    Insertion order is preserved so that the selection order of a maximizer
    can be read back from the result.
    """
    def __init__(self, ids: Iterable[int]=(), k_limit: Optional[int]=None):
        self._ids = [] # type: List[int]
        self._members = set() # type: set

        #: Maximum cardinality, or None if unconstrained
        self.k_limit = k_limit

        for i in ids:
            self._append(i)

    def _append(self, i: int) -> None:
        i = operator.index(i)
        if i < 0:
            raise ElementRangeError("Element id must be non-negative, got %d" % i)
        if i in self._members:
            raise DuplicateElementError("Element %d is already in the subset" % i)
        if (self.k_limit is not None) and (len(self._ids) >= self.k_limit):
            raise ParameterError("Subset is limited to %d elements" % self.k_limit)
        self._ids.append(i)
        self._members.add(i)

    def added(self, i: int) -> 'Subset':
        """
        Returns a new subset with ``i`` appended
        """
        result = Subset(self._ids, self.k_limit)
        result._append(i)
        return result

    @property
    def ids(self) -> List[int]:
        """
        Element ids in insertion order
        """
        return list(self._ids)

    @property
    def key(self) -> FrozenSet[int]:
        """
        Order-independent key used to cache per-subset state
        """
        return frozenset(self._members)

    def __len__(self) -> int:
        return len(self._ids)

    def __iter__(self) -> Iterator[int]:
        return iter(self._ids)

    def __contains__(self, i: object) -> bool:
        return i in self._members

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Subset):
            return self._ids == other._ids
        if isinstance(other, (list, tuple)):
            return self._ids == list(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self._ids))

    def __repr__(self) -> str:
        return "Subset(%r)" % self._ids
