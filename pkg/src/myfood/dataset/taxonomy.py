from __future__ import annotations

from dataclasses import dataclass

from ..errors import MyfoodError


class TaxonomyError(MyfoodError):
    """A class name or id does not belong to the taxonomy."""


BACKGROUND_NAME = "background"

# The nine food classes the default deployment recognizes, in id order 1..9.
DEFAULT_FOOD_NAMES = (
    "rice",
    "beans",
    "boiled egg",
    "fried egg",
    "pasta",
    "salad",
    "roasted meat",
    "apple",
    "chicken breast",
)


@dataclass(frozen=True)
class ClassTaxonomy:
    """Ordered class-id table shared by annotations, masks, metrics and nutrition.

    Id 0 is always the background; food classes occupy the contiguous range
    1..K. Names are unique and non-empty.
    """

    entries: tuple[tuple[int, str], ...]
    background_id: int = 0

    def __post_init__(self):
        if len(self.entries) < 2:
            raise TaxonomyError("taxonomy needs background plus at least one food class")
        ids = [cid for cid, _ in self.entries]
        names = [name for _, name in self.entries]
        if self.background_id != 0 or ids[0] != 0:
            raise TaxonomyError("background id must be 0 and listed first")
        if ids != list(range(len(ids))):
            raise TaxonomyError(f"class ids must be contiguous 0..K, got {ids}")
        if any(not name for name in names):
            raise TaxonomyError("class names must be non-empty")
        if len(set(names)) != len(names):
            raise TaxonomyError("class names must be unique")

    @property
    def food_ids(self) -> tuple[int, ...]:
        return tuple(cid for cid, _ in self.entries if cid != self.background_id)

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(cid for cid, _ in self.entries)

    def name_of(self, class_id: int) -> str:
        for cid, name in self.entries:
            if cid == class_id:
                return name
        raise TaxonomyError(f"unknown class id {class_id}")

    def id_of(self, name: str) -> int:
        for cid, entry_name in self.entries:
            if entry_name == name:
                return cid
        raise TaxonomyError(f"unknown class name {name!r}")

    def __contains__(self, class_id: int) -> bool:
        return 0 <= class_id < len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def taxonomy_from_names(food_names=DEFAULT_FOOD_NAMES) -> ClassTaxonomy:
    """Build a taxonomy from food names, assigning ids 1..K after background."""
    entries = [(0, BACKGROUND_NAME)]
    entries += [(i + 1, name) for i, name in enumerate(food_names)]
    return ClassTaxonomy(entries=tuple(entries))


def default_taxonomy() -> ClassTaxonomy:
    return taxonomy_from_names()


def write_taxonomy(taxonomy: ClassTaxonomy, path) -> None:
    """Write one `id<TAB>name` line per class."""
    with open(path, "w", encoding="utf-8") as fh:
        for cid, name in taxonomy.entries:
            fh.write(f"{cid}\t{name}\n")


def read_taxonomy(path) -> ClassTaxonomy:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            cid, _, name = line.partition("\t")
            entries.append((int(cid), name))
    return ClassTaxonomy(entries=tuple(entries))
