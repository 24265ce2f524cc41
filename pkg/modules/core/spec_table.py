"""
Mutation Specification Table Module
Loads library call effects (pure / receiver / arg:<i,...>) from TSV tables
and holds the method-name heuristics used for unresolved method calls
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from ..utils.error_handler import ValidationError

logger = logging.getLogger(__name__)

DEFAULT_TABLE_DIR = Path(__file__).resolve().parent.parent / "data" / "spec_tables"
DEFAULT_HEURISTIC_MUTATORS = frozenset({"append", "extend", "insert", "remove", "pop", "clear", "sort", "reverse"})
DEFAULT_HEURISTIC_PURE = frozenset({"keys", "values", "items", "copy", "get"})
BUILTINS_LIBRARY = "builtins"


class EffectKind(str, Enum):
    PURE = "pure"
    RECEIVER = "receiver"
    ARGS = "arg"


@dataclass(frozen=True)
class SpecEffect:
    """Effect of one library callable; ``arg_indices`` are 0-based positions"""
    kind: EffectKind
    arg_indices: Tuple[int, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "SpecEffect":
        text = text.strip()
        if text == EffectKind.PURE.value:
            return cls(EffectKind.PURE)
        if text == EffectKind.RECEIVER.value:
            return cls(EffectKind.RECEIVER)
        if text.startswith("arg:"):
            try:
                indices = tuple(sorted({int(part) for part in text[4:].split(",") if part.strip()}))
            except ValueError:
                raise ValueError(f"Bad argument index list: {text!r}")
            if not indices or min(indices) < 0:
                raise ValueError(f"Argument effect needs non-negative indices: {text!r}")
            return cls(EffectKind.ARGS, indices)
        raise ValueError(f"Unknown effect {text!r} (expected pure, receiver or arg:<i,...>)")

    def __str__(self) -> str:
        if self.kind == EffectKind.ARGS:
            return "arg:" + ",".join(str(i) for i in self.arg_indices)
        return self.kind.value


@dataclass(frozen=True)
class MutationSpecTable:
    """Read-only after load; safe to share between worker processes"""
    entries: Dict[Tuple[str, str], SpecEffect] = field(default_factory=dict)
    heuristic_mutators: FrozenSet[str] = DEFAULT_HEURISTIC_MUTATORS
    heuristic_pure: FrozenSet[str] = DEFAULT_HEURISTIC_PURE

    def __post_init__(self):
        overlap = self.heuristic_mutators & self.heuristic_pure
        if overlap:
            raise ValidationError(f"Heuristic name sets overlap: {sorted(overlap)}", field="heuristics")

    @property
    def libraries(self) -> FrozenSet[str]:
        return frozenset(library for library, _ in self.entries)

    def lookup(self, library: str, callable_name: str) -> Optional[SpecEffect]:
        return self.entries.get((library, callable_name))

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def load(cls,
             table_files: Sequence[str] = (),
             use_defaults: bool = True,
             heuristic_mutators: Optional[Iterable[str]] = None,
             heuristic_pure: Optional[Iterable[str]] = None) -> "MutationSpecTable":
        """
        Build a table from the shipped defaults and extra TSV files

        Args:
            table_files: Extra tables; later entries override earlier ones
            use_defaults: Load the tables under modules/data/spec_tables first
            heuristic_mutators: Method names treated as mutating the receiver
            heuristic_pure: Method names treated as pure

        Raises:
            ValidationError: Unreadable table or malformed record
        """
        paths: List[Path] = list(default_table_paths()) if use_defaults else []
        paths.extend(Path(p) for p in table_files)

        entries: Dict[Tuple[str, str], SpecEffect] = {}
        for path in paths:
            try:
                with open(path, "r", encoding="utf-8") as f:
                    entries.update(parse_table_lines(f, source=str(path)))
            except OSError as e:
                raise ValidationError(f"Cannot read spec table {path}: {e}", field="spec_tables", value=str(path))

        logger.debug(f"Loaded {len(entries)} spec table entries from {len(paths)} files")
        return cls(
            entries=entries,
            heuristic_mutators=frozenset(DEFAULT_HEURISTIC_MUTATORS if heuristic_mutators is None else heuristic_mutators),
            heuristic_pure=frozenset(DEFAULT_HEURISTIC_PURE if heuristic_pure is None else heuristic_pure),
        )


def default_table_paths() -> List[Path]:
    return sorted(DEFAULT_TABLE_DIR.glob("*.tsv"))


def parse_table_lines(lines: Iterable[str], source: str = "<table>") -> Dict[Tuple[str, str], SpecEffect]:
    """
    Parse ``library<TAB>callable<TAB>effect`` records; '#' lines and blank
    lines are ignored

    Raises:
        ValidationError: Record with the wrong field count or an unknown effect
    """
    entries: Dict[Tuple[str, str], SpecEffect] = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValidationError(f"{source}:{number}: expected 3 tab-separated fields, got {len(fields)}",
                                  field="spec_tables", value=line)
        library, callable_name, effect_text = (f.strip() for f in fields)
        if not library or not callable_name:
            raise ValidationError(f"{source}:{number}: empty library or callable", field="spec_tables", value=line)
        try:
            entries[(library, callable_name)] = SpecEffect.parse(effect_text)
        except ValueError as e:
            raise ValidationError(f"{source}:{number}: {e}", field="spec_tables", value=line)
    return entries
