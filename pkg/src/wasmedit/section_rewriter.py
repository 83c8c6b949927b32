"""Fine-grained section editing: select / insert / delete / update.

select() matches elements of one section against a wildcard template and
returns a Selection.  Mutating calls go through the selection, bump the
module's edit counter (making older selections stale), and finish by
running the index fixer on the touched section, so element identity
indices are always continuous afterwards.

The fixer returns the index-space shifts (RewriteDelta list) implied by
the structural change.  Deltas describe what happens to *references*:
feeding them to the semantics layer's reference fixer rewrites call
immediates, export targets and the like.  The section layer itself never
touches references; deleting a still-referenced element simply leaves a
dangling reference for the validator to report.

Elements freshly inserted by hand may carry idx None or -1; the fixer
assigns their real index.  The fixer assumes surviving elements keep
their relative order (insert/delete can't reorder); hand-reordered
sections are renumbered without emitting shifts.
"""

from .errors import (
    FieldError,
    ImmutableFieldError,
    StaleSelectionError,
    StructureError,
)
from .model import (
    IDENTITY_FIELDS,
    SECTION_INFO,
    IndexSpace,
    MemoryElement,
    Module,
    RewriteDelta,
    SectionKind,
    StartElement,
    TableElement,
    Template,
)
from .parser import renumber_identity

__all__ = [
    "FieldRef",
    "RewriteDelta",
    "Selection",
    "Template",
    "delete",
    "fix_section_indices",
    "insert",
    "select",
    "update",
]

_PAGE = 65536

# delta space implied by each section's identity indices
_IDX_SPACE = {
    SectionKind.TYPE: IndexSpace.TYPE,
    SectionKind.IMPORT: IndexSpace.FUNC,
    SectionKind.FUNC: IndexSpace.FUNC,
    SectionKind.CODE: IndexSpace.FUNC,
    SectionKind.GLOBAL: IndexSpace.GLOBAL,
    SectionKind.ELEM: IndexSpace.ELEM,
    SectionKind.DATA: IndexSpace.DATA,
}


def _section_list(module: Module, kind: SectionKind) -> list:
    if kind == SectionKind.START:
        return [module.start_sec] if module.start_sec is not None else []
    return getattr(module, SECTION_INFO[kind].attr)


class Selection:
    """An ordered set of positions in one section of one module.

    Attribute access yields a FieldRef for update(), so slot names stay
    private to avoid shadowing element fields (e.g. an import's
    ``module``).  Use positions() / elements() to look inside.
    """

    __slots__ = ("_module", "_kind", "_positions", "_stamp")

    def __init__(self, module: Module, kind: SectionKind, positions: tuple[int, ...]):
        self._module = module
        self._kind = kind
        self._positions = positions
        self._stamp = module._edit_count

    def _check_fresh(self) -> None:
        if self._stamp != self._module._edit_count:
            raise StaleSelectionError(
                "selection made before the module was last edited; select again"
            )

    def positions(self) -> tuple[int, ...]:
        return self._positions

    def elements(self) -> list:
        self._check_fresh()
        section = _section_list(self._module, self._kind)
        return [section[p] for p in self._positions]

    def __len__(self) -> int:
        return len(self._positions)

    def __bool__(self) -> bool:
        return bool(self._positions)

    def __iter__(self):
        return iter(self.elements())

    def __getitem__(self, item) -> "Selection":
        picked = self._positions[item]
        if isinstance(item, int):
            picked = (picked,)
        sub = Selection(self._module, self._kind, tuple(picked))
        sub._stamp = self._stamp
        return sub

    def __getattr__(self, name: str) -> "FieldRef":
        if name.startswith("_"):
            raise AttributeError(name)
        cls = SECTION_INFO[self._kind].element_cls
        if name not in cls.__dataclass_fields__:
            raise FieldError(f"{cls.__name__} has no field {name!r}")
        return FieldRef(self, name)

    def __repr__(self):
        return (f"Selection({self._kind.name.lower()}, "
                f"positions={list(self._positions)})")


class FieldRef:
    """One field across every element of a selection."""

    __slots__ = ("selection", "field_name")

    def __init__(self, selection: Selection, field_name: str):
        self.selection = selection
        self.field_name = field_name

    def values(self) -> list:
        return [getattr(e, self.field_name) for e in self.selection.elements()]

    @property
    def value(self):
        values = self.values()
        if len(values) != 1:
            raise StructureError(
                f".value needs exactly one selected element, have {len(values)}"
            )
        return values[0]

    def __repr__(self):
        return f"FieldRef({self.selection!r}.{self.field_name})"


def select(module: Module, template: Template) -> Selection:
    """All elements of the template's section matching its patterns."""
    section = _section_list(module, template.kind)
    positions = tuple(
        pos for pos, elem in enumerate(section) if template.matches(elem)
    )
    return Selection(module, template.kind, positions)


def insert(selection: Selection, element) -> bool:
    """Insert ``element`` directly after the last selected element."""
    selection._check_fresh()
    if not selection:
        return False
    module, kind = selection._module, selection._kind
    cls = SECTION_INFO[kind].element_cls
    if not isinstance(element, cls):
        raise TypeError(f"{kind.name.lower()} section holds {cls.__name__} elements")
    if kind == SectionKind.START:
        raise StructureError("a module has at most one start entry")
    section = _section_list(module, kind)
    section.insert(max(selection._positions) + 1, element)
    module.touch()
    fix_section_indices(module, kind)
    return True


def delete(selection: Selection) -> bool:
    """Remove every selected element."""
    selection._check_fresh()
    if not selection:
        return False
    module, kind = selection._module, selection._kind
    if kind == SectionKind.START:
        module.start_sec = None
    else:
        section = _section_list(module, kind)
        for pos in sorted(selection._positions, reverse=True):
            del section[pos]
    module.touch()
    fix_section_indices(module, kind)
    return True


def update(field_ref: FieldRef, value) -> bool:
    """Assign ``value`` to the referenced field of every selected element."""
    if not isinstance(field_ref, FieldRef):
        raise TypeError("update() takes a selection field reference, e.g. sel.results")
    selection = field_ref.selection
    selection._check_fresh()
    if not selection:
        return False
    cls = SECTION_INFO[selection._kind].element_cls
    if field_ref.field_name in IDENTITY_FIELDS.get(cls, ()):
        raise ImmutableFieldError(
            f"{cls.__name__}.{field_ref.field_name} is assigned by the index "
            "fixer and cannot be updated"
        )
    for element in selection.elements():
        setattr(element, field_ref.field_name, value)
    module, kind = selection._module, selection._kind
    module.touch()
    fix_section_indices(module, kind)
    return True


def _idx_base(module: Module, kind: SectionKind) -> int:
    if kind in (SectionKind.FUNC, SectionKind.CODE):
        return module.imported_function_count()
    if kind == SectionKind.GLOBAL:
        return module.imported_global_count()
    return 0


def _continuity_deltas(module: Module, kind: SectionKind) -> list[RewriteDelta]:
    info = SECTION_INFO[kind]
    space = _IDX_SPACE.get(kind)
    if info.idx_field is None or space is None:
        return []
    section = getattr(module, info.attr)
    if kind == SectionKind.IMPORT:
        elements = [e for e in section if e.kind == "func"]
        base = 0
    else:
        elements = section
        base = _idx_base(module, kind)

    olds = []
    for elem in elements:
        old = getattr(elem, info.idx_field)
        olds.append(None if old is None or old < 0 else old)

    known = [o for o in olds if o is not None]
    if any(b <= a for a, b in zip(known, known[1:])):
        return []  # hand-reordered: renumber only, shifts are undefined

    deltas: list[RewriteDelta] = []
    cum = 0
    cursor = base
    for old in olds:
        if old is None:
            deltas.append(RewriteDelta(space, cursor + cum, 1))
            cum += 1
            continue
        while old > cursor:
            deltas.append(RewriteDelta(space, cursor + cum, -1))
            cum -= 1
            cursor += 1
        cursor += 1
    # deletions at the tail leave no survivor to skip over them; the extent
    # recorded at the last renumber reveals how far old indices reached
    old_extent = module._index_extents.get(kind)
    if old_extent is not None:
        while cursor < base + old_extent:
            deltas.append(RewriteDelta(space, cursor + cum, -1))
            cum -= 1
            cursor += 1
    return deltas


def _repair_memory(module: Module) -> None:
    need = 0
    for seg in module.data_sec:
        offset = seg.offset.literal
        if isinstance(offset, int) and offset >= 0:
            need = max(need, -(-(offset + len(seg.init)) // _PAGE))
    if need == 0:
        return
    for imp in module.import_sec:
        if imp.kind == "mem":
            minimum, maximum = imp.desc
            if minimum < need:
                if maximum is not None and maximum < need:
                    maximum = need
                imp.desc = (need, maximum)
            return
    if not module.mem_sec:
        module.mem_sec.append(MemoryElement(need, None))
        return
    mem = module.mem_sec[0]
    if mem.min < need:
        mem.min = need
    if mem.max is not None and mem.max < mem.min:
        mem.max = mem.min


def _repair_table(module: Module) -> None:
    need = 0
    for elem in module.elem_sec:
        offset = elem.offset.literal
        if isinstance(offset, int) and offset >= 0:
            need = max(need, offset + len(elem.func_idxs))
    if need == 0:
        return
    for imp in module.import_sec:
        if imp.kind == "table":
            _, minimum, maximum = imp.desc
            if minimum < need:
                if maximum is not None and maximum < need:
                    maximum = need
                imp.desc = ("funcref", need, maximum)
            return
    if not module.table_sec:
        module.table_sec.append(TableElement(need, need))
        return
    table = module.table_sec[0]
    if table.min < need:
        table.min = need
    if table.max is not None and table.max < table.min:
        table.max = table.min


def fix_section_indices(module: Module, kind: SectionKind) -> list[RewriteDelta]:
    """Restore identity-index continuity for ``kind``; idempotent.

    Returns the index-space shifts implied by the change ([] when nothing
    moved).  Also performs context repairs: growing (or creating) the
    memory/table when literal-offset data/elem segments demand it.
    """
    deltas = _continuity_deltas(module, kind)
    renumber_identity(module)
    if kind in (SectionKind.DATA, SectionKind.MEM):
        _repair_memory(module)
    elif kind in (SectionKind.ELEM, SectionKind.TABLE):
        _repair_table(module)
    return deltas
