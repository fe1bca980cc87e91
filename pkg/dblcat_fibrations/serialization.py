"""
Instance files
JSON documents with an explicit "dblcat/1" schema tag, validated with pydantic

Cells are written as labels: a plain string stays as it is unless it would
parse as JSON, everything else is its compact JSON form (tuples become
arrays). Identifier arrays are sorted by label and keys are sorted, so
printing the same structure twice gives the same bytes.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Tuple, Union

from pydantic import BaseModel, ConfigDict, ValidationError

from .constants import SCHEMA_VERSION
from .core_cat import Cell, FinCategory, FinFunctor
from .dblcat import DoubleFunctor, FinDoubleCategory, MarkedDoubleCategory, build_double
from .errors import SchemaError
from .groth import CatValuedFunctor
from .two_cat import FinTwoCategory, TwoCatValuedFunctor, TwoFunctor

logger = logging.getLogger(__name__)

INSTANCE_KINDS = (
    "category", "double", "marked-double", "functor", "double-functor",
    "two-category", "cat-valued-functor", "two-functor", "two-cat-valued-functor",
)


# ---------------------------------------------------------------------------
# Cell labels
# ---------------------------------------------------------------------------

def _jsonable(cell: Cell) -> Any:
    if isinstance(cell, tuple):
        return [_jsonable(part) for part in cell]
    if isinstance(cell, (frozenset, set)):
        raise SchemaError(f"set-valued cell {cell!r} cannot be labelled")
    return cell


def _cellify(value: Any) -> Cell:
    if isinstance(value, list):
        return tuple(_cellify(part) for part in value)
    return value


def encode_cell(cell: Cell) -> str:
    if isinstance(cell, str):
        try:
            json.loads(cell)
        except ValueError:
            return cell
    return json.dumps(_jsonable(cell), separators=(",", ":"), ensure_ascii=False)


def decode_cell(label: str) -> Cell:
    try:
        return _cellify(json.loads(label))
    except ValueError:
        return label


def _labels(cells) -> List[str]:
    return sorted(encode_cell(c) for c in cells)


def _table(mapping: Mapping[Cell, Cell]) -> Dict[str, str]:
    return {encode_cell(k): encode_cell(v) for k, v in mapping.items()}


def _triples(mapping: Mapping[Tuple[Cell, Cell], Cell]) -> List[Tuple[str, str, str]]:
    return sorted((encode_cell(g), encode_cell(f), encode_cell(gf)) for (g, f), gf in mapping.items())


def _untable(table: Mapping[str, str]) -> Dict[Cell, Cell]:
    return {decode_cell(k): decode_cell(v) for k, v in table.items()}


def _untriples(rows: List[Tuple[str, str, str]]) -> Dict[Tuple[Cell, Cell], Cell]:
    return {(decode_cell(g), decode_cell(f)): decode_cell(gf) for g, f, gf in rows}


def _cells(labels: List[str]) -> Tuple[Cell, ...]:
    return tuple(decode_cell(label) for label in labels)


# ---------------------------------------------------------------------------
# Schema
# ---------------------------------------------------------------------------

class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


Triple = Tuple[str, str, str]


class CategoryModel(_Strict):
    objects: List[str]
    morphisms: List[str]
    src: Dict[str, str]
    tgt: Dict[str, str]
    ident: Dict[str, str]
    comp: List[Triple]


class DoubleModel(_Strict):
    horizontal: CategoryModel
    vertical: CategoryModel
    squares: List[str]
    top: Dict[str, str]
    bottom: Dict[str, str]
    left: Dict[str, str]
    right: Dict[str, str]
    h_identity: Dict[str, str]
    v_identity: Dict[str, str]
    hpaste: List[Triple]
    vpaste: List[Triple]


class MarkedDoubleModel(_Strict):
    double: DoubleModel
    direction: Literal["vertical", "horizontal"]
    marked: List[str]


class FunctorModel(_Strict):
    source: CategoryModel
    target: CategoryModel
    on_objects: Dict[str, str]
    on_morphisms: Dict[str, str]


class DoubleFunctorModel(_Strict):
    source: DoubleModel
    target: DoubleModel
    on_objects: Dict[str, str]
    on_h: Dict[str, str]
    on_v: Dict[str, str]
    on_squares: Dict[str, str]


class TwoCategoryModel(_Strict):
    objects: List[str]
    one_cells: List[str]
    src: Dict[str, str]
    tgt: Dict[str, str]
    ident: Dict[str, str]
    comp: List[Triple]
    two_cells: List[str]
    dom: Dict[str, str]
    cod: Dict[str, str]
    unit: Dict[str, str]
    vcomp: List[Triple]
    hcomp: List[Triple]


class TwoFunctorModel(_Strict):
    source: TwoCategoryModel
    target: TwoCategoryModel
    on_objects: Dict[str, str]
    on_one_cells: Dict[str, str]
    on_two_cells: Dict[str, str]


class ValueMapModel(_Strict):
    on_objects: Dict[str, str]
    on_morphisms: Dict[str, str]


class CatValuedModel(_Strict):
    base: CategoryModel
    values: Dict[str, CategoryModel]
    on_morphisms: Dict[str, ValueMapModel]


class TwoCatValuedModel(_Strict):
    base: TwoCategoryModel
    values: Dict[str, CategoryModel]
    on_one_cells: Dict[str, ValueMapModel]
    on_two_cells: Dict[str, Dict[str, str]]


PAYLOAD_MODELS = {
    "category": CategoryModel,
    "double": DoubleModel,
    "marked-double": MarkedDoubleModel,
    "functor": FunctorModel,
    "double-functor": DoubleFunctorModel,
    "two-category": TwoCategoryModel,
    "cat-valued-functor": CatValuedModel,
    "two-functor": TwoFunctorModel,
    "two-cat-valued-functor": TwoCatValuedModel,
}


class InstanceModel(_Strict):
    schema_: Literal["dblcat/1"]
    kind: Literal[INSTANCE_KINDS]
    name: str
    metadata: Dict[str, Any] = {}
    payload: Dict[str, Any]

    @classmethod
    def from_document(cls, document: Dict[str, Any]) -> "InstanceModel":
        document = dict(document)
        if "schema" in document:
            document["schema_"] = document.pop("schema")
        return cls.model_validate(document)


Structure = Union[FinCategory, FinDoubleCategory, MarkedDoubleCategory, FinFunctor, DoubleFunctor,
                  FinTwoCategory, CatValuedFunctor, TwoFunctor, TwoCatValuedFunctor]


@dataclass
class Instance:
    """A named structure with its kind tag and free-form metadata (seed, provenance)"""
    name: str
    kind: str
    value: Structure
    metadata: Dict[str, Any] = field(default_factory=dict)


def kind_of(value: Structure) -> str:
    for kind, cls in (("category", FinCategory), ("double", FinDoubleCategory),
                      ("marked-double", MarkedDoubleCategory), ("functor", FinFunctor),
                      ("double-functor", DoubleFunctor), ("two-category", FinTwoCategory),
                      ("cat-valued-functor", CatValuedFunctor), ("two-functor", TwoFunctor),
                      ("two-cat-valued-functor", TwoCatValuedFunctor)):
        if isinstance(value, cls):
            return kind
    raise SchemaError(f"no instance kind for {type(value).__name__}")


# ---------------------------------------------------------------------------
# Structures to payloads
# ---------------------------------------------------------------------------

def _category_payload(c: FinCategory) -> Dict[str, Any]:
    return {
        'objects': _labels(c.objects),
        'morphisms': _labels(c.morphisms),
        'src': _table(c.src),
        'tgt': _table(c.tgt),
        'ident': _table(c.ident),
        'comp': _triples(c.comp),
    }


def _double_payload(d: FinDoubleCategory) -> Dict[str, Any]:
    squares = d.squares
    return {
        'horizontal': _category_payload(d.horizontal),
        'vertical': _category_payload(d.vertical),
        'squares': _labels(squares),
        'top': _table({s: d.top(s) for s in squares}),
        'bottom': _table({s: d.bottom(s) for s in squares}),
        'left': _table({s: d.left(s) for s in squares}),
        'right': _table({s: d.right(s) for s in squares}),
        'h_identity': _table(d.squares_h.ident),
        'v_identity': _table(d.squares_v.ident),
        'hpaste': _triples(d.squares_h.comp),
        'vpaste': _triples(d.squares_v.comp),
    }


def _two_category_payload(t: FinTwoCategory) -> Dict[str, Any]:
    return {
        'objects': _labels(t.objects),
        'one_cells': _labels(t.one_cells),
        'src': _table(t.src),
        'tgt': _table(t.tgt),
        'ident': _table(t.ident),
        'comp': _triples(t.comp),
        'two_cells': _labels(t.two_cells),
        'dom': _table(t.dom),
        'cod': _table(t.cod),
        'unit': _table(t.unit),
        'vcomp': _triples(t.vcomp),
        'hcomp': _triples(t.hcomp),
    }


def to_payload(value: Structure) -> Dict[str, Any]:
    """The payload dictionary for any supported structure"""
    kind = kind_of(value)
    if kind == "category":
        return _category_payload(value)
    if kind == "double":
        return _double_payload(value)
    if kind == "marked-double":
        return {'double': _double_payload(value.base), 'direction': value.direction,
                'marked': _labels(value.marked)}
    if kind == "functor":
        return {'source': _category_payload(value.source), 'target': _category_payload(value.target),
                'on_objects': _table(value.on_objects), 'on_morphisms': _table(value.on_morphisms)}
    if kind == "double-functor":
        return {'source': _double_payload(value.source), 'target': _double_payload(value.target),
                'on_objects': _table(value.on_objects), 'on_h': _table(value.on_h),
                'on_v': _table(value.on_v), 'on_squares': _table(value.on_squares)}
    if kind == "two-category":
        return _two_category_payload(value)
    if kind == "two-functor":
        return {'source': _two_category_payload(value.source), 'target': _two_category_payload(value.target),
                'on_objects': _table(value.on_objects), 'on_one_cells': _table(value.on_one_cells),
                'on_two_cells': _table(value.on_two_cells)}
    if kind == "cat-valued-functor":
        return {
            'base': _category_payload(value.base),
            'values': {encode_cell(c): _category_payload(v) for c, v in value.on_objects.items()},
            'on_morphisms': {encode_cell(g): {'on_objects': _table(F.on_objects),
                                              'on_morphisms': _table(F.on_morphisms)}
                             for g, F in value.on_morphisms.items()},
        }
    return {
        'base': _two_category_payload(value.base),
        'values': {encode_cell(c): _category_payload(v) for c, v in value.on_objects.items()},
        'on_one_cells': {encode_cell(g): {'on_objects': _table(F.on_objects),
                                          'on_morphisms': _table(F.on_morphisms)}
                         for g, F in value.on_one_cells.items()},
        'on_two_cells': {encode_cell(mu): _table(components) for mu, components in value.on_two_cells.items()},
    }


# ---------------------------------------------------------------------------
# Payloads to structures
# ---------------------------------------------------------------------------

def _category(m: CategoryModel) -> FinCategory:
    return FinCategory(_cells(m.objects), _cells(m.morphisms), _untable(m.src), _untable(m.tgt),
                       _untable(m.ident), _untriples(m.comp))


def _double(m: DoubleModel) -> FinDoubleCategory:
    return build_double(
        _category(m.horizontal), _category(m.vertical), _cells(m.squares),
        _untable(m.top), _untable(m.bottom), _untable(m.left), _untable(m.right),
        _untable(m.h_identity), _untable(m.v_identity), _untriples(m.hpaste), _untriples(m.vpaste),
    )


def _two_category(m: TwoCategoryModel) -> FinTwoCategory:
    return FinTwoCategory(
        _cells(m.objects), _cells(m.one_cells), _untable(m.src), _untable(m.tgt), _untable(m.ident),
        _untriples(m.comp), _cells(m.two_cells), _untable(m.dom), _untable(m.cod), _untable(m.unit),
        _untriples(m.vcomp), _untriples(m.hcomp),
    )


def _value_maps(base_src: Mapping, base_tgt: Mapping, values: Mapping[Cell, FinCategory],
                maps: Mapping[str, ValueMapModel]) -> Dict[Cell, FinFunctor]:
    functors = {}
    for label, m in maps.items():
        g = decode_cell(label)
        if g not in base_src:
            raise SchemaError(f"functor given for unknown morphism {label!r}")
        functors[g] = FinFunctor(values[base_src[g]], values[base_tgt[g]],
                                 _untable(m.on_objects), _untable(m.on_morphisms))
    return functors


def from_payload(kind: str, payload: Dict[str, Any]) -> Structure:
    """
    Rebuild a structure from its payload

    Raises:
        SchemaError: the payload does not match the kind's schema
    """
    if kind not in PAYLOAD_MODELS:
        raise SchemaError(f"unknown instance kind {kind!r}")
    try:
        m = PAYLOAD_MODELS[kind].model_validate(payload)
    except ValidationError as error:
        raise SchemaError(f"{kind} payload: {error}") from error
    try:
        if kind == "category":
            return _category(m)
        if kind == "double":
            return _double(m)
        if kind == "marked-double":
            return MarkedDoubleCategory(_double(m.double), frozenset(_cells(m.marked)), m.direction)
        if kind == "functor":
            return FinFunctor(_category(m.source), _category(m.target),
                              _untable(m.on_objects), _untable(m.on_morphisms))
        if kind == "double-functor":
            return DoubleFunctor(_double(m.source), _double(m.target), _untable(m.on_objects),
                                 _untable(m.on_h), _untable(m.on_v), _untable(m.on_squares))
        if kind == "two-category":
            return _two_category(m)
        if kind == "two-functor":
            return TwoFunctor(_two_category(m.source), _two_category(m.target), _untable(m.on_objects),
                              _untable(m.on_one_cells), _untable(m.on_two_cells))
        if kind == "cat-valued-functor":
            base = _category(m.base)
            values = {decode_cell(c): _category(v) for c, v in m.values.items()}
            return CatValuedFunctor(base, values, _value_maps(base.src, base.tgt, values, m.on_morphisms))
        base = _two_category(m.base)
        values = {decode_cell(c): _category(v) for c, v in m.values.items()}
        return TwoCatValuedFunctor(
            base, values, _value_maps(base.src, base.tgt, values, m.on_one_cells),
            {decode_cell(mu): _untable(components) for mu, components in m.on_two_cells.items()},
        )
    except KeyError as error:
        raise SchemaError(f"{kind} payload refers to an undeclared cell {error}") from error


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------

def canonical_json(document: Any) -> str:
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def dumps(instance: Instance) -> str:
    return canonical_json({
        'schema': SCHEMA_VERSION,
        'kind': instance.kind,
        'name': instance.name,
        'metadata': instance.metadata,
        'payload': to_payload(instance.value),
    })


def loads(text: str) -> Instance:
    """
    Parse an instance document

    Raises:
        SchemaError: malformed JSON, wrong schema tag or a payload that does
            not match its kind
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as error:
        raise SchemaError(f"not a JSON document: {error}") from error
    if not isinstance(document, dict):
        raise SchemaError("instance document must be a JSON object")
    try:
        model = InstanceModel.from_document(document)
    except ValidationError as error:
        raise SchemaError(f"instance header: {error}") from error
    return Instance(model.name, model.kind, from_payload(model.kind, model.payload), dict(model.metadata))


def make_instance(name: str, value: Structure, **metadata: Any) -> Instance:
    return Instance(name, kind_of(value), value, dict(metadata))


def save_instance(instance: Instance, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(instance), encoding="utf-8")
    logger.info("wrote %s instance %r to %s", instance.kind, instance.name, path)
    return path


def load_instance(path: Union[str, Path]) -> Instance:
    """
    Raises:
        SchemaError: unreadable file or malformed document
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as error:
        raise SchemaError(f"cannot read {path}: {error}") from error
    instance = loads(text)
    logger.debug("loaded %s instance %r from %s", instance.kind, instance.name, path)
    return instance


def write_report(report: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(report), encoding="utf-8")
    return path
