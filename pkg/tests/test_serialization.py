import json

import pytest

from dblcat_fibrations.core_cat import chain
from dblcat_fibrations.corpus import transposition, un_example
from dblcat_fibrations.dblcat import arrow_double, grid
from dblcat_fibrations.errors import SchemaError
from dblcat_fibrations.serialization import (
    INSTANCE_KINDS,
    decode_cell,
    dumps,
    encode_cell,
    kind_of,
    load_instance,
    loads,
    make_instance,
    save_instance,
)
from dblcat_fibrations.two_cat import lax_projection, lax_triangle


class TestLabels:
    @pytest.mark.parametrize("cell,label", [
        (0, "0"),
        ("a", "a"),
        ((0, 1), "[0,1]"),
        ("0", '"0"'),
        (((0, 1), "b"), '[[0,1],"b"]'),
    ])
    def test_encode(self, cell, label):
        assert encode_cell(cell) == label
        assert decode_cell(label) == cell

    def test_sets_have_no_label(self):
        with pytest.raises(SchemaError):
            encode_cell(frozenset({1}))


class TestInstances:
    @pytest.mark.parametrize("value", [
        chain(2), grid(1, 1), arrow_double(2), transposition(chain(1)),
        lax_triangle(), lax_projection(),
    ])
    def test_save_and_load(self, tmp_path, value):
        instance = make_instance("sample", value, seed=7)
        path = save_instance(instance, tmp_path / "nested" / "sample.json")
        loaded = load_instance(path)
        assert loaded.kind == instance.kind
        assert loaded.metadata == {'seed': 7}
        assert loaded.value == value

    def test_stable_bytes(self):
        instance = make_instance("un", un_example())
        text = dumps(instance)
        assert dumps(loads(text)) == text
        assert json.loads(text)['schema'] == "dblcat/1"

    def test_kinds(self):
        assert len(INSTANCE_KINDS) == 9
        assert kind_of(grid(0, 0)) == "double"
        assert kind_of(un_example()) == "cat-valued-functor"
        with pytest.raises(SchemaError):
            kind_of(42)


class TestSchemaErrors:
    def test_not_json(self):
        with pytest.raises(SchemaError):
            loads("{not json")

    def test_not_an_object(self):
        with pytest.raises(SchemaError):
            loads("[1, 2]")

    def test_wrong_schema(self):
        document = json.loads(dumps(make_instance("c", chain(1))))
        document['schema'] = "dblcat/0"
        with pytest.raises(SchemaError):
            loads(json.dumps(document))

    def test_unknown_kind(self):
        document = json.loads(dumps(make_instance("c", chain(1))))
        document['kind'] = "triple-category"
        with pytest.raises(SchemaError):
            loads(json.dumps(document))

    def test_bad_payload(self):
        document = json.loads(dumps(make_instance("c", chain(1))))
        document['payload'] = {}
        with pytest.raises(SchemaError):
            loads(json.dumps(document))

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError):
            load_instance(tmp_path / "absent.json")
