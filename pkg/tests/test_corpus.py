import json

import pytest

from dblcat_fibrations.corpus import RECIPES, fixtures, generate_corpus, write_corpus
from dblcat_fibrations.errors import ResourceLimitExceeded
from dblcat_fibrations.serialization import load_instance


class TestGeneration:
    def test_deterministic(self):
        first = generate_corpus(3, size=6, base_objects=3)
        second = generate_corpus(3, size=6, base_objects=3)
        assert [e.name for e in first] == [e.name for e in second]
        assert all(a.projection == b.projection for a, b in zip(first, second))

    def test_recipes_cycle(self):
        entries = generate_corpus(0, size=len(RECIPES), base_objects=3)
        assert entries[0].name == "copresheaf-0000"
        assert [e.provenance['recipe'] for e in entries] == list(RECIPES)
        assert all(e.certificate.holds for e in entries)
        assert all(e.provenance['seed'] == 0 for e in entries)

    def test_single_recipe(self):
        entries = generate_corpus(5, size=2, base_objects=2, recipes=("copresheaf",))
        assert [e.name for e in entries] == ["copresheaf-0000", "copresheaf-0001"]
        assert all(e.functor is not None for e in entries)

    def test_composites_certify(self):
        entries = generate_corpus(11, size=3, base_objects=4, recipes=("composite",))
        assert [e.name for e in entries] == ["composite-0000", "composite-0001", "composite-0002"]
        assert all(e.certificate.holds for e in entries)

    def test_grid_bases_have_vertical_arrows(self):
        entries = generate_corpus(5, size=4, base_objects=4, recipes=("grid-base-change",))
        assert len(entries) == 4
        for entry in entries:
            base = entry.projection.target.vertical
            assert any(not base.is_identity(v) for v in base.morphisms)
            assert entry.certificate.holds

    def test_cap(self):
        with pytest.raises(ResourceLimitExceeded):
            generate_corpus(0, size=1, base_objects=3, max_cells=1)


class TestFixtures:
    def test_names(self):
        names = [instance.name for instance in fixtures()]
        assert len(names) == 14
        assert "copresheaf-un-example" in names
        assert "transposition-iso" in names

    def test_transpositions_certify(self):
        for instance in fixtures():
            if instance.name.startswith("transposition-"):
                assert instance.metadata['certificate']['holds'] is True


class TestWriting:
    def test_manifest(self, tmp_path):
        entries = generate_corpus(1, size=3, base_objects=3)
        manifest_path = write_corpus(entries, tmp_path / "corpus")
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))['instances']
        names = [item['name'] for item in manifest]
        assert names == sorted(names)
        assert len(manifest) == 14 + len(entries)
        for item in manifest:
            assert (tmp_path / "corpus" / item['file']).exists()
        generated = [item for item in manifest if item['recipe'] in RECIPES]
        assert all(item['holds'] is True for item in generated)

    def test_without_fixtures(self, tmp_path):
        entries = generate_corpus(2, size=1, base_objects=2)
        manifest_path = write_corpus(entries, tmp_path, with_fixtures=False)
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))['instances']
        assert [item['name'] for item in manifest] == [entries[0].name]
        loaded = load_instance(tmp_path / manifest[0]['file'])
        assert loaded.value == entries[0].projection
