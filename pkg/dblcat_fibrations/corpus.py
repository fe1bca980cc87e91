"""
Fixtures and the seeded corpus of certified (left, cart)-fibrations

Every generated fibration comes from copresheaf_of applied to a strict
functor on a random finite poset, then optionally pulled back along a chain
in the base or composed with a discrete fibration underneath. A fourth
recipe pulls a product fibration back along a grid whose base has real
vertical arrows.
"""

import logging
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

from tqdm import tqdm

from .config import get_settings, resolve_cap
from .core_cat import (
    Cell,
    FinCategory,
    FinFunctor,
    chain,
    discrete,
    evaluation,
    identity_functor,
    isomorphism_category,
)
from .dblcat import (
    DoubleFunctor,
    arrow_double,
    boxtimes,
    boxtimes_functor,
    compose_double_functors,
    grid,
    to_terminal_double,
    twisted_double,
    twisted_op_double,
)
from .errors import ResourceLimitExceeded
from .fibr import FibrationCertificate, base_change, check_fibration, compose_fibrations
from .groth import CatValuedFunctor, copresheaf_of, representable_functor, unstraighten_1
from .serialization import Instance, canonical_json, make_instance, save_instance
from .two_cat import lax_cylinder_functor, lax_projection, representable_two_functor, two_cell

logger = logging.getLogger(__name__)

RECIPES = ("copresheaf", "base-change", "composite", "grid-base-change")


# ---------------------------------------------------------------------------
# Random building blocks
# ---------------------------------------------------------------------------

def poset_category(objects, le: Callable[[Cell, Cell], bool]) -> FinCategory:
    """Thin category with a morphism (a, b) whenever a ≤ b"""
    objects = tuple(objects)
    pairs = tuple((a, b) for a in objects for b in objects if le(a, b))
    by_source: Dict[Cell, List] = {}
    for pair in pairs:
        by_source.setdefault(pair[0], []).append(pair)
    return FinCategory(
        objects=objects, morphisms=pairs,
        src={p: p[0] for p in pairs}, tgt={p: p[1] for p in pairs},
        ident={a: (a, a) for a in objects},
        comp={(second, first): (first[0], second[1])
              for first in pairs for second in by_source.get(first[1], ())},
    )


def random_poset(rng: random.Random, size: int, density: float = 0.4) -> FinCategory:
    """A random partial order on 0..size-1 refining the usual order, closed transitively"""
    below = {j: {j} for j in range(size)}
    for j in range(size):
        for i in range(j):
            if rng.random() < density:
                below[j] |= below[i]
    return poset_category(range(size), lambda a, b: a in below[b])


def _rank(c: FinCategory, x: Cell) -> int:
    """Number of strict predecessors; strictly increasing along non-identity morphisms of a gaunt thin category"""
    return sum(1 for f in c.into(x) if not c.is_identity(f))


def _inclusion(source: FinCategory, target: FinCategory) -> FinFunctor:
    return FinFunctor(source, target, {x: x for x in source.objects}, {f: f for f in source.morphisms})


def _truncation(source: FinCategory, target: FinCategory, top: int) -> FinFunctor:
    clamp = lambda x: min(x, top)
    return FinFunctor(source, target, {x: clamp(x) for x in source.objects},
                      {(i, j): (clamp(i), clamp(j)) for (i, j) in source.morphisms})


def random_copresheaf(rng: random.Random, c: FinCategory, max_length: int = 2) -> CatValuedFunctor:
    """
    A strict functor c → Cat with chain or discrete values: growing chains
    with inclusions, shrinking chains with truncations, a constant value, or
    a representable
    """
    shape = rng.choice(("grow", "shrink", "constant", "representable"))
    if shape == "representable":
        return representable_functor(c, rng.choice(c.objects))
    if shape == "constant":
        value = chain(rng.randint(0, max_length)) if rng.random() < 0.5 else discrete(range(rng.randint(1, 2)))
        identity = identity_functor(value)
        return CatValuedFunctor(c, {x: value for x in c.objects}, {f: identity for f in c.morphisms})
    if shape == "grow":
        lengths = {x: min(_rank(c, x), max_length) for x in c.objects}
    else:
        lengths = {x: max(max_length - _rank(c, x), 0) for x in c.objects}
    values = {x: chain(n) for x, n in lengths.items()}
    on_morphisms = {}
    for f in c.morphisms:
        source, target = values[c.src[f]], values[c.tgt[f]]
        if shape == "grow":
            on_morphisms[f] = _inclusion(source, target)
        else:
            on_morphisms[f] = _truncation(source, target, lengths[c.tgt[f]])
    return CatValuedFunctor(c, values, on_morphisms)


def random_chain_in(rng: random.Random, c: FinCategory, length: int) -> FinFunctor:
    """A functor [length] → c picking a weakly increasing sequence of objects"""
    walk = [rng.choice(c.objects)]
    for _ in range(length):
        onward = c.out_of(walk[-1])
        walk.append(c.tgt[rng.choice(onward)])
    source = chain(length)
    return FinFunctor(source, c, {i: walk[i] for i in source.objects},
                      {(i, j): c.hom(walk[i], walk[j])[0] for (i, j) in source.morphisms})


def _over_elements(q: DoubleFunctor) -> DoubleFunctor:
    """
    For a copresheaf q: X_G → B ⊠ [0] with discrete values, the isomorphism
    E ⊠ [0] → X_G where E is the horizontal category of X_G
    """
    X = q.source
    E = X.horizontal
    shape = boxtimes(E, chain(0))
    return DoubleFunctor(
        shape, X,
        {(o, 0): o for o in E.objects},
        {(a, 0): a for a in E.morphisms},
        {(o, (0, 0)): (o[0], (o[1], o[1])) for o in E.objects},
        {(a, (0, 0)): (a[0], (a[1], a[1])) for a in E.morphisms},
    )


def _cell_count(p: DoubleFunctor) -> int:
    d = p.source
    return len(d.objects) + len(d.h_arrows) + len(d.v_arrows) + len(d.squares)


# ---------------------------------------------------------------------------
# Corpus
# ---------------------------------------------------------------------------

@dataclass
class CorpusEntry:
    """One certified fibration with the recipe that produced it"""
    name: str
    projection: DoubleFunctor
    certificate: FibrationCertificate
    provenance: Dict[str, Any] = field(default_factory=dict)
    functor: Optional[CatValuedFunctor] = None

    @property
    def gaunt(self) -> bool:
        return bool(self.provenance.get("gaunt", True))

    def to_instance(self) -> Instance:
        return make_instance(self.name, self.projection, certificate=self.certificate.to_dict(),
                             **self.provenance)


def _copresheaf_entry(rng: random.Random, index: int, base_objects: int) -> CorpusEntry:
    base = random_poset(rng, rng.randint(1, base_objects))
    F = random_copresheaf(rng, base)
    p, certificate = copresheaf_of(F)
    return CorpusEntry(f"copresheaf-{index:04d}", p, certificate,
                       {'recipe': "copresheaf", 'base_objects': len(base.objects)}, F)


def _base_change_entry(rng: random.Random, index: int, base_objects: int) -> CorpusEntry:
    entry = _copresheaf_entry(rng, index, base_objects)
    C = entry.functor.base
    g = boxtimes_functor(random_chain_in(rng, C, rng.randint(0, 2)), identity_functor(chain(0)))
    _, _, pulled, certificate = base_change(entry.projection, g)
    return CorpusEntry(f"base-change-{index:04d}", pulled, certificate,
                       {'recipe': "base-change", 'base_objects': len(C.objects)})


def _composite_entry(rng: random.Random, index: int, base_objects: int) -> CorpusEntry:
    base = random_poset(rng, rng.randint(1, max(1, base_objects - 2)))
    q, _ = copresheaf_of(representable_functor(base, rng.choice(base.objects)))
    upper = _over_elements(q)
    # over E itself, so that p lands in E ⊠ [0], the source of upper
    F = random_copresheaf(rng, q.source.horizontal, max_length=1)
    p, _ = copresheaf_of(F)
    composite, certificate = compose_fibrations(compose_double_functors(upper, p), q)
    return CorpusEntry(f"composite-{index:04d}", composite, certificate,
                       {'recipe': "composite", 'base_objects': len(base.objects)})


def _grid_base_change_entry(rng: random.Random, index: int, base_objects: int) -> CorpusEntry:
    """
    F ⊠ G over C ⊠ [n], F the discrete left fibration of a representable and
    G the source functor of the arrow category of [n], pulled back along
    [m, n] → C ⊠ [n], so the base has non-identity v-arrows
    """
    C = random_poset(rng, rng.randint(1, max(1, base_objects - 2)))
    F, _ = unstraighten_1(representable_functor(C, rng.choice(C.objects)))
    n = rng.randint(1, 2)
    p = boxtimes_functor(F, evaluation(chain(n), 0))
    g = boxtimes_functor(random_chain_in(rng, C, rng.randint(0, 2)), identity_functor(chain(n)))
    _, _, pulled, certificate = base_change(p, g)
    return CorpusEntry(f"grid-base-change-{index:04d}", pulled, certificate,
                       {'recipe': "grid-base-change", 'base_objects': len(C.objects), 'vertical_length': n})


_BUILDERS = {
    "copresheaf": _copresheaf_entry,
    "base-change": _base_change_entry,
    "composite": _composite_entry,
    "grid-base-change": _grid_base_change_entry,
}


def generate_corpus(seed: int, size: Optional[int] = None, base_objects: Optional[int] = None,
                    max_cells: Optional[int] = None,
                    recipes: tuple = RECIPES) -> List[CorpusEntry]:
    """
    Deterministic corpus of certified (left, cart)-fibrations

    Args:
        seed (int): random seed; equal seeds give equal corpora
        size (int): number of entries (default from settings)
        base_objects (int): bound on the number of base objects (default from settings)
        max_cells (int): cap on the cells of any single entry

    Raises:
        ResourceLimitExceeded: an entry is larger than the cap
    """
    settings = get_settings()
    size = settings.corpus_size if size is None else size
    base_objects = settings.base_objects if base_objects is None else base_objects
    cap = resolve_cap(max_cells)
    rng = random.Random(seed)
    entries = []
    for index in tqdm(range(size), desc="corpus", dynamic_ncols=True, disable=not sys.stderr.isatty()):
        recipe = recipes[index % len(recipes)]
        entry = _BUILDERS[recipe](rng, index, base_objects)
        if _cell_count(entry.projection) > cap:
            raise ResourceLimitExceeded(entry.name, cap)
        if not entry.certificate.holds:
            logger.warning("%s did not certify: %s", entry.name, entry.certificate.witness())
            continue
        entry.provenance['seed'] = seed
        entries.append(entry)
    logger.info("generated %d corpus entries from seed %d", len(entries), seed)
    return entries


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

def un_example() -> CatValuedFunctor:
    """F on [1] with F(0) = [0], F(1) = [1] and F(0 → 1) picking 0"""
    base, point, line = chain(1), chain(0), chain(1)
    return CatValuedFunctor(base, {0: point, 1: line}, {
        (0, 0): identity_functor(point),
        (1, 1): identity_functor(line),
        (0, 1): FinFunctor(point, line, {0: 0}, {(0, 0): (0, 0)}),
    })


def transposition(a: FinCategory) -> DoubleFunctor:
    """[0] ⊠ A → [0, 0]"""
    return to_terminal_double(boxtimes(chain(0), a))


def fixtures() -> List[Instance]:
    """The fixed instances shipped with every corpus"""
    items = [
        make_instance("grid-1-1", grid(1, 1), provenance="fixture"),
        make_instance("grid-2-1", grid(2, 1), provenance="fixture"),
        make_instance("arrow-2", arrow_double(2), provenance="fixture"),
        make_instance("twisted-2", twisted_double(2), provenance="fixture"),
        make_instance("twisted-op-2", twisted_op_double(2), provenance="fixture"),
        make_instance("two-cell", two_cell(), provenance="fixture"),
        make_instance("lax-projection", lax_projection(), provenance="fixture"),
        make_instance("representable-two-cell-0", representable_two_functor(two_cell(), 0), provenance="fixture"),
        make_instance("lax-cylinder-1", lax_cylinder_functor(chain(1)), provenance="fixture"),
        make_instance("un-example", un_example(), provenance="fixture"),
    ]
    copresheaf, certificate = copresheaf_of(un_example())
    items.append(make_instance("copresheaf-un-example", copresheaf, provenance="fixture",
                               certificate=certificate.to_dict()))
    for label, a in (("chain-1", chain(1)), ("chain-2", chain(2)), ("iso", isomorphism_category())):
        p = transposition(a)
        items.append(make_instance(f"transposition-{label}", p, provenance="fixture",
                                   certificate=check_fibration(p, "left-cart", paranoid=False).to_dict(),
                                   gaunt=label != "iso"))
    return items


def write_corpus(entries: List[CorpusEntry], out_dir: Union[str, Path],
                 with_fixtures: bool = True) -> Path:
    """Write one instance file per entry and a manifest.json summarizing every certificate"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = []
    instances = [entry.to_instance() for entry in entries]
    if with_fixtures:
        instances = fixtures() + instances
    for instance in instances:
        path = save_instance(instance, out_dir / f"{instance.name}.json")
        summary = instance.metadata.get("certificate", {})
        manifest.append({
            'name': instance.name,
            'kind': instance.kind,
            'file': path.name,
            'holds': summary.get("holds"),
            'recipe': instance.metadata.get("recipe", instance.metadata.get("provenance")),
        })
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(canonical_json({'instances': sorted(manifest, key=lambda m: m['name'])}),
                             encoding="utf-8")
    logger.info("wrote %d instances to %s", len(manifest), out_dir)
    return manifest_path
