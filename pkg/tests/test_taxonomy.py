import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import flatten_taxonomy
from tracelift.taxonomy import (
    Category,
    Characteristic,
    Dimension,
    Taxonomy,
    TaxonomyDataError,
    diff_taxonomies,
    load_bundled_taxonomy,
    parse_taxonomy,
    serialize_taxonomy,
    taxonomy_from_dict,
    taxonomy_to_dict,
    validate_taxonomy,
)


def small(version="t/1", **overrides) -> Taxonomy:
    """Two dimensions, two categories each, two characteristics each."""
    base = dict(
        version_label=version,
        meta_characteristic="test objects",
        dimensions=(
            Dimension(
                "d1",
                "Alpha",
                "which alpha?",
                (
                    Category("c1", "One", (Characteristic("x1", "A"), Characteristic("x2", "B"))),
                    Category("c2", "Two", (Characteristic("x3", "C"), Characteristic("x4", "D"))),
                ),
            ),
            Dimension(
                "d2",
                "Beta",
                "which beta?",
                (
                    Category("c3", "Three", (Characteristic("x5", "E"), Characteristic("x6", "F"))),
                    Category("c4", "Four", (Characteristic("x7", "G"), Characteristic("x8", "H"))),
                ),
            ),
        ),
    )
    base.update(overrides)
    return Taxonomy(**base)


# --- bundled dataset ----------------------------------------------------------


def test_bundled_taxonomy_loads_and_is_cached():
    assert load_bundled_taxonomy() is load_bundled_taxonomy()


def test_bundled_taxonomy_shape():
    t = load_bundled_taxonomy()
    assert [d.name for d in t.dimensions] == ["Source", "Transmission Mode", "Artifact Format", "Task"]
    assert [len(d.categories) for d in t.dimensions] == [5, 2, 4, 5]
    assert sum(len(c.characteristics) for d in t.dimensions for c in d.categories) == 39
    assert t.meta_characteristic  # scoping statement present


def test_bundled_taxonomy_spot_ids():
    t = load_bundled_taxonomy()
    flat = flatten_taxonomy(t)
    assert flat["cat1.2"] == ("category", "Data", "d1")
    assert flat["c2.2.2"] == ("characteristic", "Machine-to-Machine", "cat2.2")
    assert flat["c4.1.6"] == ("characteristic", "Sourcing", "cat4.1")
    assert flat["c4.2.1"][2] == "cat4.2" and flat["c4.2.2"][2] == "cat4.2"


def test_bundled_taxonomy_passes_strict_validation():
    report = validate_taxonomy(load_bundled_taxonomy(), "strict")
    assert report.ok and report.violations == ()


# --- validation ---------------------------------------------------------------


def test_duplicate_ids_are_flagged():
    t = small(
        dimensions=(
            Dimension(
                "d1",
                "Alpha",
                "",
                (Category("c1", "One", (Characteristic("x1", "A"), Characteristic("x1", "B"))),),
            ),
        )
    )
    report = validate_taxonomy(t, "descriptive")
    assert not report.ok
    assert any(v.rule == "id-duplicate" for v in report.violations)


def test_strict_minimums():
    lone_category = small(
        dimensions=(
            Dimension(
                "d1",
                "Alpha",
                "",
                (Category("c1", "One", (Characteristic("x1", "A"), Characteristic("x2", "B"))),),
            ),
        )
    )
    assert any(v.rule == "dim-min-categories" for v in validate_taxonomy(lone_category, "strict").violations)
    # the same taxonomy is acceptable descriptively
    assert validate_taxonomy(lone_category, "descriptive").ok

    lone_char = small(
        dimensions=(
            Dimension(
                "d1",
                "Alpha",
                "",
                (
                    Category("c1", "One", (Characteristic("x1", "A"),)),
                    Category("c2", "Two", (Characteristic("x2", "B"), Characteristic("x3", "C"))),
                ),
            ),
        )
    )
    assert any(v.rule == "cat-min-characteristics" for v in validate_taxonomy(lone_char, "strict").violations)


def test_empty_dimension_flagged_in_both_modes():
    t = small(dimensions=(Dimension("d1", "Alpha", "", ()),))
    assert "dim-min-categories" in {v.rule for v in validate_taxonomy(t, "strict").violations}
    assert "dim-empty" in {v.rule for v in validate_taxonomy(t, "descriptive").violations}


def test_empty_taxonomy():
    t = small(dimensions=())
    assert any(v.rule == "taxonomy-empty" for v in validate_taxonomy(t, "descriptive").violations)


def test_sibling_name_collisions():
    t = small(
        dimensions=(
            Dimension(
                "d1",
                "Alpha",
                "",
                (
                    Category("c1", "Same", (Characteristic("x1", "A"), Characteristic("x2", "B"))),
                    Category("c2", "Same", (Characteristic("x3", "C"), Characteristic("x4", "D"))),
                ),
            ),
        )
    )
    assert any(v.rule == "cat-name-duplicate" for v in validate_taxonomy(t, "descriptive").violations)


def test_violations_are_sorted():
    t = small(
        dimensions=(
            Dimension("d2", "Beta", "", ()),
            Dimension("d1", "Alpha", "", ()),
        )
    )
    report = validate_taxonomy(t, "strict")
    keys = [(v.path, v.rule) for v in report.violations]
    assert keys == sorted(keys)


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        validate_taxonomy(small(), "fuzzy")


# --- diff ----------------------------------------------------------------------


def oracle_diff(a: Taxonomy, b: Taxonomy):
    """Set arithmetic over flattened structures."""
    fa, fb = flatten_taxonomy(a), flatten_taxonomy(b)
    added = {i for i in fb if i not in fa}
    removed = {i for i in fa if i not in fb}
    renamed = {i for i in fa.keys() & fb.keys() if fa[i][1] != fb[i][1]}
    moved = {i for i in fa.keys() & fb.keys() if fa[i][2] != fb[i][2]}
    return added, removed, renamed, moved


def assert_diff_matches_oracle(a: Taxonomy, b: Taxonomy):
    diff = diff_taxonomies(a, b)
    added, removed, renamed, moved = oracle_diff(a, b)
    assert {e.id for e in diff.added} == added
    assert {e.id for e in diff.removed} == removed
    assert {e.id for e in diff.renamed} == renamed
    assert {e.id for e in diff.moved} == moved


def test_diff_of_identical_taxonomies_is_empty():
    assert diff_taxonomies(small(), small()).empty


def test_diff_detects_each_kind():
    a = small()
    b_doc = taxonomy_to_dict(a)
    b_doc["dimensions"][0]["categories"][0]["name"] = "Renamed"  # rename c1
    moved_char = b_doc["dimensions"][0]["categories"][1]["characteristics"].pop(0)  # move x3
    b_doc["dimensions"][1]["categories"][0]["characteristics"].append(moved_char)
    b_doc["dimensions"][0]["categories"][0]["characteristics"].append(
        {"id": "x9", "name": "New", "description": ""}
    )  # add x9
    del b_doc["dimensions"][1]["categories"][1]["characteristics"][1]  # remove x8
    b = taxonomy_from_dict(b_doc)

    diff = diff_taxonomies(a, b)
    assert [e.id for e in diff.added] == ["x9"]
    assert [e.id for e in diff.removed] == ["x8"]
    assert [e.id for e in diff.renamed] == ["c1"]
    assert [(e.id, e.old_parent, e.new_parent) for e in diff.moved] == [("x3", "c2", "c3")]
    assert_diff_matches_oracle(a, b)


def test_description_and_order_changes_are_not_structural():
    a = small()
    doc = taxonomy_to_dict(a)
    doc["dimensions"][0]["categories"][0]["characteristics"][0]["description"] = "different prose"
    doc["dimensions"][0]["categories"].reverse()
    assert diff_taxonomies(a, taxonomy_from_dict(doc)).empty


@st.composite
def mutations(draw):
    """A random structural edit script over the `small()` taxonomy."""
    doc = taxonomy_to_dict(small())
    ops = draw(st.lists(st.sampled_from(["add", "remove", "rename", "move"]), max_size=5))
    counter = 100
    for op in ops:
        dims = doc["dimensions"]
        cats = [c for d in dims for c in d["categories"]]
        if op == "add":
            counter += 1
            target = draw(st.sampled_from(cats))
            target["characteristics"].append({"id": f"x{counter}", "name": f"N{counter}", "description": ""})
        elif op == "remove":
            donors = [c for c in cats if c["characteristics"]]
            if donors:
                target = draw(st.sampled_from(donors))
                idx = draw(st.integers(0, len(target["characteristics"]) - 1))
                del target["characteristics"][idx]
        elif op == "rename":
            target = draw(st.sampled_from(cats))
            target["name"] = target["name"] + "!"
        elif op == "move":
            donors = [c for c in cats if c["characteristics"]]
            if donors:
                src = draw(st.sampled_from(donors))
                dst = draw(st.sampled_from(cats))
                if src is not dst:
                    dst["characteristics"].append(src["characteristics"].pop(0))
    return taxonomy_from_dict(doc)


@given(mutations())
def test_diff_matches_set_arithmetic_oracle(mutated):
    assert_diff_matches_oracle(small(), mutated)
    # and the mirror image: adds and removes swap roles
    forward = diff_taxonomies(small(), mutated)
    backward = diff_taxonomies(mutated, small())
    assert {e.id for e in forward.added} == {e.id for e in backward.removed}
    assert {e.id for e in forward.removed} == {e.id for e in backward.added}


# --- serialization --------------------------------------------------------------


def test_serialize_parse_round_trip():
    t = load_bundled_taxonomy()
    assert parse_taxonomy(serialize_taxonomy(t)) == t


def test_serialized_form_is_stable():
    t = small()
    assert serialize_taxonomy(t) == serialize_taxonomy(parse_taxonomy(serialize_taxonomy(t)))


def test_parse_rejects_garbage():
    with pytest.raises((TaxonomyDataError, ValueError)):
        parse_taxonomy('{"version_label": "x"}')
