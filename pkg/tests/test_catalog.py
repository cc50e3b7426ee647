import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from concirc import expr as ex
from concirc.catalog import (
    BUILTINS,
    AsymmetricMetric,
    InvalidCount,
    SchemaError,
    UnknownEntry,
    UnsupportedDimension,
    builtin,
    describe,
    load_manifest,
    sample_points,
    suites_for,
)
from concirc.expr import ParseError
from concirc.geometry import ManifoldInstance, PointGeometry, SingularMetric
from concirc.jet import coordinate_jets, finite_difference_oracle
from concirc.verify import Tolerances, quasi_einstein_fit, run_suites


def all_entries():
    return [builtin(name, n) for name, info in BUILTINS.items() for n in info.dims]


def minkowski_manifest(**changes):
    doc = {
        "name": "my_minkowski",
        "dimension": 4,
        "coordinates": ["t", "x1", "x2", "x3"],
        "metric": [
            ["-1", "0", "0", "0"],
            ["0", "1", "0", "0"],
            ["0", "0", "1", "0"],
            ["0", "0", "0", "1"],
        ],
        "pi": ["0", "0", "0", "0"],
        "omega": "0",
        "sampling_box": [[-1, 1]] * 4,
    }
    doc.update(changes)
    return doc


class TestBuiltins:
    def test_names(self):
        assert set(BUILTINS) == {
            "minkowski", "de_sitter_grw", "closed_grw", "sphere_concircular",
            "cylinder_concircular", "flat_affine", "kottler",
        }

    def test_unknown_and_unsupported(self):
        with pytest.raises(UnknownEntry):
            builtin("anti_de_sitter")
        with pytest.raises(UnsupportedDimension):
            builtin("kottler", 5)
        with pytest.raises(UnsupportedDimension):
            builtin("cylinder_concircular", 4)

    def test_default_dimensions(self):
        assert builtin("de_sitter_grw").dim == 4
        assert builtin("sphere_concircular").dim == 3

    def test_de_sitter_unit_generator_and_concircular(self):
        entry = builtin("de_sitter_grw", 4)
        for x in sample_points(entry, 32, 3):
            pg = PointGeometry(entry.instance, x)
            assert_allclose(pg.piP, -1.0, atol=1e-12)
            assert np.linalg.norm(pg.concircular_residual(omega=1.0)) < 1e-11

    def test_sphere_concircular(self):
        entry = builtin("sphere_concircular", 3)
        for x in sample_points(entry, 32, 4):
            assert np.linalg.norm(PointGeometry(entry.instance, x).concircular_residual()) < 1e-11

    @pytest.mark.parametrize("entry", [e for e in all_entries() if e.flags.supports_general_suite],
                             ids=lambda e: f"{e.name}{e.dim}")
    def test_general_entries_are_concircular(self, entry):
        for x in sample_points(entry, 16, 5):
            assert np.linalg.norm(PointGeometry(entry.instance, x).concircular_residual()) < 1e-10

    @pytest.mark.parametrize("entry", [e for e in all_entries() if e.flags.is_grw], ids=lambda e: f"{e.name}{e.dim}")
    def test_grw_generator_is_unit_timelike(self, entry):
        for x in sample_points(entry, 16, 6):
            pg = PointGeometry(entry.instance, x)
            assert_allclose(pg.P @ pg.g @ pg.P, -1.0, atol=1e-12)

    def test_closed_grw_perfect_fluid_coefficients(self):
        entry = builtin("closed_grw", 4)
        for x in sample_points(entry, 16, 7):
            pg = PointGeometry(entry.instance, x)
            e = np.exp(-2 * x[0])
            want = (3 + 2 * e) * pg.g + 2 * e * pg.Pi
            assert np.linalg.norm(pg.Ric["g"] - want) < 1e-9
            a, b, _ = quasi_einstein_fit(pg.Ric["g"], pg.g, pg.pi)
            assert_allclose(a - b, 3.0, atol=1e-9)

    def test_closed_grw_at_zero_time(self):
        pg = PointGeometry(builtin("closed_grw", 4).instance, [0.0, 1.0, 1.3, 0.8])
        a, b, _ = quasi_einstein_fit(pg.Ric["g"], pg.g, pg.pi)
        assert_allclose([a, b], [5.0, 2.0], atol=1e-10)

    def test_kottler_einstein_constant(self):
        entry = builtin("kottler")
        lam = entry.flags.einstein_constant
        assert lam == 0.03
        for x in sample_points(entry, 8, 8):
            pg = PointGeometry(entry.instance, x)
            assert np.linalg.norm(pg.Ric["g"] - lam * pg.g) < 1e-12

    def test_kottler_time_component_by_hand(self):
        m, lam, r = 1.0, 0.03, 4.2
        h = 1 - 2 * m / r - lam * r**2 / 3
        dh = 2 * m / r**2 - 2 * lam * r / 3
        d2h = -4 * m / r**3 - 2 * lam / 3
        # static spherical metric: Ric_tt = h (h''/2 + h'/r)
        ric_tt = h * (d2h / 2 + dh / r)
        pg = PointGeometry(builtin("kottler").instance, [0.0, r, 1.1, 2.0])
        assert_allclose(pg.Ric["g"][0, 0], ric_tt, rtol=1e-12)
        assert_allclose(ric_tt / pg.g[0, 0], lam, rtol=1e-12)

    def test_suite_lists(self):
        assert suites_for(builtin("de_sitter_grw", 4)) == ["general", "grw", "symmetry", "fluid", "efe", "stress"]
        assert suites_for(builtin("closed_grw", 3)) == ["general", "grw", "symmetry", "fluid"]
        assert suites_for(builtin("kottler")) == ["symmetry"]
        assert suites_for(builtin("cylinder_concircular")) == ["general"]

    def test_minkowski_timelike_option(self):
        entry = builtin("minkowski", 4, timelike_pi=True)
        pg = PointGeometry(entry.instance, [0.0, 0.1, 0.2, 0.3])
        assert_allclose(pg.pi, [-1.0, 0, 0, 0])
        assert not entry.flags.is_grw

    def test_describe(self):
        row = describe("closed_grw")
        assert row["dims"] == [3, 4, 5, 6]
        assert row["omega"] == 1.0
        assert "grw" in row["suites"]


class TestExpressions:
    @pytest.mark.parametrize("entry", all_entries(), ids=lambda e: f"{e.name}{e.dim}")
    def test_jets_agree_with_finite_differences(self, entry):
        inst = entry.instance
        exprs = [e for row in inst.metric for e in row] + list(inst.pi) + [inst.omega]
        exprs = [e for e in exprs if ex.has_coordinates(e)]
        worst_grad = worst_hess = 0.0
        for x in sample_points(entry, 32, 9):
            coords = coordinate_jets(x)
            for e in exprs:
                jet = ex.evaluate(e, coords)
                fd = finite_difference_oracle(lambda p: ex.evaluate_float(e, p), x, h=1e-4)
                worst_grad = max(worst_grad, np.max(np.abs(jet.grad - fd.grad)) / (1 + np.max(np.abs(jet.grad))))
                worst_hess = max(worst_hess, np.max(np.abs(jet.hess - fd.hess)) / (1 + np.max(np.abs(jet.hess))))
        assert worst_grad < 1e-6
        assert worst_hess < 1e-4

    @pytest.mark.parametrize("entry", all_entries(), ids=lambda e: f"{e.name}{e.dim}")
    def test_print_parse_round_trip(self, entry):
        inst = entry.instance
        names = inst.coordinate_names
        for e in [e for row in inst.metric for e in row] + list(inst.pi) + [inst.omega]:
            assert ex.parse(ex.to_text(e), names) == e


class TestSampling:
    def test_deterministic(self):
        inst = ManifoldInstance.from_strings(["x", "y"], [["1", "0"], ["0", "1"]], ["0", "0"], "0", [(0, 1), (0, 1)])
        a = sample_points(inst, 2, 42)
        b = sample_points(inst, 2, 42)
        assert a.shape == (2, 2)
        assert_allclose(a, b, rtol=0, atol=0)
        assert not np.array_equal(a, sample_points(inst, 2, 43))

    def test_invalid_count(self):
        with pytest.raises(InvalidCount):
            sample_points(builtin("minkowski"), 0, 1)

    @pytest.mark.parametrize("entry", all_entries(), ids=lambda e: f"{e.name}{e.dim}")
    def test_box_respected(self, entry):
        pts = sample_points(entry, 64, 10)
        box = np.array(entry.instance.sampling_box)
        assert np.all(pts >= box[:, 0]) and np.all(pts <= box[:, 1])


class TestManifest:
    def test_minkowski_round_trip(self):
        entry = load_manifest(minkowski_manifest())
        ref = builtin("minkowski", 4)
        assert entry.flags.is_einstein and not entry.flags.is_grw
        assert entry.flags.supports_general_suite and entry.flags.supports_weyl_suite
        pts = sample_points(ref, 8, 1)
        tol = Tolerances()
        mine = run_suites(entry, ["general", "symmetry"], pts, 1, tol, 1.0)
        theirs = run_suites(ref, ["general", "symmetry"], pts, 1, tol, 1.0)
        assert [r.to_dict() for r in mine] == [r.to_dict() for r in theirs]

    def test_text_and_path_sources(self, tmp_path):
        text = json.dumps(minkowski_manifest())
        path = tmp_path / "m.json"
        path.write_text(text)
        assert load_manifest(text).name == "my_minkowski"
        assert load_manifest(str(path)).dim == 4
        assert load_manifest(path).dim == 4

    def test_grw_flags_probed(self):
        doc = minkowski_manifest(
            name="ds",
            metric=[["-1", "0", "0", "0"], ["0", "exp(2*t)", "0", "0"], ["0", "0", "exp(2*t)", "0"], ["0", "0", "0", "exp(2*t)"]],
            pi=["-1", "0", "0", "0"],
            omega="1",
        )
        f = load_manifest(doc).flags
        assert f.is_grw and f.is_perfect_fluid and f.is_einstein
        assert_allclose(f.einstein_constant, 3.0)

    def test_asymmetric_metric(self):
        doc = minkowski_manifest()
        doc["metric"] = [row[:] for row in doc["metric"]]
        doc["metric"][0][1] = "0.5"
        with pytest.raises(AsymmetricMetric):
            load_manifest(doc)

    def test_dimension_two(self):
        doc = minkowski_manifest(dimension=2, coordinates=["t", "x"], metric=[["-1", "0"], ["0", "1"]],
                                 pi=["0", "0"], sampling_box=[[-1, 1], [-1, 1]])
        with pytest.raises(SchemaError):
            load_manifest(doc)

    @pytest.mark.parametrize("change", [
        {"colour": "blue"},
        {"dimension": "4"},
        {"pi": ["0", "0"]},
        {"sampling_box": [[1, -1]] * 4},
        {"flags": {"is_magic": True}},
        {"coordinates": ["t", "x", "x", "2y"]},
    ])
    def test_schema_errors(self, change):
        with pytest.raises(SchemaError):
            load_manifest(minkowski_manifest(**change))

    def test_missing_key(self):
        doc = minkowski_manifest()
        del doc["omega"]
        with pytest.raises(SchemaError):
            load_manifest(doc)

    def test_invalid_json(self):
        with pytest.raises(SchemaError):
            load_manifest("{not json")

    def test_parse_error_surfaces(self):
        with pytest.raises(ParseError):
            load_manifest(minkowski_manifest(omega="1 +"))

    def test_singular_metric(self):
        doc = minkowski_manifest(metric=[["0", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]])
        with pytest.raises(SingularMetric):
            load_manifest(doc)

    def test_given_flags_override(self):
        entry = load_manifest(minkowski_manifest(flags={"supports_weyl_suite": False}))
        assert not entry.flags.supports_weyl_suite
