"""Smoke test for the projsym Python extension.

Build and install first:  pip install --no-build-isolation -e crates/python
"""

import json

import projsym


def main() -> None:
    e = projsym.Expr("sin(x)^2 + cos(x)^2", ["x", "y"])
    assert e == projsym.Expr("1", ["x", "y"]), str(e)
    f = projsym.Expr("x^2*exp(k*y)", ["x", "y"], {"k": "1/2"})
    assert str(f.diff("y")) == str(projsym.Expr("x^2*exp(y/2)/2", ["x", "y"])), str(f.diff("y"))
    assert abs(float(projsym.Expr("x/y", ["x", "y"]).evaluate(["1", "4"])) - 0.25) < 1e-12
    try:
        projsym.Expr("x +", ["x"])
    except ValueError:
        pass
    else:
        raise AssertionError("malformed expression accepted")

    g = projsym.Geometry.metric(["x", "y", "z"], [["0", "1", "0"], ["1", "z^2", "0"], ["0", "0", "1"]])
    assert g.christoffel()[0][1][2] == "z"
    assert g.signature() == (2, 1)

    sphere = projsym.Geometry.metric(["t", "p"], [["1", "0"], ["0", "sin(t)^2"]])
    assert sphere.curvature_flags()["constant_curvature"] == "1"
    assert sphere.classify(["0", "1"])["kind"] == "Killing"

    plane = projsym.Geometry.metric(["x", "y"], [["1", "0"], ["0", "1"]])
    report = plane.analyze(kinds=["projective", "affine"])
    assert (report["dim_projective"], report["dim_affine"]) == (8, 6), report

    egorov = projsym.Geometry.model("egorov_connection")
    assert not egorov.is_metric
    assert egorov.analyze(kinds=["projective"])["dim_projective"] == 8

    again = projsym.Geometry.from_json(projsym.Geometry.model("metric_2d").to_json())
    assert again.analyze(kinds=["projective"])["dim_projective"] == 3
    assert len(again.geodesic_ode()) == 4

    names = [m["name"] for m in projsym.list_models()]
    assert "pp_wave_split" in names and len(names) == 12
    v = projsym.verify_model("pp_wave_lorentz", n=4)
    assert v["ok"], json.dumps(v)[:400]
    assert not projsym.verify_model("kruckovic1")["ok"]

    rows = projsym.gap_rows(9, "projective")
    assert [r["delta2"] for r in rows] == [0, 2, 1, 2, 3, 4, 5, 6]
    assert projsym.gap_table(9, "affine").startswith("\\begin{tabular}")
    print("smoke test passed")


if __name__ == "__main__":
    main()
