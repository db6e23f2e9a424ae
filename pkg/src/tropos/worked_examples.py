"""Built-in worked examples with stored reference values, and the regression driver."""

from __future__ import annotations

from dataclasses import dataclass, field

from .abelian import Presentation, abelianize, parse_presentation
from .alexander import (
    BnsFixture,
    audit_inclusion,
    augmentation_type,
    bnsr_upper_bound,
    dwyer_fried_test,
    fox_matrix,
    presentation_complex,
    relator_for_polynomial,
    jump_ideal,
)
from .catalog import OrbifoldData, orbifold_presentation, orbifold_report
from .laurent import LaurentPoly, Valuation, divides, parse_poly
from .polyhedra import UNKNOWN, Constraint, Polyhedron, unions_equal
from .sphere import SphericalSet
from .tropical import (
    sphere_project,
    trop_hypersurface_Z,
    trop_hypersurface_field,
)

BS12 = "name: BS(1,2)\ngens: a b\nrel: a b a^-1 b^-2\n"
TWO_ARCS = ("name: two-generator one-relator group with two-arc invariant\n"
         "gens: a b\n"
         "rel: a^-1 b^-1 a b^2 a^-1 b^-1 a^2 b^-1 a^-1 b a^-1 b a b^-1\n")
PANEL_POLY = "x1 + x2 - 2"
ORBIFOLD_23 = OrbifoldData(1, (2, 3))


def presentations() -> dict[str, Presentation]:
    f = parse_poly(PANEL_POLY)
    realized = Presentation(("a", "b"), (relator_for_polynomial(f),), name="relator realizing x1 + x2 - 2")
    return {
        "bs12": parse_presentation(BS12),
        "two-arcs": parse_presentation(TWO_ARCS),
        "poly-relator": realized,
        "orbifold-1-23": orbifold_presentation(ORBIFOLD_23),
    }


def fixtures() -> list[BnsFixture]:
    return [
        BnsFixture("bs12", SphericalSet.points([(-1,)]), "BS(1,2): Sigma^1 = {-chi}"),
        BnsFixture(
            "two-arcs",
            SphericalSet.arc((1, 0), (0, 1), False, False) | SphericalSet.arc((0, 1), (-1, -1), False, False),
            "open arcs (1,0)->(0,1) and (0,1)->(-1,-1)",
        ),
        BnsFixture("orbifold-1-23", SphericalSet.empty(2), "orbifold group, chi^orb < 0: Sigma^1 empty"),
    ]


# ---------------------------------------------------------------------------
# expected planar geometry for x1 + x2 - 2


def _ray(d):
    a, b = d
    return Polyhedron(2, [Constraint.make((-b, a), 0, "eq"), Constraint.make((a, b), 0, "ge")])


def _shifted_ray(origin, d):
    a, b = d
    x, y = origin
    return Polyhedron(2, [Constraint.make((-b, a), -b * x + a * y, "eq"),
                          Constraint.make((a, b), a * x + b * y, "ge")])


PANEL_EXPECTED = {
    "a": [_ray((0, 1)), _ray((1, 0)), _ray((-1, -1))],
    "b": [Polyhedron(2, [Constraint.make((1, -1), 0, "eq")])],
    "c": [_shifted_ray((1, 1), (0, 1)), _shifted_ray((1, 1), (1, 0)), _shifted_ray((1, 1), (-1, -1))],
    "d": [_ray((0, 1)), _ray((1, 0)), _ray((-1, -1)),
          Polyhedron(2, [Constraint.make((1, 0), 0, "ge"), Constraint.make((0, 1), 0, "ge")])],
}
PANEL_SPHERE_E = SphericalSet.points([(0, 1), (1, 0), (-1, -1), (1, 1)])
PANEL_SPHERE_F = SphericalSet.points([(-1, -1)]) | SphericalSet.arc((1, 0), (0, 1))


def planar_panels():
    """The four planar regions and two circle sets for ``x1 + x2 - 2``."""
    f = parse_poly(PANEL_POLY)
    R = {
        "a": trop_hypersurface_field(f, Valuation.trivial()),
        "b": trop_hypersurface_field(f, Valuation.modp(2)),
        "c": trop_hypersurface_field(f, Valuation.padic(2)),
        "d": trop_hypersurface_Z(f),
    }
    S = {
        "e": sphere_project(R["a"]) | sphere_project(R["b"]),
        "f": sphere_project(R["d"]),
        "abc": sphere_project(R["a"]) | sphere_project(R["b"]) | sphere_project(R["c"]),
    }
    return R, S


# ---------------------------------------------------------------------------
# regression driver


@dataclass
class Item:
    name: str
    ok: bool
    detail: str
    figures: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "PASS" if self.ok else "FAIL"


def _tri(x) -> str:
    return "unknown" if x is UNKNOWN else str(x).lower()


def _panel_items() -> list[Item]:
    R, S = planar_panels()
    items = []
    for k in "abcd":
        same = unions_equal(2, R[k].polyhedra, PANEL_EXPECTED[k])
        items.append(Item(f"panel-{k}", same is True, f"region matches stored geometry: {_tri(same)}",
                          {f"panel-{k}": R[k]}))
    e_ok = S["e"].equals(PANEL_SPHERE_E)
    items.append(Item("panel-e", e_ok is True, f"sphere union of (a),(b) = {S['e'].describe()}", {"panel-e": S["e"]}))
    f_ok = S["f"].equals(PANEL_SPHERE_F) is True and S["f"].equals(S["abc"]) is True
    items.append(Item("panel-f", f_ok, f"S(Trop_Z) = {S['f'].describe()}; equals union of (a),(b),(c)",
                      {"panel-f": S["f"]}))
    return items


def _audit_item(name, fixture: BnsFixture, P: Presentation, want_strict) -> Item:
    B = bnsr_upper_bound(P)
    rep = audit_inclusion(fixture, B.complement, B.provenance)
    ok = rep.included is True and (want_strict is None or rep.strict == want_strict)
    detail = (f"bound complement {B.complement.describe()} [{B.provenance}]; "
              f"fixture {fixture.sigma.describe()}; included={_tri(rep.included)} strict={_tri(rep.strict)}")
    return Item(name, ok, detail, {f"{name}-bound": B.complement, f"{name}-fixture": fixture.sigma})


def run_examples() -> list[Item]:
    P = presentations()
    F = {fx.presentation_id: fx for fx in fixtures()}
    items = _panel_items()

    # BS(1,2)
    bs = P["bs12"]
    ab = abelianize(bs)
    fox = fox_matrix(bs, ab)
    x = LaurentPoly.gens(ab.group)[0]
    fox_ok = fox[0][0].is_zero() and fox[1][0] == x - 2
    J = jump_ideal(presentation_complex(bs, ab), 1)
    princ_ok = J.principal_part == (x - 1) * (x - 2)
    items.append(Item("ex-bs12-fox", fox_ok and princ_ok,
                      f"d/db = {fox[1][0]}; J^1 principal part {J.principal_part}"))
    B = bnsr_upper_bound(bs)
    field_sphere = sphere_project(trop_hypersurface_field((x - 1) * (x - 2), Valuation.trivial()))
    items.append(Item("ex-bs12-trop", B.trop_sphere.equals(SphericalSet.points([(1,)])) is True
                      and field_sphere.is_empty() is True,
                      f"S(Trop_Z) = {B.trop_sphere.describe()}; over a field {field_sphere.describe()}"))
    items.append(_audit_item("ex-bs12-audit", F["bs12"], bs, False))

    # two open arcs
    two = P["two-arcs"]
    ab = abelianize(two)
    x1, x2 = LaurentPoly.gens(ab.group)
    fox = fox_matrix(two, ab)
    want = [(x2 ** -1 - 1) * (x1 ** -1 - 1), -(x1 ** -1) * (x2 ** -1) * (x1 - 1) ** 2]
    items.append(Item("ex-two-arcs-fox", [fox[0][0], fox[1][0]] == want,
                      f"Fox column ({fox[0][0]}, {fox[1][0]})"))
    B = bnsr_upper_bound(two)
    items.append(Item("ex-two-arcs-trop", B.trop_sphere.equals(SphericalSet.points([(0, 1), (0, -1)])) is True,
                      f"S(Trop_Z(J<=1)) = {B.trop_sphere.describe()} [{B.provenance}]"))
    items.append(_audit_item("ex-two-arcs-audit", F["two-arcs"], two, True))

    # polynomial relator
    pr = P["poly-relator"]
    ab = abelianize(pr)
    x1, x2 = LaurentPoly.gens(ab.group)
    f = parse_poly(PANEL_POLY, ab.group)
    fox = fox_matrix(pr, ab)
    col_ok = [fox[0][0], fox[1][0]] == [f * (x2 - 1), -f * (x1 - 1)]
    J = jump_ideal(presentation_complex(pr, ab), 1)
    dec_ok = J.principal_part is not None and divides(f, J.principal_part) and augmentation_type(J.residual)
    items.append(Item("ex-poly-relator-ideal", col_ok and dec_ok,
                      f"principal part {J.principal_part}; residual augmentation type: {augmentation_type(J.residual)}"))
    R, S = planar_panels()
    field_union = S["e"]
    strict = field_union.issubset(S["f"]) is True and field_union.equals(S["f"]) is False
    items.append(Item("ex-poly-relator-strict", strict,
                      f"{field_union.describe()} strictly inside {S['f'].describe()}",
                      {"poly-relator-fields": field_union, "poly-relator-z": S["f"]}))

    # orbifold group
    orb = P["orbifold-1-23"]
    rep = orbifold_report(ORBIFOLD_23, 0)
    items.append(Item("ex-orbifold-report", rep["sigma"] == "empty" and rep["case"] == "trivial",
                      f"case {rep['case']}; V1 {rep['V1']}; Trop {rep['trop']}; Sigma^1 {rep['sigma']}"))
    items.append(_audit_item("ex-orbifold-audit", F["orbifold-1-23"], orb, None))

    # Dwyer-Fried
    fx = parse_poly("x - 2")
    got = {ring: dwyer_fried_test([fx], ring) for ring in ("z", "q", "fp:3")}
    items.append(Item("ex-dwyer-fried", got == {"z": False, "q": True, "fp:3": True},
                      "finitely generated over " + ", ".join(f"{k}: {_tri(v)}" for k, v in got.items())))
    return items

