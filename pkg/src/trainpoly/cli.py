"""Command line interface: ``trainpoly COMMAND MAP [options]``."""
from __future__ import annotations

import json
import math
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import click

from . import graphcore, marking, mcpoly, spectral, stallings, twisted
from .cones import cones_equal, contains, fried_cone, mcmullen_cone
from .fixtures import random_train_track_map

SCHEMA = "trainpoly/1"

EXIT_OK, EXIT_VALIDATION, EXIT_IDENTITY = 0, 2, 3


class StageError(Exception):
    def __init__(self, stage: str, message: str, code: int = EXIT_VALIDATION, detail=None):
        super().__init__(message)
        self.stage, self.message, self.code, self.detail = stage, message, code, detail


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "tolist"):
        return v.tolist()
    return v


@dataclass
class Session:
    """Lazily built pipeline stages for one input map."""
    raw: dict
    root: str | None
    tree: list[str] | None
    classes_file: str | None
    coords_file: str | None
    tol: float
    corrupt_gauge: bool = False

    @cached_property
    def graph_map(self) -> graphcore.GraphMap:
        try:
            g = graphcore.graph_map_from_dict(self.raw)
        except (KeyError, TypeError, ValueError) as exc:
            raise StageError("parse", f"cannot read graph map: {exc}") from exc
        problems = graphcore.validate_graph_map(g)
        if problems:
            raise StageError("validate", "; ".join(map(str, problems)),
                             detail=[str(p) for p in problems])
        return g

    @cached_property
    def marked(self) -> marking.MarkedAbelianization:
        root = self.root or self.raw.get("root")
        tree = self.tree if self.tree is not None else self.raw.get("tree")
        try:
            return marking.mark(self.graph_map, root=root, tree=tree)
        except marking.MarkingError as exc:
            raise StageError("mark", str(exc)) from exc

    @cached_property
    def labels(self) -> twisted.LabeledTransitionGraph:
        L = twisted.build_labels(self.marked)
        if self.corrupt_gauge:
            if L.b < 2:
                raise StageError("labels", "gauge corruption needs b >= 2")
            shift = (1,) + (0,) * (L.b - 2)
            L = twisted.perturb_label(L, 0, shift)
        return L

    @cached_property
    def classes(self) -> dict[str, marking.CohomologyClass]:
        if not self.classes_file:
            return {}
        with open(self.classes_file) as fh:
            data = json.load(fh)
        out = {}
        for d in data:
            u = marking.class_from_dict(d)
            out[u.name] = u
        return out

    def cls(self, name: str) -> marking.CohomologyClass:
        if name not in self.classes:
            raise StageError("classes", f"unknown class {name!r}")
        u = self.classes[name]
        try:
            marking.require_class(self.marked, u)
        except marking.ClassError as exc:
            raise StageError("classes", str(exc)) from exc
        return u

    @cached_property
    def coord_names(self) -> list[str]:
        if not self.coords_file:
            return []
        with open(self.coords_file) as fh:
            return list(json.load(fh))

    @cached_property
    def coords(self) -> marking.CoordinateSystem:
        if not self.coord_names:
            return marking.internal_coordinates(self.marked.b)
        try:
            return marking.make_coordinates(self.marked, [self.cls(n) for n in self.coord_names])
        except marking.ClassError as exc:
            raise StageError("coordinates", str(exc)) from exc

    def covector(self, name: str) -> tuple:
        return self.coords.covector(marking.class_on_H(self.marked, self.cls(name)))

    @cached_property
    def circuits(self):
        return twisted.circuits(self.labels)

    @cached_property
    def polynomial(self):
        return mcpoly.mcmullen_det(self.labels, self.coords)

    def provenance(self, **extra) -> dict:
        m = self.marked
        return {"root": m.root, "tree": list(m.tree), "coordinates": list(self.coords.names), **extra}

    @cached_property
    def fried(self):
        classes = [self.coords.point(twisted.orbit_class(self.labels, y, check=False)[0])
                   for y in self.circuits]
        return fried_cone(classes, self.marked.b, self.coords.names)

    @cached_property
    def mcmullen(self):
        return mcmullen_cone(self.polynomial, self.coords.names)


# --------------------------------------------------------------------------
# report builders

def validate_report(s: Session) -> dict:
    g = s.graph_map
    tt = graphcore.is_train_track(g)
    irreducible = graphcore.is_irreducible(g)
    report = {"valid": True, "irreducible": irreducible,
              "expanding": irreducible and graphcore.is_expanding(g),
              "train_track": tt.ok,
              "transition_matrix": graphcore.transition_matrix(g)}
    if not tt.ok:
        turn, k, _ = tt.witness
        report["offending_turn"] = {"turn": [list(d) for d in turn], "iterate": k}
    return report


def polynomial_report(s: Session, route: str) -> dict:
    out = {"provenance": s.provenance(route=route)}
    polys = {}
    if route in ("det", "both"):
        polys["det"] = s.polynomial
    if route in ("cycle", "both"):
        polys["cycle"] = mcpoly.mcmullen_cycle(s.labels, s.coords)
    first = next(iter(polys.values()))
    out["polynomial"] = first.to_dict(s.coords.names)
    out["text"] = first.format(s.coords.names)
    if route == "both":
        agree = polys["det"] == polys["cycle"]
        out["routes_agree"] = agree
        if not agree:
            raise StageError("polynomial", "determinant and cycle routes disagree", EXIT_IDENTITY,
                             {k: p.format(s.coords.names) for k, p in polys.items()})
    return out


def orbits_report(s: Session) -> dict:
    L = s.labels
    rows = []
    broken = []
    for y in s.circuits:
        cls, p = twisted.orbit_class(L, y, check=False)
        ok = cls == tuple(-v for v in p) + (len(y),)
        rows.append({"nodes": list(y.nodes), "arcs": list(y.arcs), "length": len(y),
                     "p_exponent": list(s.coords.point(p + (0,))),
                     "orbit_class": list(s.coords.point(cls)), "orbit_identity": ok})
        if not ok:
            broken.append(rows[-1])
    if broken:
        raise StageError("orbits", "orbit classes differ from p_y^-1 x^|y|", EXIT_IDENTITY, broken)
    return {"coordinates": list(s.coords.names), "circuits": rows, "count": len(rows)}


def cones_report(s: Session, check_equal: bool) -> dict:
    out = {"mcmullen": s.mcmullen.to_dict(), "fried": s.fried.to_dict()}
    if check_equal:
        cmp = cones_equal(s.mcmullen, s.fried)
        out["equal"] = cmp.equal
        if not cmp.equal:
            detail = {"witness": list(cmp.witness()),
                      "hint": "either the labels are not a coboundary gauge of the true ones "
                              "or the input is not an expanding irreducible train track map"}
            raise StageError("cones", "McMullen and Fried cones differ", EXIT_IDENTITY, detail)
        out["certificate"] = [
            {"inequality": list(i.inequality), "multipliers": [str(x) for x in i.multipliers]}
            for i in cmp.first_in_second + cmp.second_in_first]
    return out


def specialize_report(s: Session, name: str) -> dict:
    u = s.covector(name)
    q = spectral.specialize(s.polynomial, u)
    root = spectral.largest_real_root(q, s.tol)
    return {"class": name, "covector": list(u), "specialization": q.to_dict(["zeta"]),
            "text": q.format(["zeta"]),
            "largest_root": {"value": root, "tolerance": s.tol, "route": "sturm"}}


def _in_cone(s: Session, name: str):
    u = s.covector(name)
    if not contains(s.fried, u):
        raise StageError("entropy", f"class {name} = {tuple(u)} lies outside the cone")
    return u


def entropy_report(s: Session, name: str, samples: int = 0) -> dict:
    u = _in_cone(s, name)
    res = spectral.entropy_details(s.labels, u, s.coords, s.tol, s.fried)
    out = {"class": name, "covector": list(u),
           "value": res.value, "tolerance": s.tol, "route": "pf-level-set",
           "residuals": {"pf": res.residual},
           "bracket": list(res.bracket), "multiple_sign_changes": res.multiple_sign_changes}
    if samples:
        F = spectral.level_function(s.labels, s.coords.covector_to_internal(u), s.tol)
        qs = [res.bracket[1] * (k + 1) / samples for k in range(samples)]
        out["samples"] = [[q, F(q)[0]] for q in qs]
    return out


def stretch_report(s: Session, name: str) -> dict:
    u = _in_cone(s, name)
    if any(Fraction(v).denominator != 1 for v in u):
        raise StageError("stretch", f"class {name} is not integral")
    h = spectral.entropy(s.labels, u, s.coords, s.tol, s.fried)
    via_pf = math.exp(h)
    via_root = spectral.largest_real_root(spectral.specialize(s.polynomial, u), s.tol)
    return {"class": name, "covector": list(u), "value": via_pf, "tolerance": s.tol,
            "route": "pf-level-set", "cross_check": {"route": "sturm", "value": via_root},
            "residuals": {"routes": abs(via_pf - via_root)}}


def subdivide_report(s: Session, point: str) -> dict:
    edge, *positions = point.split(":")
    try:
        pt = graphcore.PeriodicPoint(edge, tuple(int(p) for p in positions))
        g2, orbit = graphcore.subdivide_at_invariant_set(s.graph_map, [pt])
    except (graphcore.OrbitError, ValueError, KeyError) as exc:
        raise StageError("subdivide", str(exc)) from exc
    L = s.labels
    B = twisted.subdivision_factor(L, orbit)
    chars = ([s.cls(n) for n in s.coord_names] if s.coord_names
             else marking.internal_characters(s.marked))
    chk = mcpoly.check_subdivision(s.marked, L, g2, orbit, B, chars, raise_on_failure=False)
    names = s.coords.names
    out = {"point": point, "orbit": [{"edge": p.edge, "coordinate": str(p.coord), "sign": p.sign}
                                     for p in orbit.points],
           "B": [[mcpoly.to_coordinates(x, s.coords).format(names) for x in row] for row in B],
           "factor": chk.factor.format(names), "subdivided_polynomial": chk.after.format(names),
           "product": chk.before.format(names), "identity_holds": chk.ok,
           "subdivided_map": graphcore.graph_map_to_dict(g2)}
    if not chk.ok:
        raise StageError("subdivide", "subdivision identity fails", EXIT_IDENTITY, out)
    return out


def analyze_report(s: Session, check: bool) -> dict:
    report = {"validate": validate_report(s)}
    report["polynomial"] = polynomial_report(s, "both" if check else "det")
    report["cones"] = cones_report(s, True)
    report["orbits"] = orbits_report(s)
    per_class = {}
    for name in s.classes:
        if name in s.coord_names:
            continue
        entry = {}
        u = s.covector(name)
        entry["covector"] = list(u)
        entry["in_cone"] = contains(s.fried, u)
        if entry["in_cone"] and all(Fraction(v).denominator == 1 for v in u):
            entry["specialize"] = specialize_report(s, name)
            entry["stretch"] = stretch_report(s, name)
        if entry["in_cone"]:
            entry["entropy"] = entropy_report(s, name)
        per_class[name] = entry
    report["classes"] = per_class
    return report


def endo_report(path: str) -> dict:
    with open(path) as fh:
        e = stallings.endo_from_dict(json.load(fh))
    idx, ranks = stallings.stable_image_index(e)
    return {"rank": e.rank, "image_rank": stallings.image_rank(e),
            "injective": stallings.is_injective(e), "surjective": stallings.is_surjective(e),
            "stable_index": idx, "rank_sequence": ranks}


# --------------------------------------------------------------------------
# output

def emit(command: str, payload: dict, as_json: bool) -> None:
    if as_json:
        doc = {"schema": SCHEMA, "command": command, "result": _jsonable(payload)}
        click.echo(json.dumps(doc, sort_keys=True, indent=2))
        return
    for line in _text_lines(payload):
        click.echo(line)


def _text_lines(payload, prefix=""):
    if isinstance(payload, dict):
        for k in sorted(payload):
            v = payload[k]
            if isinstance(v, (dict, list)) and v and not _flat(v):
                yield f"{prefix}{k}:"
                yield from _text_lines(v, prefix + "  ")
            else:
                yield f"{prefix}{k}: {_short(v)}"
    elif isinstance(payload, list):
        for v in payload:
            if isinstance(v, (dict, list)) and not _flat(v):
                yield f"{prefix}-"
                yield from _text_lines(v, prefix + "  ")
            else:
                yield f"{prefix}- {_short(v)}"


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _short(v) -> str:
    return json.dumps(_jsonable(v), sort_keys=True)


def fail(command: str, err: StageError, as_json: bool) -> None:
    if as_json:
        doc = {"schema": SCHEMA, "command": command,
               "error": {"stage": err.stage, "message": err.message, "detail": _jsonable(err.detail)}}
        click.echo(json.dumps(doc, sort_keys=True, indent=2))
    else:
        click.echo(f"[{err.stage}] {err.message}", err=True)
        if err.detail is not None:
            click.echo(json.dumps(_jsonable(err.detail), sort_keys=True, indent=2), err=True)
    sys.exit(err.code)


# --------------------------------------------------------------------------
# commands

def map_options(fn):
    opts = [
        click.argument("map_file", required=False, type=click.Path(exists=True, dir_okay=False)),
        click.option("--root", default=None, help="Basepoint vertex."),
        click.option("--tree", default=None, help="Comma-separated spanning tree edges."),
        click.option("--classes", "classes_file", default=None, type=click.Path(exists=True),
                     help="JSON list of cohomology classes."),
        click.option("--coords", "coords_file", default=None, type=click.Path(exists=True),
                     help="JSON list of class names used as coordinates."),
        click.option("--tol", default=spectral.DEFAULT_TOL, show_default=True, type=float),
        click.option("--json", "as_json", is_flag=True, help="Emit versioned JSON."),
        click.option("--seed", default=None, type=int,
                     help="Use a seeded random train track map instead of MAP_FILE."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def make_session(map_file, root, tree, classes_file, coords_file, tol, seed, corrupt=False) -> Session:
    if map_file:
        with open(map_file) as fh:
            raw = json.load(fh)
    elif seed is not None:
        raw = graphcore.graph_map_to_dict(random_train_track_map(random.Random(seed)))
    else:
        raise click.UsageError("give MAP_FILE or --seed")
    tree_list = [t for t in tree.split(",") if t] if tree is not None else None
    return Session(raw, root, tree_list, classes_file, coords_file, tol, corrupt)


def run(command: str, as_json: bool, build) -> None:
    try:
        payload = build()
    except StageError as err:
        fail(command, err, as_json)
    except (marking.ClassError, spectral.SpectralError) as exc:
        fail(command, StageError(command, str(exc)), as_json)
    except AssertionError as exc:
        fail(command, StageError(command, str(exc), EXIT_IDENTITY), as_json)
    emit(command, payload, as_json)


@click.group()
def main():
    """Twisted transition polynomials of train track maps."""


@main.command()
@map_options
def validate(map_file, root, tree, classes_file, coords_file, tol, as_json, seed):
    """Check a graph map and its train track property."""
    s = make_session(map_file, root, tree, classes_file, coords_file, tol, seed)

    def build():
        rep = validate_report(s)
        if not (rep["irreducible"] and rep["expanding"] and rep["train_track"]):
            raise StageError("validate", "not an expanding irreducible train track map", detail=rep)
        return rep
    run("validate", as_json, build)


@main.command()
@map_options
@click.option("--route", type=click.Choice(["det", "cycle", "both"]), default="det", show_default=True)
def polynomial(map_file, root, tree, classes_file, coords_file, tol, as_json, seed, route):
    """The polynomial in the chosen coordinates."""
    s = make_session(map_file, root, tree, classes_file, coords_file, tol, seed)
    run("polynomial", as_json, lambda: polynomial_report(s, route))


@main.command()
@map_options
def orbits(map_file, root, tree, classes_file, coords_file, tol, as_json, seed):
    """Circuits of the transition graph with their orbit classes."""
    s = make_session(map_file, root, tree, classes_file, coords_file, tol, seed)
    run("orbits", as_json, lambda: orbits_report(s))


@main.command()
@map_options
@click.option("--check-equal", is_flag=True, help="Decide equality of the two cones exactly.")
@click.option("--corrupt-gauge", is_flag=True, hidden=True)
def cones(map_file, root, tree, classes_file, coords_file, tol, as_json, seed, check_equal, corrupt_gauge):
    """Polynomial cone and orbit cone."""
    s = make_session(map_file, root, tree, classes_file, coords_file, tol, seed, corrupt_gauge)
    run("cones", as_json, lambda: cones_report(s, check_equal))


def _class_command(name, builder, doc, extra=()):
    @map_options
    @click.option("--class", "class_name", required=True)
    def cmd(map_file, root, tree, classes_file, coords_file, tol, as_json, seed, class_name, **kw):
        s = make_session(map_file, root, tree, classes_file, coords_file, tol, seed)
        run(name, as_json, lambda: builder(s, class_name, **kw))
    cmd.__doc__ = doc
    for opt in extra:
        cmd = opt(cmd)
    main.command(name)(cmd)


_class_command("specialize", specialize_report, "One-variable specialization at a class.")
_class_command("stretch", stretch_report, "Stretch factor of an integral class.")
_class_command("entropy", entropy_report, "Entropy function at a class.",
               [click.option("--samples", default=0, type=int, help="Also sample the level function.")])


@main.command()
@map_options
@click.option("--point", required=True, help="EDGE:POS[:POS...] occurrence chain of a periodic point.")
def subdivide(map_file, root, tree, classes_file, coords_file, tol, as_json, seed, point):
    """Subdivide at a periodic orbit and check the factorization."""
    s = make_session(map_file, root, tree, classes_file, coords_file, tol, seed)
    run("subdivide", as_json, lambda: subdivide_report(s, point))


@main.command()
@map_options
@click.option("--check/--no-check", default=True, help="Compute both polynomial routes.")
@click.option("--corrupt-gauge", is_flag=True, hidden=True)
def analyze(map_file, root, tree, classes_file, coords_file, tol, as_json, seed, check, corrupt_gauge):
    """Full pipeline report."""
    s = make_session(map_file, root, tree, classes_file, coords_file, tol, seed, corrupt_gauge)
    run("analyze", as_json, lambda: analyze_report(s, check))


@main.group()
def endo():
    """Free group endomorphisms."""


@endo.command("analyze")
@click.argument("endo_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
def endo_analyze(endo_file, as_json):
    """Rank, injectivity, surjectivity and stable image index."""
    run("endo analyze", as_json, lambda: endo_report(endo_file))


if __name__ == "__main__":  # pragma: no cover
    main()
