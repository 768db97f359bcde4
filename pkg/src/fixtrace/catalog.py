"""Fixture catalog: deterministic generators with embedded oracles.

Every entry builds its objects from scratch on each call, and carries
oracle data computed by an independent route (analytic fixed-point
counts on the circle, exact lattice enumeration on the torus, hand
counts for the small examples).  The oracles never call the code paths
they are used to check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple

from .bundles import (
    BundleSelfMapPair,
    DiscreteBundle,
    GraphBase,
    GraphSelfMap,
    Transport,
)
from .exactalg import IntMatrix
from .grouprings import (
    FreeAbelianGroup,
    GroupEndomorphism,
    GroupError,
    GroupRingElement,
    GroupRingMatrix,
)
from .reidemeister import (
    EquivariantChainComplex,
    FixedPointRecord,
    TwistedChainMap,
    fox_derivative,
)
from .simplicial import SimplicialComplex, SimplicialMap, build_complex


# ---------------------------------------------------------------------------
# Complexes
# ---------------------------------------------------------------------------

def point_complex() -> SimplicialComplex:
    return build_complex([("p",)], vertices=["p"])


def circle_complex(n: int = 3) -> SimplicialComplex:
    if n < 3:
        raise ValueError("a simplicial circle needs at least 3 vertices")
    verts = [str(i) for i in range(n)]
    return build_complex([(str(i), str((i + 1) % n)) for i in range(n)],
                         vertices=verts)


def figure_eight_complex() -> SimplicialComplex:
    verts = [str(i) for i in range(5)]
    edges = [("0", "1"), ("1", "2"), ("0", "2"), ("0", "3"), ("3", "4"),
             ("0", "4")]
    return build_complex(edges, vertices=verts)


def torus7_complex() -> SimplicialComplex:
    verts = [str(i) for i in range(7)]
    faces = []
    for i in range(7):
        faces.append(tuple(sorted((str(i), str((i + 1) % 7), str((i + 3) % 7)),
                                  key=int)))
        faces.append(tuple(sorted((str(i), str((i + 2) % 7), str((i + 3) % 7)),
                                  key=int)))
    return build_complex(faces, vertices=verts)


def two_point_complex() -> SimplicialComplex:
    return build_complex([("0",), ("1",)], vertices=["0", "1"])


# ---------------------------------------------------------------------------
# Simplicial self-map fixtures
# ---------------------------------------------------------------------------

@dataclass
class SelfMapFixture:
    complex: SimplicialComplex
    map: SimplicialMap
    basepath: List[Tuple[int, int]]
    oracle: Dict


def circle_reflection_fixture(n: int = 4) -> SelfMapFixture:
    """Reflection of an n-gon; two fixed points, each of index one."""
    if n % 2 or n < 4:
        raise ValueError("use an even n so the reflection fixes two vertices")
    k = circle_complex(n)
    f = SimplicialMap(k, k, {str(i): str((-i) % n) for i in range(n)})
    oracle = {
        "lefschetz": 2,
        "nielsen": 2,
        "coefficients": [1, 1],
        "note": "two transversal fixed points of a circle reflection, "
                "each of local index 1, in distinct path classes",
    }
    return SelfMapFixture(complex=k, map=f, basepath=[], oracle=oracle)


# ---------------------------------------------------------------------------
# Circle degree-d dynamics (graph base map and equivariant chain model)
# ---------------------------------------------------------------------------

def circle_base(n: int = 4) -> GraphBase:
    verts = [f"b{i}" for i in range(n)]
    edges = [(f"e{i}", f"b{i}", f"b{(i + 1) % n}") for i in range(n)]
    tree = [f"e{i}" for i in range(n - 1)]
    return GraphBase(verts, edges, tree, "b0")


def degree_base_map(base: GraphBase, d: int) -> GraphSelfMap:
    """Self-map of the circle graph inducing multiplication by d."""
    n = len(base.vertices)
    vertex_images = {f"b{k}": f"b{(d * k) % n}" for k in range(n)}
    edge_words = {}
    for k in range(n):
        start = (d * k) % n
        word = []
        if d > 0:
            for i in range(d):
                word.append((f"e{(start + i) % n}", 1))
        elif d < 0:
            for i in range(-d):
                word.append((f"e{(start - 1 - i) % n}", -1))
        edge_words[f"e{k}"] = word
    return GraphSelfMap(base, vertex_images, edge_words)


def rotation_base_map(base: GraphBase) -> GraphSelfMap:
    n = len(base.vertices)
    vertex_images = {f"b{k}": f"b{(k + 1) % n}" for k in range(n)}
    edge_words = {f"e{k}": [(f"e{(k + 1) % n}", 1)] for k in range(n)}
    return GraphSelfMap(base, vertex_images, edge_words)


def point_fiber_bundle(base: GraphBase) -> DiscreteBundle:
    fibers = {v: point_complex() for v in base.vertices}
    ident = SimplicialMap(point_complex(), point_complex(), {"p": "p"})
    transports = {e: Transport(forward=ident, inverse=ident)
                  for (e, _, _) in base.edges}
    return DiscreteBundle(base, fibers, transports)


def circle_degree_pair(d: int, n: int = 4) -> BundleSelfMapPair:
    """Degree-d circle dynamics as a point-fiber bundle pair."""
    base = circle_base(n)
    bundle = point_fiber_bundle(base)
    bmap = degree_base_map(base, d)
    pt = point_complex()
    fiber_maps = {v: SimplicialMap(pt, pt, {"p": "p"}) for v in base.vertices}
    return BundleSelfMapPair(bundle, bmap, fiber_maps)


def circle_degree_chain_model(d: int) -> TwistedChainMap:
    """Tree-contracted chain model of z -> z^d on the circle."""
    z = FreeAbelianGroup(1)
    endo = GroupEndomorphism(z, [(d,)])
    t = (1,)
    b1 = GroupRingMatrix(z, 1, 1, [GroupRingElement(
        z, [(t, 1), (z.identity(), -1)])])
    cover = EquivariantChainComplex(z, [1, 1], [b1])
    f0 = GroupRingMatrix(z, 1, 1, [GroupRingElement.of(z, z.identity())])
    word = ((0, 1),) * d if d >= 0 else ((0, -1),) * (-d)

    def elem(w):
        return (sum(e for _, e in w),)

    f1 = GroupRingMatrix(z, 1, 1, [fox_derivative(word, 0, elem, z)])
    return TwistedChainMap(cover, endo, [f0, f1])


def rank1_witness(group, k: int):
    """Integer path-class witness in the element format of a rank-1 group."""
    if group.kind == "free_abelian":
        return (k,)
    return ((0, 1),) * k if k >= 0 else ((0, -1),) * (-k)


def materialize_records(records: Sequence[FixedPointRecord], group
                        ) -> List[FixedPointRecord]:
    """Convert integer witnesses into elements of the given rank-1 group."""
    return [FixedPointRecord(label=r.label, index=r.index,
                             class_witness=rank1_witness(group,
                                                         r.class_witness))
            for r in records]


def circle_degree_oracle(d: int) -> Dict:
    """Analytic fixed points of z -> z^d: solutions of z^(d-1) = 1.

    For d != 1 there are |d - 1| fixed points, each of local index
    sign(1 - d); the k-th fixed point exp(2 pi i k / (d-1)) has path-class
    witness k in Z/(1 - d).  Witnesses are stored as plain integers; use
    :func:`materialize_records` for a concrete group.
    """
    if d == 1:
        return {"lefschetz": 0, "nielsen": 0, "records": [],
                "note": "identity-degree map: empty trace"}
    count = abs(1 - d)
    sign = 1 if 1 - d > 0 else -1
    records = [FixedPointRecord(label=f"z{k}", index=sign, class_witness=k)
               for k in range(count)]
    return {
        "lefschetz": 1 - d,
        "nielsen": count,
        "coefficient": sign,
        "class_count": count,
        "records": records,
        "note": "roots of z^(d-1) = 1; local index is the sign of 1 - d",
    }


# ---------------------------------------------------------------------------
# Torus linear maps (equivariant chain model and lattice oracle)
# ---------------------------------------------------------------------------

def _divide_one_minus(p: GroupRingElement, v: Tuple[int, ...]
                      ) -> GroupRingElement:
    """Exact division of a Z[Z^n] element by (1 - t^v)."""
    group = p.group
    rem = {g: c for g, c in p.terms.values()}
    quot: Dict[Tuple[int, ...], int] = {}

    def vdeg(g):
        return sum(x * y for x, y in zip(g, v))

    guard = 0
    while rem:
        guard += 1
        if guard > 10000:
            raise GroupError("division by (1 - t^v) does not terminate")
        g = max(rem, key=lambda x: (vdeg(x), x))
        c = rem[g]
        gm = tuple(a - b for a, b in zip(g, v))
        # (1 - t^v) * (-c t^gm) = -c t^gm + c t^g
        quot[gm] = quot.get(gm, 0) - c
        rem[g] -= c
        rem[gm] = rem.get(gm, 0) + c
        rem = {k: x for k, x in rem.items() if x != 0}
    return GroupRingElement(group, [(g, c) for g, c in quot.items()])


def torus_linear_chain_model(a: Sequence[Sequence[int]]) -> TwistedChainMap:
    """Chain model of the torus self-map induced by an integer matrix.

    The torus is given its one-vertex cell structure (one 2-cell attached
    along the commutator); the degree-two component of the lift is the
    unique solution of the twisted commutation equation, found by exact
    division in the Laurent ring.
    """
    (a00, a01), (a10, a11) = a
    z2 = FreeAbelianGroup(2)
    endo = GroupEndomorphism(z2, [(a00, a10), (a01, a11)])

    def elem(w):
        out = [0, 0]
        for g, e in w:
            out[g] += e
        return tuple(out)

    comm = ((0, 1), (1, 1), (0, -1), (1, -1))
    d_a = fox_derivative(comm, 0, elem, z2)
    d_b = fox_derivative(comm, 1, elem, z2)
    b1 = GroupRingMatrix(z2, 2, 1, [
        GroupRingElement(z2, [((1, 0), 1), ((0, 0), -1)]),
        GroupRingElement(z2, [((0, 1), 1), ((0, 0), -1)]),
    ])
    b2 = GroupRingMatrix(z2, 1, 2, [d_a, d_b])
    cover = EquivariantChainComplex(z2, [1, 2, 1], [b1, b2])

    def power_word(gen, k):
        return ((gen, 1),) * k if k >= 0 else ((gen, -1),) * (-k)

    words = [power_word(0, a00) + power_word(1, a10),
             power_word(0, a01) + power_word(1, a11)]
    f0 = GroupRingMatrix(z2, 1, 1, [GroupRingElement.of(z2, (0, 0))])
    ent1 = []
    for i in range(2):
        for j in range(2):
            ent1.append(fox_derivative(words[i], j, elem, z2))
    f1 = GroupRingMatrix(z2, 2, 2, ent1)
    rhs0 = (d_a.apply(endo) * f1[0, 0]) + (d_b.apply(endo) * f1[1, 0])
    f2_entry = _divide_one_minus(rhs0, (0, 1))
    f2 = GroupRingMatrix(z2, 1, 1, [f2_entry])
    return TwistedChainMap(cover, endo, [f0, f1, f2])


def torus_lattice_oracle(a: Sequence[Sequence[int]]) -> Dict:
    """Fixed points of x -> Ax on R^2/Z^2 by exact lattice enumeration.

    Solves (A - I) x = k over the rationals for integer vectors k,
    keeping solutions in the unit square; each fixed point has index
    sign(det(I - A)) and path-class witness k.
    """
    (a00, a01), (a10, a11) = a
    m = IntMatrix.from_rows([[a00 - 1, a01], [a10, a11 - 1]])
    det = m.determinant()
    if det == 0:
        raise ValueError("det(I - A) must be nonzero")
    det_ima = IntMatrix.from_rows([[1 - a00, -a01], [-a10, 1 - a11]]).determinant()
    sign = 1 if det_ima > 0 else -1
    bound = abs(a00 - 1) + abs(a01) + abs(a10) + abs(a11 - 1) + 1
    records = []
    inv = [[Fraction(a11 - 1, det), Fraction(-a01, det)],
           [Fraction(-a10, det), Fraction(a00 - 1, det)]]
    for k0 in range(-bound, bound + 1):
        for k1 in range(-bound, bound + 1):
            x0 = inv[0][0] * k0 + inv[0][1] * k1
            x1 = inv[1][0] * k0 + inv[1][1] * k1
            if 0 <= x0 < 1 and 0 <= x1 < 1:
                records.append(FixedPointRecord(
                    label=f"x=({x0},{x1})", index=sign,
                    class_witness=(k0, k1)))
    assert len(records) == abs(det)
    return {
        "lefschetz": det_ima,
        "nielsen": abs(det_ima),
        "coefficient": sign,
        "records": records,
        "note": "unit-square solutions of (A - I)x in Z^2; index is the "
                "sign of det(I - A)",
    }


# ---------------------------------------------------------------------------
# Bundle fixtures
# ---------------------------------------------------------------------------

def _swap_map(f: SimplicialComplex) -> SimplicialMap:
    return SimplicialMap(f, f, {"0": "1", "1": "0"})


def double_cover_reflection_pair() -> BundleSelfMapPair:
    """Reflection of the circle covered by a map of its connected double cover.

    Base: square graph; fibers: two points; monodromy around the base is
    the sheet swap.  Over one fixed point of the base reflection the
    fiber map is the identity, over the other it is the transposition.
    The total map (the reflection of the covering circle) is supplied
    explicitly.
    """
    base = circle_base(4)
    fib = two_point_complex()
    ident = SimplicialMap(fib, fib, {"0": "0", "1": "1"})
    swap = _swap_map(fib)
    transports = {
        "e0": Transport(ident, ident),
        "e1": Transport(ident, ident),
        "e2": Transport(ident, ident),
        "e3": Transport(swap, swap),
    }
    bundle = DiscreteBundle(base, {v: fib for v in base.vertices}, transports)
    vertex_images = {"b0": "b0", "b1": "b3", "b2": "b2", "b3": "b1"}
    edge_words = {
        "e0": [("e3", -1)],
        "e1": [("e2", -1)],
        "e2": [("e1", -1)],
        "e3": [("e0", -1)],
    }
    bmap = GraphSelfMap(base, vertex_images, edge_words)
    fiber_maps = {"b0": ident, "b1": swap, "b2": swap, "b3": swap}
    total_images = {}
    for b, fm in fiber_maps.items():
        for x in ("0", "1"):
            total_images[("v", b, x)] = ("v", vertex_images[b],
                                         fm.vertex_images[x])
    reversal = {"e0": "e3", "e1": "e2", "e2": "e1", "e3": "e0"}
    for e, e2 in reversal.items():
        t2 = transports[e2].forward
        inv = {w: v for v, w in t2.vertex_images.items()}
        src = base.edge_endpoints(e)[0]
        for x in ("0", "1"):
            y = fiber_maps[src].vertex_images[x]
            total_images[("m", e, x)] = ("m", e2, inv[y])
    return BundleSelfMapPair(bundle, bmap, fiber_maps,
                             total_map_images=total_images)


def double_cover_oracle() -> Dict:
    return {
        "per_class": [{"ind": 1, "fiber_lefschetz": 2},
                      {"ind": 1, "fiber_lefschetz": 0}],
        "total_lefschetz": 2,
        "nielsen": 2,
        "records": [FixedPointRecord(label="z=1", index=1, class_witness=0),
                    FixedPointRecord(label="z=-1", index=1, class_witness=1)],
        "note": "conjugation on the covering circle fixes +-1, both of "
                "index 1 and in distinct path classes",
    }


def _triangle_maps() -> Dict[str, Callable[[SimplicialComplex], SimplicialMap]]:
    def ident(k):
        return SimplicialMap(k, k, {v: v for v in k.vertices})

    def reflection(k):
        n = len(k.vertices)
        return SimplicialMap(k, k, {str(i): str((-i) % n) for i in range(n)})

    def constant(k):
        return SimplicialMap(k, k, {v: k.vertices[0] for v in k.vertices})

    def rotation(k):
        n = len(k.vertices)
        return SimplicialMap(k, k, {str(i): str((i + 1) % n) for i in range(n)})

    return {"identity": ident, "reflection": reflection, "constant": constant,
            "rotation": rotation}


def _base_maps(base: GraphBase) -> Dict[str, GraphSelfMap]:
    return {
        "identity": degree_base_map(base, 1),
        "reflection": degree_base_map(base, -1),
        "constant": degree_base_map(base, 0),
        "rotation": rotation_base_map(base),
    }


FIBER_LEFSCHETZ = {"identity": 0, "reflection": 2, "constant": 1,
                   "rotation": 0}
BASE_LEFSCHETZ = {"identity": 0, "reflection": 2, "constant": 1,
                  "rotation": 0}


def trivial_product_pair(base_map_name: str = "reflection",
                         fiber_map_name: str = "reflection",
                         fiber_size: int = 3) -> BundleSelfMapPair:
    """Product bundle (circle base, circle fiber) with a product self-map."""
    base = circle_base(4)
    fib = circle_complex(fiber_size)
    ident = SimplicialMap(fib, fib, {v: v for v in fib.vertices})
    transports = {e: Transport(ident, ident) for (e, _, _) in base.edges}
    bundle = DiscreteBundle(base, {v: fib for v in base.vertices}, transports)
    bmap = _base_maps(base)[base_map_name]
    fmap = _triangle_maps()[fiber_map_name](fib)
    fiber_maps = {v: fmap for v in base.vertices}
    return BundleSelfMapPair(bundle, bmap, fiber_maps)


def fixed_point_free_rotation_pair() -> BundleSelfMapPair:
    """Rotation base map on a trivial circle bundle: no fixed points at all."""
    return trivial_product_pair("rotation", "identity")


def interval_base() -> GraphBase:
    return GraphBase(["b0", "b1"], [("e0", "b0", "b1")], ["e0"], "b0")


def figure_eight_base() -> GraphBase:
    """One vertex, two loop edges; the free group of rank two."""
    return GraphBase(["b0"], [("a", "b0", "b0"), ("b", "b0", "b0")], [], "b0")


def point_base() -> GraphBase:
    return GraphBase(["b0"], [], [], "b0")


def two_component_euler_fixtures() -> List[Tuple[BundleSelfMapPair, int]]:
    """Identity pairs on two bundles with different fiber characteristics.

    Models a disconnected base as two connected pieces: a point base with
    a two-point fiber and an interval base with a circle fiber.  Returns
    (pair, expected chi contribution) per piece.
    """
    out = []
    base1 = point_base()
    fib1 = two_point_complex()
    bundle1 = DiscreteBundle(base1, {"b0": fib1}, {})
    ident1 = SimplicialMap(fib1, fib1, {v: v for v in fib1.vertices})
    bmap1 = GraphSelfMap(base1, {"b0": "b0"}, {})
    pair1 = BundleSelfMapPair(bundle1, bmap1, {"b0": ident1})
    out.append((pair1, 1 * 2))
    base2 = interval_base()
    fib2 = circle_complex(3)
    ident2 = SimplicialMap(fib2, fib2, {v: v for v in fib2.vertices})
    bundle2 = DiscreteBundle(base2, {"b0": fib2, "b1": fib2},
                             {"e0": Transport(ident2, ident2)})
    bmap2 = GraphSelfMap(base2, {"b0": "b0", "b1": "b1"},
                         {"e0": [("e0", 1)]})
    pair2 = BundleSelfMapPair(bundle2, bmap2, {"b0": ident2, "b1": ident2})
    out.append((pair2, 1 * 0))
    return out


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

@dataclass
class CatalogEntry:
    name: str
    kind: str
    description: str
    build: Callable
    default_params: Dict = field(default_factory=dict)


CATALOG: Dict[str, CatalogEntry] = {}


def _register(entry: CatalogEntry):
    CATALOG[entry.name] = entry
    return entry


_register(CatalogEntry(
    name="point", kind="complex", description="a single vertex",
    build=lambda: point_complex()))
_register(CatalogEntry(
    name="circle", kind="complex", description="n-gon circle",
    build=lambda n=3: circle_complex(int(n)), default_params={"n": 3}))
_register(CatalogEntry(
    name="figure_eight", kind="complex",
    description="wedge of two triangle circles",
    build=lambda: figure_eight_complex()))
_register(CatalogEntry(
    name="torus7", kind="complex",
    description="minimal 7-vertex torus triangulation",
    build=lambda: torus7_complex()))
_register(CatalogEntry(
    name="circle_reflection", kind="selfmap",
    description="reflection of a square circle; L = 2, N = 2",
    build=lambda n=4: circle_reflection_fixture(int(n)),
    default_params={"n": 4}))
_register(CatalogEntry(
    name="circle_degree_map", kind="bundle_pair",
    description="degree-d circle dynamics over a point fiber",
    build=lambda d=2: circle_degree_pair(int(d)), default_params={"d": 2}))
_register(CatalogEntry(
    name="torus_linear", kind="chain_model",
    description="torus self-map from an integer matrix, chain model",
    build=lambda a=((2, 1), (1, 1)): torus_linear_chain_model(a),
    default_params={"a": [[2, 1], [1, 1]]}))
_register(CatalogEntry(
    name="double_cover_reflection", kind="bundle_pair",
    description="connected double cover of the circle over a reflection",
    build=lambda: double_cover_reflection_pair()))
_register(CatalogEntry(
    name="trivial_product", kind="bundle_pair",
    description="product bundle with a product self-map",
    build=lambda base_map="reflection", fiber_map="reflection":
        trivial_product_pair(str(base_map), str(fiber_map)),
    default_params={"base_map": "reflection", "fiber_map": "reflection"}))
_register(CatalogEntry(
    name="fixed_point_free_rotation", kind="bundle_pair",
    description="rotation base map on a trivial circle bundle",
    build=lambda: fixed_point_free_rotation_pair()))
