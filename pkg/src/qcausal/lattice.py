"""Signalling chains for a free scalar field on a 1+1 dimensional lattice.

The spatial geometry is a periodic circle of ``n_sites`` points with unit
spacing; time runs over ``n_steps`` slices with unit step.  Evolution is the
leapfrog discretization of the Klein-Gordon equation with the mass term
averaged over adjacent time slices (see ``_kernels``), whose dependence cone
advances exactly one site per step, so lattice causality statements are
exact: the commutator form of two test functions at spacelike separation is
a sum of exact floating-point zeros.

Field observables are kept abstract.  An :class:`AffineField` stores a real
affine combination ``c0 + sum_i c_i phi(f_i)`` of smeared field operators;
conjugation by the unitaries appearing in the signalling chain (exponentials
of a field and of a squared field) closes on this family, with coefficients
given exactly by the Pauli-Jordan form, so no operator truncation is ever
involved.  The commutation convention is ``[phi(f), phi(g)] = i Delta(f, g)``
with ``Delta`` as returned by :func:`pauli_jordan`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._kernels import impulse_response


@dataclass(frozen=True)
class LatticeSpec:
    """Periodic 1+1D lattice window: spatial circle size, time slices, mass."""

    n_sites: int
    n_steps: int
    mass: float = 1.0

    def __post_init__(self):
        if self.n_sites < 3:
            raise ValueError("need at least 3 spatial sites")
        if self.n_steps < 2:
            raise ValueError("need at least 2 time steps")
        if self.mass < 0:
            raise ValueError("mass must be non-negative")

    def in_window(self, point) -> bool:
        t, x = point
        return 0 <= t < self.n_steps and 0 <= x < self.n_sites

    def distance(self, x0: int, x1: int) -> int:
        """Periodic (wraparound-minimized) spatial distance."""
        d = abs(int(x0) - int(x1)) % self.n_sites
        return min(d, self.n_sites - d)


def reaches(lattice: LatticeSpec, p, q) -> bool:
    """True if q lies in the forward stencil cone of p (inclusive)."""
    dt = q[0] - p[0]
    return dt >= 0 and lattice.distance(p[1], q[1]) <= dt


def spacelike(lattice: LatticeSpec, p, q) -> bool:
    """True if neither point can reach the other: |dx| > |dt| on the circle."""
    return lattice.distance(p[1], q[1]) > abs(p[0] - q[0])


@dataclass(frozen=True)
class Region:
    """A finite set of lattice points (t, x)."""

    points: tuple

    def __init__(self, points):
        pts = tuple(sorted((int(t), int(x)) for t, x in points))
        if not pts:
            raise ValueError("a region needs at least one point")
        object.__setattr__(self, "points", pts)

    def spacelike_separated(self, other: "Region", lattice: LatticeSpec) -> bool:
        return all(
            spacelike(lattice, p, q) for p in self.points for q in other.points
        )

    def _cone(self, lattice: LatticeSpec, forward: bool) -> "Region":
        t_grid, x_grid = np.meshgrid(
            np.arange(lattice.n_steps), np.arange(lattice.n_sites), indexing="ij"
        )
        mask = np.zeros_like(t_grid, dtype=bool)
        for t0, x0 in self.points:
            dt = (t_grid - t0) if forward else (t0 - t_grid)
            dx = np.abs(x_grid - x0) % lattice.n_sites
            dist = np.minimum(dx, lattice.n_sites - dx)
            mask |= (dt >= 0) & (dist <= dt)
        return Region(zip(t_grid[mask].tolist(), x_grid[mask].tolist()))

    def causal_future(self, lattice: LatticeSpec) -> "Region":
        """All window points reachable from the region (inclusive)."""
        return self._cone(lattice, forward=True)

    def causal_past(self, lattice: LatticeSpec) -> "Region":
        """All window points that can reach the region (inclusive)."""
        return self._cone(lattice, forward=False)


@dataclass(eq=False)
class TestFunction:
    """Real smearing coefficients on finitely many lattice points.

    Instances compare and hash by identity so they can key the linear part
    of an :class:`AffineField`; building a test function never mutates an
    existing one, and the mapping is read-only after construction.
    """

    __test__ = False  # not a pytest class, despite the name

    values: dict

    def __post_init__(self):
        self.values = {
            (int(t), int(x)): float(v) for (t, x), v in self.values.items()
        }
        if not self.values:
            raise ValueError("a test function needs at least one support point")

    @property
    def support(self) -> tuple:
        return tuple(sorted(self.values))

    def region(self) -> Region:
        return Region(self.support)


def triangular_bump(
    lattice: LatticeSpec, center, half_t: int, half_x: int
) -> TestFunction:
    """Product of triangular profiles around ``center``, peak weight 1.

    Support is the ``(2 half_t + 1) x (2 half_x + 1)`` patch, wrapped on the
    spatial circle; the time extent must fit inside the window.
    """
    tc, xc = int(center[0]), int(center[1])
    if tc - half_t < 0 or tc + half_t >= lattice.n_steps:
        raise ValueError("bump time extent leaves the window")
    vals = {}
    for dt in range(-half_t, half_t + 1):
        for dx in range(-half_x, half_x + 1):
            w = (1.0 - abs(dt) / (half_t + 1.0)) * (1.0 - abs(dx) / (half_x + 1.0))
            vals[(tc + dt, (xc + dx) % lattice.n_sites)] = w
    return TestFunction(vals)


@lru_cache(maxsize=32)
def _base_table(lattice: LatticeSpec) -> np.ndarray:
    """Retarded impulse table E[dt, dx] for a kick at the origin (cached)."""
    table = impulse_response(lattice.n_sites, lattice.n_steps, lattice.mass)
    table.setflags(write=False)
    return table


def retarded_green(lattice: LatticeSpec, src) -> np.ndarray:
    """Field history (n_steps, n_sites) of a unit momentum kick at ``src``.

    The history vanishes at and before the source time, equals the unit time
    step at the source point one step later, and vanishes identically outside
    the forward cone of one site per step.
    """
    t0, x0 = int(src[0]), int(src[1])
    if not lattice.in_window((t0, x0)):
        raise ValueError(f"source {src} outside the lattice window")
    base = _base_table(lattice)
    out = np.zeros_like(base)
    out[t0:] = np.roll(base[: lattice.n_steps - t0], x0, axis=1)
    return out


def _check_support(lattice: LatticeSpec, f: TestFunction, name: str):
    for p in f.support:
        if not lattice.in_window(p):
            raise ValueError(f"support point {p} of {name} outside the window")


def pauli_jordan(lattice: LatticeSpec, f: TestFunction, g: TestFunction) -> float:
    """Smeared commutator form Delta(f, g): retarded minus advanced response.

    ``Delta(f, g) = sum_pq f(p) g(q) [G_R(p, q) - G_R(q, p)]`` where ``G_R``
    is the retarded table of :func:`retarded_green`.  Antisymmetric in its
    arguments, bilinear, and exactly zero for spacelike separated supports.
    """
    _check_support(lattice, f, "f")
    _check_support(lattice, g, "g")
    table = _base_table(lattice)
    n = lattice.n_sites
    total = 0.0
    for (tp, xp), fv in f.values.items():
        for (tq, xq), gv in g.values.items():
            dt = tp - tq
            if dt > 0:
                total += fv * gv * table[dt, (xp - xq) % n]
            elif dt < 0:
                total -= fv * gv * table[-dt, (xq - xp) % n]
    return total


@dataclass
class AffineField:
    """Affine combination ``scalar + sum_i linear[f_i] * phi(f_i)``.

    The reference (vacuum) expectation of every smeared field is zero, so the
    expectation of the combination is the scalar part.
    """

    lattice: LatticeSpec
    scalar: float = 0.0
    linear: dict = field(default_factory=dict)

    @classmethod
    def phi(cls, lattice: LatticeSpec, f: TestFunction) -> "AffineField":
        """The smeared field observable phi(f)."""
        _check_support(lattice, f, "f")
        return cls(lattice, 0.0, {f: 1.0})

    @property
    def expectation(self) -> float:
        return self.scalar

    def coefficient(self, f: TestFunction) -> float:
        return self.linear.get(f, 0.0)


def weyl_conjugate(a: AffineField, h: TestFunction, lam: float) -> AffineField:
    """Conjugate by ``exp(i lam phi(h))``: each phi(f) shifts by -lam Delta(h, f).

    The shift is central, so the linear part is unchanged and the series
    terminates after the first commutator; the result is exact.
    """
    _check_support(a.lattice, h, "h")
    shift = sum(
        c * pauli_jordan(a.lattice, h, f) for f, c in a.linear.items()
    )
    return AffineField(a.lattice, a.scalar - lam * shift, dict(a.linear))


def gaussian_square_conjugate(a: AffineField, f: TestFunction, s: float) -> AffineField:
    """Conjugate by ``exp(i s phi(f)^2)``: phi(g) gains -2 s Delta(f, g) phi(f).

    The first commutator is proportional to phi(f) and the second vanishes,
    so the two-term expansion is exact; the scalar part is unchanged.
    """
    _check_support(a.lattice, f, "f")
    linear = dict(a.linear)
    gain = sum(
        c * (-2.0 * s * pauli_jordan(a.lattice, f, g)) for g, c in a.linear.items()
    )
    if gain != 0.0 or f in linear:
        linear[f] = linear.get(f, 0.0) + gain
    return AffineField(a.lattice, a.scalar, linear)


def sorkin_chain(
    lattice: LatticeSpec,
    f: TestFunction,
    g: TestFunction,
    h: TestFunction,
    lam: float,
) -> AffineField:
    """Kick-evolve-measure chain: conjugate phi(g) by the squared-field
    unitary of f, then by the field exponential of h with strength lam.

    Requires the supports of h and g to be spacelike separated, so that the
    only route from the kick at h to the probe at g is through the squared
    interaction at f; the resulting expectation is then

        -2 lam Delta(f, g) Delta(f, h),

    nonzero in geometries where h can reach f and f can reach g even though
    h cannot reach g: signalling between mutually spacelike regions through
    an intermediate interaction.
    """
    _check_support(lattice, f, "f")
    _check_support(lattice, g, "g")
    _check_support(lattice, h, "h")
    if not g.region().spacelike_separated(h.region(), lattice):
        raise ValueError("supports of h and g must be spacelike separated")
    out = AffineField.phi(lattice, g)
    out = gaussian_square_conjugate(out, f, 1.0)
    return weyl_conjugate(out, h, lam)


def signalling_derivative(
    lattice: LatticeSpec, f: TestFunction, g: TestFunction, h: TestFunction
) -> float:
    """d/d lam of the chain expectation; equals -2 Delta(f, g) Delta(f, h).

    The expectation is affine in lam, so the derivative is an exact finite
    difference of the chain at lam = 1 and lam = 0.
    """
    at_one = sorkin_chain(lattice, f, g, h, 1.0).expectation
    at_zero = sorkin_chain(lattice, f, g, h, 0.0).expectation
    return at_one - at_zero


@dataclass(frozen=True)
class BuildOptions:
    """Geometry knobs for :func:`build_scenario`."""

    time_gap: int = 2  # empty steps between K and each probe bump
    bump_half_t: int = 1
    bump_half_x: int = 1

    def __post_init__(self):
        if self.time_gap < 1:
            raise ValueError("time_gap must be at least 1")
        if self.bump_half_t < 0 or self.bump_half_x < 0:
            raise ValueError("bump half-widths must be non-negative")


def build_scenario(
    lattice: LatticeSpec, k: Region, opts: BuildOptions | None = None
):
    """Construct test functions (f, g, h) realizing the signalling geometry.

    ``f`` is a bump filling the interaction region K; ``h`` is a bump just
    before K near its left spatial edge (so it lies outside the causal
    future of K) and ``g`` a bump just after K near its right edge (outside
    the causal past of K), pushed further apart spatially if needed until
    their supports are spacelike separated.  Raises if the window cannot
    accommodate the arrangement: no room before or after K, no spacelike
    placement on the circle, or a window so wide in time that signals could
    wrap around the spatial circle.

    When K is spatially wide relative to the probe time gaps, h reaches the
    left part of K and g is reachable from the right part, so both
    Delta(f, h) and Delta(f, g) are generically nonzero while Delta(h, g)
    vanishes identically.
    """
    opts = opts or BuildOptions()
    for p in k.points:
        if not lattice.in_window(p):
            raise ValueError(f"region point {p} outside the lattice window")
    ts = [t for t, _ in k.points]
    xs = [x for _, x in k.points]
    t0k, t1k = min(ts), max(ts)
    x0k, x1k = min(xs), max(xs)
    if x1k - x0k >= lattice.n_sites // 2:
        raise ValueError(
            "region K must fit within half the spatial circle "
            "(as given, without wraparound)"
        )

    # f: product triangular profile over K, peaked at the bounding-box centre.
    tc, xc = 0.5 * (t0k + t1k), 0.5 * (x0k + x1k)
    ht, hx = 0.5 * (t1k - t0k), 0.5 * (x1k - x0k)
    f = TestFunction(
        {
            (t, x): (1.0 - abs(t - tc) / (ht + 1.0)) * (1.0 - abs(x - xc) / (hx + 1.0))
            for t, x in k.points
        }
    )

    th = t0k - opts.time_gap - opts.bump_half_t
    tg = t1k + opts.time_gap + opts.bump_half_t
    if th - opts.bump_half_t < 0:
        raise ValueError(
            "window cannot accommodate the arrangement: no room before K for h"
        )
    if tg + opts.bump_half_t > lattice.n_steps - 1:
        raise ValueError(
            "window cannot accommodate the arrangement: no room after K for g"
        )

    xh, xg = x0k, x1k
    while True:
        if (xg - xh) > lattice.n_sites // 2:
            raise ValueError(
                "window cannot accommodate the arrangement: h and g cannot be "
                "made spacelike separated on this circle"
            )
        h = triangular_bump(lattice, (th, xh), opts.bump_half_t, opts.bump_half_x)
        g = triangular_bump(lattice, (tg, xg), opts.bump_half_t, opts.bump_half_x)
        if g.region().spacelike_separated(h.region(), lattice):
            break
        xh -= 1
        xg += 1

    support = list(f.support) + list(g.support) + list(h.support)
    t_extent = max(t for t, _ in support) - min(t for t, _ in support)
    if t_extent >= lattice.n_sites / 2:
        raise ValueError(
            "scenario time extent is long enough for signals to wrap around "
            "the spatial circle; enlarge n_sites or tighten the geometry"
        )
    # Defensive re-checks of the causal-complement placement.
    if any(reaches(lattice, kp, p) for kp in k.points for p in h.support):
        raise ValueError("internal geometry error: h intersects the future of K")
    if any(reaches(lattice, p, kp) for kp in k.points for p in g.support):
        raise ValueError("internal geometry error: g intersects the past of K")
    return f, g, h
