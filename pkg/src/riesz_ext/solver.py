"""Nonlinear power iteration for the subcritical extension problem.

Maximizes ``||E_2 f||_{L^q(Omega)}`` over ``||f||_{L^{2(n-1)/n}(dOmega)} = 1``
by iterating the rearranged Euler-Lagrange map

    f  ->  normalize( R_2[(E_2 f)^{q-1}]^{n/(n-2)} ).

Boundary data is discretized as zonal functions (axially symmetric about
the x_n axis) on each boundary sphere.  On zonal data both E_2 and R_2 are
diagonal in Gegenbauer modes, so the kernel is applied exactly mode by mode
and the discrete R_2 is the exact adjoint of the discrete E_2.  One angular
node gives the rotation-invariant (per-sphere constant) ansatz.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .closed_forms import boundary_exponent, critical_exponent, sharp_constant_ball
from .errors import DegenerateInputError, ParameterError, UnsupportedConfigurationError
from .geometry import DomainKind, DomainSpec, graded_volume_rule, sphere_area
from .operators import BoundaryFunction, Representation


class ZonalDiscretization:
    """Gegenbauer-mode discretization of ``E_2`` and ``R_2`` on a ball or annulus."""

    def __init__(self, domain: DomainSpec, angular_nodes: int = 1, radial_order: int = 64, grading: float = 3.0):
        if domain.kind is DomainKind.HALF_SPACE_WINDOW:
            raise UnsupportedConfigurationError("the solver works on balls and annuli")
        if int(angular_nodes) != angular_nodes or angular_nodes < 1:
            raise ParameterError("angular_nodes must be a positive integer")
        self.domain = domain
        n = self.n = domain.n
        N = self.angular_nodes = int(angular_nodes)
        lam = 0.5 * (n - 2)
        t, wt = special.roots_gegenbauer(N, lam)
        self.t, self.wt = t, wt
        modes = np.arange(N)
        cl = np.stack([special.eval_gegenbauer(int(l), lam, t) for l in modes], axis=1)
        self.basis = cl / np.sqrt(wt @ (cl * cl))  # orthonormal in the wt inner product
        self.radii = np.array([rad for _, rad in domain.components])
        rule = graded_volume_rule(domain, grading, (radial_order, N))
        self.rule = rule
        rho = rule.nodes
        lower = sphere_area(n - 1)
        self.boundary_weights = (lower * self.radii[:, None] ** (n - 1) * wt[None, :]).ravel()
        self.volume_weights = (lower * (rule.meta["dr_weights"] * rho ** (n - 1))[:, None] * wt[None, :]).ravel()
        # Funk-Hecke factors for |x - y|^{2-n} expanded in Gegenbauer polynomials
        eig = sphere_area(n) / lower * lam / (modes + lam)
        s = rho[:, None, None]
        c = self.radii[None, :, None]
        l = modes[None, None, :]
        inside = s < c
        with np.errstate(divide="ignore", over="ignore"):
            m = np.where(inside, c ** (2 - n) * (s / c) ** l, s ** (2 - n) * (c / s) ** l)
        m = m * eig
        k = np.einsum("icl,jl,bl->ijcb", m, self.basis, self.basis)
        self.kernel = k.reshape(rho.size * N, self.radii.size * N)

    # ------------------------------------------------------------------ maps
    @property
    def boundary_size(self):
        return self.radii.size * self.angular_nodes

    def extend(self, f):
        return self.kernel @ (self.boundary_weights * f)

    def restrict(self, g):
        return self.kernel.T @ (self.volume_weights * g)

    def boundary_norm(self, f, p):
        return float(np.dot(self.boundary_weights, np.abs(f) ** p) ** (1.0 / p))

    def volume_norm(self, g, q):
        return float(np.dot(self.volume_weights, np.abs(g) ** q) ** (1.0 / q))

    def normalize(self, f):
        nrm = self.boundary_norm(f, boundary_exponent(self.n))
        if nrm == 0.0 or not math.isfinite(nrm):
            raise DegenerateInputError("boundary data has zero or non-finite norm")
        return f / nrm

    def quotient(self, f, q):
        return self.volume_norm(self.extend(f), q) / self.boundary_norm(f, boundary_exponent(self.n))

    def el_map(self, f, q):
        """One unnormalized-then-normalized Euler-Lagrange update."""
        v = self.extend(f)
        h = self.restrict(np.abs(v) ** (q - 2.0) * v)
        return self.normalize(np.maximum(h, 0.0) ** (self.n / (self.n - 2.0)))

    # ------------------------------------------------------------- conversion
    def node_points(self):
        """Boundary node positions, ``(components * angular_nodes, n)``, axis along ``x_n``."""
        pts = np.zeros((self.boundary_size, self.n))
        st = np.sqrt(np.clip(1.0 - self.t ** 2, 0.0, None))
        for c, rad in enumerate(self.radii):
            sl = slice(c * self.angular_nodes, (c + 1) * self.angular_nodes)
            pts[sl, 0] = rad * st
            pts[sl, -1] = rad * self.t
        return pts

    def sample(self, f: BoundaryFunction) -> np.ndarray:
        if f.domain != self.domain:
            raise ParameterError("boundary function lives on a different domain")
        if f.is_radial:
            return np.repeat(f.component_values(), self.angular_nodes)
        if f.representation is Representation.CLOSED_FORM:
            pts = self.node_points()
            out = np.empty(self.boundary_size)
            for c, (label, _) in enumerate(self.domain.components):
                sl = slice(c * self.angular_nodes, (c + 1) * self.angular_nodes)
                out[sl] = np.asarray(f.func(pts[sl], label), dtype=float)
            return out
        raise UnsupportedConfigurationError("sampled data must be given as a closed form or constants")

    def to_boundary_function(self, values) -> BoundaryFunction:
        values = np.asarray(values, dtype=float)
        N = self.angular_nodes
        if N == 1:
            return BoundaryFunction.constant(self.domain, *values.tolist())
        coeffs = values.reshape(self.radii.size, N) * self.wt[None, :] @ self.basis
        lam = 0.5 * (self.n - 2)
        norms = np.sqrt(self.wt @ np.stack([special.eval_gegenbauer(l, lam, self.t) ** 2 for l in range(N)], 1))
        labels = [label for label, _ in self.domain.components]

        def func(pts, component):
            pts = np.atleast_2d(pts)
            tt = pts[:, -1] / np.linalg.norm(pts, axis=1)
            basis = np.stack([special.eval_gegenbauer(l, lam, tt) for l in range(N)], 1) / norms
            return basis @ coeffs[labels.index(component)]

        return BoundaryFunction.closed_form(self.domain, func)


@dataclass(frozen=True)
class SolverConfig:
    q: float
    tol: float = 1e-8
    max_iter: int = 500
    damping: float = 1.0
    angular_nodes: int = 1
    radial_order: int = 64
    grading: float = 3.0
    slack: float = 1e-12

    def validate(self, n: int):
        if not 2.0 < self.q < critical_exponent(n):
            raise ParameterError(f"q must lie in (2, {critical_exponent(n):g}), got {self.q!r}")
        if not 0.0 < self.damping <= 1.0:
            raise ParameterError(f"damping must lie in (0, 1], got {self.damping!r}")
        if not self.tol > 0.0:
            raise ParameterError("tol must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ParameterError("max_iter must be a positive integer")


@dataclass
class SolverReport:
    final_f: BoundaryFunction
    final_values: np.ndarray
    quotient_history: list
    residual: float
    converged: bool
    iterations: int
    q: float
    damping: float
    holder_bound: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def quotient(self) -> float:
        return self.quotient_history[-1]

    def to_dict(self, disc: ZonalDiscretization | None = None) -> dict:
        out = {
            "q": self.q,
            "quotient": self.quotient,
            "converged": self.converged,
            "iterations": self.iterations,
            "residual": self.residual,
            "damping": self.damping,
            "quotient_history": list(self.quotient_history),
            "final_values": self.final_values.tolist(),
            "holder_bound": self.holder_bound,
        }
        out.update(self.meta)
        return out


def default_init(domain: DomainSpec) -> BoundaryFunction:
    if domain.kind is DomainKind.ANNULUS:
        return BoundaryFunction.two_level(domain, 2.0)
    return BoundaryFunction.constant(domain, 1.0)


def el_step(f: BoundaryFunction, q: float, disc: ZonalDiscretization | None = None) -> BoundaryFunction:
    """Apply the Euler-Lagrange map once; the result is normalized in ``L^{2(n-1)/n}``."""
    disc = disc or ZonalDiscretization(f.domain)
    if not 2.0 < q < critical_exponent(f.n):
        raise ParameterError(f"q must lie in (2, {critical_exponent(f.n):g})")
    values = disc.sample(f)
    if np.any(values < 0.0):
        raise ParameterError("boundary data must be nonnegative")
    if not np.any(values):
        raise DegenerateInputError("boundary data is identically zero")
    return disc.to_boundary_function(disc.el_map(disc.normalize(values), q))


def holder_bound_ball(n: int, q: float) -> float:
    """Upper bound ``|B_1|^{1/q - 1/2^*} E_2(B_1)`` for the subcritical ball constant."""
    return math.exp((1.0 / q - 1.0 / critical_exponent(n)) * math.log(DomainSpec.ball(n).volume())) \
        * sharp_constant_ball(n)


def solve_subcritical(domain: DomainSpec, config: SolverConfig, init=None,
                      disc: ZonalDiscretization | None = None) -> SolverReport:
    """Iterate the Euler-Lagrange map with damping and a monotonicity safeguard.

    ``init`` is a :class:`BoundaryFunction` or an array of nodal values.
    Non-convergence is reported through ``converged=False``.
    """
    config.validate(domain.n)
    disc = disc or ZonalDiscretization(domain, config.angular_nodes, config.radial_order, config.grading)
    if init is None:
        init = default_init(domain)
    values = np.asarray(init, dtype=float).copy() if isinstance(init, np.ndarray) else disc.sample(init)
    if values.shape != (disc.boundary_size,):
        raise ParameterError("initial values do not match the discretization")
    if np.any(values < 0.0):
        raise ParameterError("initial data must be nonnegative")
    if not np.any(values):
        raise DegenerateInputError("initial data is identically zero")
    q = config.q
    f = disc.normalize(values)
    quot = disc.quotient(f, q)
    history = [quot]
    damping = config.damping
    residual = math.inf
    converged = False
    rejected = 0
    it = 0
    for it in range(1, config.max_iter + 1):
        target = disc.el_map(f, q)
        d = damping
        while True:
            cand = disc.normalize((1.0 - d) * f + d * target)
            cq = disc.quotient(cand, q)
            if cq >= quot - config.slack * max(1.0, abs(quot)):
                break
            rejected += 1
            d *= 0.5
            if d < 1e-10:
                cand, cq = f, quot
                break
        damping = d
        residual = float(np.max(np.abs(cand - f)) / np.max(np.abs(f)))
        dq = abs(cq - quot) / abs(quot)
        f, quot = cand, cq
        history.append(quot)
        if residual <= config.tol and dq <= config.tol:
            converged = True
            break
        if d < 1e-10:
            break
    bound = holder_bound_ball(domain.n, q) if domain.kind is DomainKind.BALL else None
    meta = {
        "domain": domain.kind.value, "n": domain.n, "r": domain.r,
        "angular_nodes": disc.angular_nodes, "radial_order": config.radial_order,
        "rejected_steps": rejected,
        "node_t": disc.t.tolist(),
        "node_radii": np.repeat(disc.radii, disc.angular_nodes).tolist(),
    }
    if bound is not None:
        meta["holder_ok"] = bool(quot <= bound * (1.0 + 1e-10))
    return SolverReport(disc.to_boundary_function(f), f, history, residual, converged, it, q, damping, bound, meta)


@dataclass(frozen=True)
class ContinuationResult:
    entries: tuple  # (q, estimate, converged, iterations)
    extrapolated: float
    tentative: bool
    reports: tuple = ()


def continuation_to_critical(domain: DomainSpec, q_grid, config: SolverConfig, init=None) -> ContinuationResult:
    """Warm-started solves along increasing ``q``, extrapolated linearly in ``2^* - q``."""
    q_grid = [float(q) for q in q_grid]
    crit = critical_exponent(domain.n)
    if not q_grid:
        raise ParameterError("q_grid is empty")
    if any(b <= a for a, b in zip(q_grid, q_grid[1:])):
        raise ParameterError("q_grid must be strictly increasing")
    if q_grid[-1] >= crit:
        raise ParameterError(f"all q must be below the critical exponent {crit:g}")
    disc = ZonalDiscretization(domain, config.angular_nodes, config.radial_order, config.grading)
    warm = init
    entries, reports = [], []
    for q in q_grid:
        rep = solve_subcritical(domain, _with_q(config, q), warm, disc)
        warm = rep.final_values
        entries.append((q, rep.quotient, rep.converged, rep.iterations))
        reports.append(rep)
    if len(entries) == 1:
        limit = entries[0][1]
    else:
        (q1, e1, *_), (q2, e2, *_) = entries[-2], entries[-1]
        h1, h2 = crit - q1, crit - q2
        limit = e2 + (e2 - e1) * h2 / (h1 - h2)
    tentative = not all(e[2] for e in entries)
    return ContinuationResult(tuple(entries), limit, tentative, tuple(reports))


def _with_q(config, q):
    from dataclasses import replace
    return replace(config, q=q)
