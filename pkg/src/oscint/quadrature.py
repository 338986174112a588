"""Principal-value oscillatory multipliers of fewnomial phases.

Convention: the Fourier transform uses e^{-ix xi}, so the convolution
operator f -> p.v. int f(x-t) e^{iQ(t)} dt/t has the multiplier

    m(xi) = p.v. int e^{i(Q(t) - t xi)} dt/t
          = 2i int_0^inf sin(Q_odd(t) - t xi) e^{i Q_even(t)} dt/t .

The second form (odd symmetrisation) has no singularity at t = 0 and no
cancellation.  Its L^2 operator norm is sup_xi |m(xi)|.

m(xi) is computed as

    head bound on (0, t0)  +  adaptive GK15 on [t0, T]  +  far field,

where the far field of each side, int_T^inf e^{i phi(t)} dt/t, is cut into
monotone stretches (two integration-by-parts terms, remainder bounded by
the total variation of (phi' + t phi'') / (t^2 phi'^3)) and neighbourhoods
of stationary points (bounded by van der Corput's lemma).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .decomposition import (
    GoodComponent,
    IntegerInterval,
    PartitionOfUnity,
    component_cutoff,
)
from .errors import InsufficientPoints, PhaseOverflow, ToleranceNotMet
from .fewnomial import Fewnomial, eval_phase, falling, scale_frame, sparse_positive_roots
from .integrate import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, adaptive

__all__ = [
    "MultiplierSample",
    "DecayFit",
    "GridSpec",
    "SupResult",
    "pv_multiplier",
    "piece_multiplier",
    "piece_index",
    "stationary_frequencies",
    "piece_sup",
    "second_derivative_ratio",
    "decay_fit",
    "default_grid",
    "multiplier_sup",
    "hilbert_value",
]

PIECE_CEILING = 2 * math.log(2)


@dataclass(frozen=True)
class MultiplierSample:
    xi: float
    value: complex
    abs_err_estimate: float
    pieces_used: int
    certified: bool = True

    @property
    def ceiling_exceeded(self) -> bool:
        """Diagnostic flag: |m| above pi + 2 ln 2 (not a theorem, just unusual)."""
        return abs(self.value) > math.pi + PIECE_CEILING + self.abs_err_estimate

    def to_json(self):
        return {
            "xi": self.xi,
            "re": self.value.real,
            "im": self.value.imag,
            "abs": abs(self.value),
            "err": self.abs_err_estimate,
            "certified": self.certified,
        }


def hilbert_value(xi: float) -> complex:
    """Multiplier of the zero phase, -i pi sgn(xi)."""
    return -1j * math.pi * float(np.sign(xi))


# -- phase helpers -----------------------------------------------------------


class _Phase:
    """Vectorised phase pieces for one (Q, xi)."""

    def __init__(self, Q: Fewnomial, xi: float):
        self.Q = Q
        self.xi = float(xi)
        self.odd = Q.odd_part()
        self.even = Q.even_part()
        self.abs_terms = [(abs(a) * k, k - 1) for a, k in zip(Q.coeffs, Q.exponents)]

    def integrand(self, t):
        """2i sin(Q_odd(t) - t xi) e^{i Q_even(t)} / t for t > 0."""
        po = -self.xi * t
        for a, k in self.odd:
            po = po + a * t**k
        pe = np.zeros_like(t)
        for a, k in self.even:
            pe = pe + a * t**k
        return 2j * np.sin(po) * np.exp(1j * pe) / t

    def kernel(self, u):
        """e^{i(Q(u) - u xi)} / u, the unsymmetrised kernel."""
        return np.exp(1j * (eval_phase(self.Q, u, 0) - u * self.xi)) / u

    def dphi_bound(self, t):
        """Upper bound for |phi'| on (0, t] for both sides."""
        out = np.full_like(np.asarray(t, dtype=float), abs(self.xi))
        for c, k in self.abs_terms:
            out = out + c * t**k
        return out

    def side(self, t, sign):
        """phi, phi', phi'' of phi_sign(t) = Q(sign t) - sign t xi, t > 0."""
        s = sign * np.asarray(t, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            p0 = eval_phase(self.Q, s, 0) - s * self.xi
            p1 = sign * (eval_phase(self.Q, s, 1) - self.xi)
            p2 = eval_phase(self.Q, s, 2)
        return p0, p1, p2

    def head_bound(self, t0):
        out = 2 * abs(self.xi) * t0
        for a, k in self.odd:
            out += 2 * abs(a) * t0**k / k
        return out


def _choose_head(ph: _Phase, budget: float) -> float:
    # the head is cheap when its error is bounded and it carries little phase
    def cheap(t):
        return ph.head_bound(t) <= budget and (not ph.Q.d or t * ph.dphi_bound(t) <= 1.0)

    k = 0
    if not cheap(1.0):
        while k > -1000 and not cheap(2.0**k):
            k -= 1
    else:
        while k < 60 and cheap(2.0 ** (k + 1)):
            k += 1
    return 2.0**k


def _dominance_start(Q: Fewnomial, xi: float, t0: float, per_octave: int) -> float:
    """Grid point beyond which the top monomial dominates phi', phi'', phi''' by 4x."""
    if Q.d == 0:
        return t0
    top_a, top_k = abs(Q.coeffs[-1]), Q.exponents[-1]
    k = math.floor(per_octave * math.log2(t0))
    while True:
        lt = k / per_octave
        ok = True
        for m in (1, 2, 3):
            if top_k < m:
                continue
            lhs = math.log2(top_a * falling(top_k, m)) + (top_k - m) * lt
            rest = [
                math.log2(abs(a) * falling(e, m)) + (e - m) * lt
                for a, e in zip(Q.coeffs[:-1], Q.exponents[:-1])
                if e >= m
            ]
            if m == 1 and xi != 0:
                rest.append(math.log2(abs(xi)))
            if rest:
                top_rest = max(rest)
                s = sum(2.0 ** (r - top_rest) for r in rest)
                if lhs < 2 + top_rest + math.log2(s):
                    ok = False
                    break
        if ok:
            return 2.0**lt
        k += 1


# van der Corput constants c_k = 5 * 2^(k-1) - 2 for |phi^(k)| >= mu
_VDC = {2: 8.0, 3: 18.0}


def _side_terms(Q: Fewnomial, xi: float, sign: int, m: int):
    """Sparse form of phi_sign^(m)(t), t > 0."""
    c, e = [], []
    for a, k in zip(Q.coeffs, Q.exponents):
        if k >= m:
            c.append(a * falling(k, m) * sign**k)
            e.append(k - m)
    if m == 1 and xi != 0.0:
        c.append(-sign * xi)
        e.append(0)
    return c, e


def _far_grid(ph: _Phase, t0: float, t_end: float, per_octave: int) -> np.ndarray:
    """Log grid refined so that phi', phi'', phi''' keep one sign on every cell.

    Around each stationary point (root of phi') points accumulate
    geometrically down to a relative distance 2^-44.
    """
    k0 = math.floor(per_octave * math.log2(t0)) + 1
    k1 = math.ceil(per_octave * math.log2(t_end))
    pts = [2.0 ** (np.arange(k0, k1 + 1) / per_octave)]
    cell = 2.0 ** (1.0 / per_octave) - 1.0
    offs = 2.0 ** -(np.arange(2, 89) / 2.0)
    offs = offs[offs <= cell]
    for sign in (1, -1):
        for m in (1, 2, 3):
            c, e = _side_terms(ph.Q, ph.xi, sign, m)
            roots = sparse_positive_roots(c, e, t0, t_end)
            pts.append(np.array(roots))
            if m == 1:
                for r in roots:
                    pts.append(r * (1.0 + offs))
                    pts.append(r * (1.0 - offs))
    grid = np.unique(np.concatenate(pts))
    return grid[(grid > t0) & (grid <= t_end)]


@dataclass
class _Side:
    """IBP data of one side on the shared grid."""

    G: np.ndarray          # two-term IBP antiderivative at grid points
    p1: np.ndarray
    cell_err: np.ndarray   # remainder bound per cell (vdc bound on a neighbourhood's first cell)
    nbhds: list            # stationary neighbourhoods [(L, R)], cells L..R-1
    r_end: float           # |r(t_N)|, remainder of the final monotone tail


def _side(ph: _Phase, grid: np.ndarray, sign: int) -> _Side:
    p0, p1, p2 = ph.side(grid, sign)
    with np.errstate(over="ignore", invalid="ignore"):
        p3 = sign * eval_phase(ph.Q, sign * grid, 3) if ph.Q.n >= 3 else np.zeros_like(grid)
    if not all(np.all(np.isfinite(v)) for v in (p0, p1, p2, p3)):
        raise PhaseOverflow("phase overflows while planning the far field")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        g1 = 1j * (p1 + grid * p2) / (grid**2 * p1**2)
        G = np.exp(1j * p0) * (1.0 / grid - g1) / (1j * p1)
        r = (p1 + grid * p2) / (grid**2 * p1**3)
        dr = np.abs(np.diff(r))
    r = np.where(np.isfinite(r), r, np.inf)
    dr = np.where(np.isfinite(dr), dr, np.inf)
    G = np.where(np.isfinite(G), G, 0.0)

    ncell = grid.size - 1
    sgn = np.sign(p1)
    stat = (sgn[:-1] != sgn[1:]) | (sgn[:-1] == 0) | (sgn[1:] == 0)

    def vdc(L, R):
        best = np.inf
        for k, vals in ((2, p2), (3, p3)):
            seg = vals[L:R + 1]
            if seg[0] != 0 and np.all(np.sign(seg) == np.sign(seg[0])):
                best = min(best, _VDC[k] * np.min(np.abs(seg)) ** (-1.0 / k))
        return best / grid[L]

    # grow each neighbourhood while an edge remainder |r| exceeds its van
    # der Corput bound, so that neither part of the error dominates
    nbhds = []
    for c in np.flatnonzero(stat):
        c = int(c)
        if nbhds and c < nbhds[-1][1]:
            continue
        L, R = c, c + 1
        v = vdc(L, R)
        for _ in range(512):
            eL = abs(r[L]) if L > 0 else 0.0
            eR = abs(r[R]) if R < ncell else 0.0
            if max(eL, eR) <= v:
                break
            if eR >= eL:
                L2, R2 = L, R + 1
            else:
                L2, R2 = L - 1, R
            v2 = vdc(L2, R2)
            if v2 > 2 * v:
                break
            L, R, v = L2, R2, v2
        if nbhds and L < nbhds[-1][1]:
            L = nbhds.pop()[0]
            v = vdc(L, R)
        nbhds.append((L, R))

    cell_err = dr.copy()
    for L, R in nbhds:
        cell_err[L:R] = 0.0
        cell_err[L] = vdc(L, R)
    return _Side(G, p1, cell_err, nbhds, float(abs(r[-1])))


def _far_field(ph: _Phase, t0: float, budget: float, per_octave: int = 16):
    """Split (t0, inf) into quadrature cells and analytically handled cells.

    Returns (cells, tails, err).  `cells` lists (a, b, rate) intervals left
    to quadrature: the first, (t0, t_1), is for the symmetrised integrand;
    the others are for the plain kernel e^{i(Q(u) - u xi)}/u, on u > 0 for
    the plus side and on u < 0 for the minus side, with rate bounding
    |phi'|.  `tails` is tail_plus - tail_minus over the rest, and err
    bounds its error.

    Off the quadrature cells each side is integrated by two IBP steps on
    monotone cells (remainder bounded by the variation of
    r = (phi' + t phi'') / (t^2 phi'^3)) and bounded by van der Corput on
    stationary neighbourhoods.  Cells are handed to quadrature greedily,
    largest error per unit of oscillation first, until the rest fits the
    budget.
    """
    Q, xi = ph.Q, ph.xi
    t_end = max(_dominance_start(Q, xi, t0, per_octave), 4.0 * t0)
    for _ in range(200):
        grid = _far_grid(ph, t0, t_end, per_octave)
        sides = [_side(ph, grid, sg) for sg in (1, -1)]
        if sum(s.r_end for s in sides) <= budget / 4:
            break
        # beyond t_end everything is monotone; push the grid outwards
        t_end *= 16.0
    else:
        raise PhaseOverflow("could not certify the far field")

    ncell = grid.size - 1
    # candidate groups: single monotone cells and whole neighbourhoods, per side
    g_err, g_cost, members = [], [], []
    for si, s in enumerate(sides):
        rate = np.maximum(np.abs(s.p1[:-1]), np.abs(s.p1[1:]))
        cost = np.maximum(1.0, rate * np.diff(grid) / math.pi)
        in_nb = np.zeros(ncell, dtype=bool)
        for L, R in s.nbhds:
            in_nb[L:R] = True
            g_err.append(float(s.cell_err[L:R].sum()))
            g_cost.append(float(cost[L:R].sum()))
            members.append((si, L, R))
        for j in np.flatnonzero(~in_nb):
            g_err.append(float(s.cell_err[j]))
            g_cost.append(float(cost[j]))
            members.append((si, int(j), int(j) + 1))
    g_err = np.nan_to_num(np.array(g_err), nan=np.inf)
    g_cost = np.array(g_cost)
    r_end = sum(s.r_end for s in sides)
    order = np.argsort(-(g_err / g_cost), kind="stable")
    chosen = np.zeros(g_err.size, dtype=bool)
    with np.errstate(over="ignore"):
        remaining = g_err.sum() + r_end
        for g in order:
            if remaining <= budget:
                break
            chosen[g] = True
            remaining = g_err[~chosen].sum() + r_end
    if not remaining <= budget:
        raise ToleranceNotMet("far field could not be certified")

    quad = np.zeros((2, ncell), dtype=bool)
    for g in np.flatnonzero(chosen):
        si, L, R = members[g]
        quad[si, L:R] = True
    cells = [(t0, float(grid[0]), math.inf)]
    tails = 0j
    for si, (s, sg) in enumerate(zip(sides, (1, -1))):
        mono = np.ones(ncell, dtype=bool)
        for L, R in s.nbhds:
            mono[L:R] = False
        keep = mono & ~quad[si]
        tails += sg * (np.sum((s.G[1:] - s.G[:-1])[keep]) - s.G[-1])
        rate = np.maximum(np.abs(s.p1[:-1]), np.abs(s.p1[1:]))
        for j in np.flatnonzero(quad[si]):
            lo, hi = float(grid[j]), float(grid[j + 1])
            # minus-side cells live on the negative axis of the plain kernel
            cells.append((lo, hi, float(rate[j])) if sg > 0 else (-hi, -lo, float(rate[j])))
    return cells, complex(tails), float(remaining)


def _panels(ph: _Phase, cells, base: float, phase_per_panel: float):
    """Panels over the cells, each at most `phase_per_panel` of phase.

    Cells with an infinite rate are first split geometrically with ratio
    `base` and rated by the crude bound on |phi'|.
    """
    xs, ys, rs = [], [], []
    for lo, hi, rate in cells:
        if not hi > lo:
            continue
        if math.isfinite(rate):
            xs.append(lo)
            ys.append(hi)
            rs.append(rate)
            continue
        l0 = math.floor(math.log(lo, base))
        l1 = math.ceil(math.log(hi, base))
        edges = np.unique(np.clip(base ** np.arange(l0, l1 + 1, dtype=float), lo, hi))
        xs.extend(edges[:-1])
        ys.extend(edges[1:])
        rs.extend(ph.dphi_bound(edges[1:]))
    x, y, rate = np.array(xs), np.array(ys), np.array(rs)
    counts = np.maximum(1, np.ceil(rate * (y - x) / phase_per_panel))
    if counts.sum() > 20_000_000:
        raise ToleranceNotMet(f"oscillation too dense: {counts.sum():.3g} panels needed")
    counts = counts.astype(np.int64)
    total = int(counts.sum())
    starts = np.repeat(x, counts)
    widths = np.repeat((y - x) / counts, counts)
    offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    a = starts + offs * widths
    b = a + widths
    floor = np.repeat(np.minimum(np.abs(x), np.abs(y)) * 2.0**-20, counts)
    return a, b, floor, x.size


def _geometric_panels(ph: _Phase, lo: float, hi: float, base: float, phase_per_panel: float):
    return _panels(ph, [(lo, hi, math.inf)], base, phase_per_panel)


def pv_multiplier(Q: Fewnomial, xi: float, tol: float = 1e-6) -> MultiplierSample:
    """Certified m(xi) = p.v. int e^{i(Q(t) - t xi)} dt/t."""
    if not (1e-12 < tol < 1e-2):
        raise ValueError("tol must lie in (1e-12, 1e-2)")
    xi = float(xi)
    ph = _Phase(Q, xi)
    if not ph.odd and xi == 0.0:
        return MultiplierSample(xi, 0j, 0.0, 0)
    t0 = _choose_head(ph, tol / 4)
    head_err = ph.head_bound(t0)
    cells, tails, far_err = _far_field(ph, t0, tol / 4)
    base = 2.0 ** (1.0 / Q.n) if Q.n >= 2 else 2.0
    a, b, floor, blocks = _panels(ph, cells, base, math.pi)
    budget = tol - head_err - far_err
    split = cells[0][1]

    def f(u):
        near = (u > 0) & (u <= split)
        out = np.empty(u.shape, dtype=complex)
        out[near] = ph.integrand(u[near])
        out[~near] = ph.kernel(u[~near])
        return out

    try:
        val, err, _ = adaptive(f, a, b, budget, min_width=floor)
    except ToleranceNotMet as exc:
        raise ToleranceNotMet(
            f"m({xi:g}) not certified to {tol:g}", value=exc.value + tails,
            abs_err=exc.abs_err + head_err + far_err,
        ) from exc
    return MultiplierSample(xi, complex(val + tails), float(err + head_err + far_err), blocks)


# -- per-scale pieces --------------------------------------------------------


def piece_index(frame, comp: GoodComponent, l_prime: int) -> int:
    """Index k of the bump psi^(j1)_k used for offset l_prime: ceil(gamma_j1) + l_prime."""
    g = frame.gamma[comp.j1 - 1]
    return math.ceil(g) + int(l_prime)


def _piece_support(frame, comp: GoodComponent, l_prime: int):
    base = frame.lam_j[comp.j1 - 1]
    k = piece_index(frame, comp, l_prime)
    lo = base**k
    hi = base ** (k + 2)
    r = comp.range
    if math.isfinite(r.lo):
        lo = max(lo, frame.lam**r.lo)
    if math.isfinite(r.hi):
        hi = min(hi, frame.lam ** (r.hi + 2))
    return (lo, hi) if lo < hi else None


def _piece_weight(frame, comp, l_prime):
    psi = PartitionOfUnity(frame.lam_j[comp.j1 - 1])
    phi = PartitionOfUnity(frame.lam)
    k = piece_index(frame, comp, l_prime)

    def w(t):
        return psi.psi0(psi.log_scale(t) - k) * component_cutoff(phi, comp, t)

    return w


class _PieceEvaluator:
    """One piece at many frequencies on a shared GK15 panel layout.

    The weight and Q_odd, Q_even are evaluated at the nodes once; each
    frequency then costs one sine per node.  Panels are sized for
    |xi| <= xi_max.  Values whose embedded error estimate exceeds `tol`
    are recomputed adaptively.
    """

    def __init__(self, Q: Fewnomial, comp: GoodComponent, l_prime: int, xi_max: float, tol: float, frame):
        self.Q, self.comp, self.l_prime, self.tol, self.frame = Q, comp, l_prime, tol, frame
        self.xi_max = abs(float(xi_max))
        supp = _piece_support(frame, comp, l_prime)
        self.empty = supp is None
        if self.empty:
            return
        ph = _Phase(Q, self.xi_max)
        a, b, _, _ = _geometric_panels(ph, supp[0], supp[1], 2.0 ** 0.125, 3 * math.pi)
        half = 0.5 * (b - a)
        t = (0.5 * (a + b))[:, None] + half[:, None] * NODES[None, :]
        self.t = t
        self.half = half
        self.po = sum((c * t**k for c, k in Q.odd_part()), np.zeros_like(t))
        pe = sum((c * t**k for c, k in Q.even_part()), np.zeros_like(t))
        self.base = 2j * np.exp(1j * pe) * _piece_weight(frame, comp, l_prime)(t) / t
        self.has_odd = bool(Q.odd_part())

    def __call__(self, xis) -> np.ndarray:
        xis = np.atleast_1d(np.asarray(xis, dtype=float))
        out = np.zeros(xis.size, dtype=complex)
        if self.empty:
            return out
        for i, x in enumerate(xis):
            if not self.has_odd and x == 0.0:
                continue
            if abs(x) > self.xi_max:
                out[i] = piece_multiplier(self.Q, self.comp, self.l_prime, x, self.tol, self.frame)
                continue
            y = np.sin(self.po - self.t * x) * self.base
            k = y @ KRONROD_WEIGHTS * self.half
            g = y @ GAUSS_WEIGHTS * self.half
            if np.abs(k - g).sum() <= self.tol:
                out[i] = k.sum()
            else:
                out[i] = piece_multiplier(self.Q, self.comp, self.l_prime, x, self.tol, self.frame)
        return out


def piece_multiplier(Q: Fewnomial, comp: GoodComponent, l_prime: int, xi: float, tol: float = 1e-6, frame=None) -> complex:
    """int e^{i(Q(t) - t xi)} psi^(j1)_k(t) Phi(t) dt/t with k = ceil(gamma_j1) + l_prime."""
    frame = frame or scale_frame(Q)
    supp = _piece_support(frame, comp, l_prime)
    if supp is None:
        return 0j
    ph = _Phase(Q, xi)
    if not ph.odd and xi == 0.0:
        return 0j
    w = _piece_weight(frame, comp, l_prime)

    def f(t):
        return ph.integrand(t) * w(t)

    lo, hi = supp
    a, b, floor, _ = _geometric_panels(ph, lo, hi, 2.0 ** 0.125, 3 * math.pi)
    val, _, _ = adaptive(f, a, b, tol, min_width=floor)
    return complex(val)


def stationary_frequencies(Q: Fewnomial, comp: GoodComponent, l_prime: int, per_piece: int = 16, frame=None) -> List[float]:
    """Frequencies putting a stationary point of either side inside the piece support."""
    frame = frame or scale_frame(Q)
    supp = _piece_support(frame, comp, l_prime)
    if supp is None:
        return []
    s = np.geomspace(supp[0], supp[1], per_piece + 2)[1:-1]
    xs = np.concatenate([eval_phase(Q, s, 1), eval_phase(Q, -s, 1)])
    return sorted(set(float(x) for x in xs))


def piece_sup(Q: Fewnomial, comp: GoodComponent, l_prime: int, xi_grid: Optional[Sequence[float]] = None,
              tol: float = 1e-5, frame=None, refine: bool = True) -> tuple:
    """(max |piece|, argmax xi) over xi_grid, by default the stationary frequencies.

    With `refine`, the best grid point is polished by a bounded scalar
    search between its neighbours.
    """
    from scipy.optimize import minimize_scalar

    frame = frame or scale_frame(Q)
    xs = np.array(sorted(stationary_frequencies(Q, comp, l_prime, frame=frame) if xi_grid is None else xi_grid), dtype=float)
    if xs.size == 0:
        return 0.0, math.nan
    ev = _PieceEvaluator(Q, comp, l_prime, np.abs(xs).max(), tol, frame)
    vals = np.abs(ev(xs))
    i = int(np.argmax(vals))
    best, arg = float(vals[i]), float(xs[i])
    if refine and xs.size >= 3 and best > 0:
        lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
        res = minimize_scalar(lambda x: -abs(ev([x])[0]), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-4 * max(abs(hi - lo), 1e-300), "maxiter": 16})
        if -res.fun > best:
            best, arg = float(-res.fun), float(res.x)
    return best, arg


@dataclass(frozen=True)
class DecayFit:
    """log2 s(l) ~ log2 C_hat - delta_hat * l fitted over l_range.

    `second_derivative_ratio` is the minimum of
    lam_j1^(2k) |Q''(lam_j1^k t)| / 2^(l-2) over the piece supports.
    """

    C_hat: float
    delta_hat: float
    residual: float
    l_range: IntegerInterval
    levels: tuple = ()
    second_derivative_ratio: float = math.nan


def second_derivative_ratio(Q: Fewnomial, comp: GoodComponent, l_prime: int, samples: int = 33, frame=None) -> float:
    """min over the piece support of lam_j1^(2k) |Q''(lam_j1^k t)| / 2^(l'-2); nan if empty."""
    frame = frame or scale_frame(Q)
    supp = _piece_support(frame, comp, l_prime)
    if supp is None:
        return math.nan
    base = frame.lam_j[comp.j1 - 1]
    k = piece_index(frame, comp, l_prime)
    s = np.geomspace(supp[0], supp[1], samples)
    w = component_cutoff(PartitionOfUnity(frame.lam), comp, s)
    s = s[w > 0]
    if s.size == 0:
        return math.nan
    scale = base ** (2 * k)
    vals = np.concatenate([np.abs(eval_phase(Q, s, 2)), np.abs(eval_phase(Q, -s, 2))])
    # vals are Q'' at s = lam^k t, so lam^(2k)|Q''(lam^k t)| = scale * vals
    return float(np.min(scale * vals) / 2.0 ** (l_prime - 2))


def decay_fit(Q: Fewnomial, comp: GoodComponent, xi_grid: Optional[Sequence[float]], l_range: IntegerInterval, tol: float = 1e-5) -> DecayFit:
    """Fit the decay of s(l) = max_xi |piece(l, xi)|.

    With xi_grid=None every scale is probed at its own stationary
    frequencies (see stationary_frequencies), refined around the best one,
    which is where the maximum over xi sits.
    """
    frame = scale_frame(Q)
    ls, ss = [], []
    ratio = math.inf
    for l in l_range:
        s, _ = piece_sup(Q, comp, l, xi_grid, tol, frame, refine=xi_grid is None)
        r = second_derivative_ratio(Q, comp, l, frame=frame)
        if not math.isnan(r):
            ratio = min(ratio, r)
        if s > 0:
            ls.append(l)
            ss.append(s)
    if len(ls) < 5:
        raise InsufficientPoints(f"only {len(ls)} nonzero scales in {l_range}")
    x = np.array(ls, dtype=float)
    y = np.log2(ss)
    slope, icpt = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + icpt)) ** 2)))
    return DecayFit(
        C_hat=float(2.0**icpt),
        delta_hat=float(-slope),
        residual=resid,
        l_range=l_range,
        levels=tuple(zip(ls, ss)),
        second_derivative_ratio=ratio if math.isfinite(ratio) else math.nan,
    )


# -- supremum over a frequency grid -----------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """xi = +-2^(k / per_octave) for k_lo <= k <= k_hi, plus 0."""

    k_lo: int
    k_hi: int
    per_octave: int = 4
    include_zero: bool = True

    def values(self):
        mags = 2.0 ** (np.arange(self.k_lo, self.k_hi + 1) / self.per_octave)
        xs = list(-mags[::-1]) + ([0.0] if self.include_zero else []) + list(mags)
        return [float(x) for x in xs]


def default_grid(Q: Fewnomial, per_octave: int = 4, low: float = 2.0**-4, high: float = 2.0**12) -> GridSpec:
    """Grid spanning the stationary frequencies of the region low <= max_j |a_j t^a_j| <= high.

    Below that region m(xi) ~ m(0); above it stationary contributions are
    of size ~ high^(-1/2) and m approaches -i pi sgn(xi).
    """
    if Q.d == 0:
        return GridSpec(-8 * per_octave, 8 * per_octave, per_octave)
    # t where the largest monomial reaches a given size
    def t_at(size):
        return min(
            (size / abs(a)) ** (1.0 / k) for a, k in zip(Q.coeffs, Q.exponents)
        )

    def dbound(t):
        return sum(abs(a) * k * t ** (k - 1) for a, k in zip(Q.coeffs, Q.exponents))

    xi_lo = dbound(t_at(low)) / 4
    xi_hi = dbound(t_at(high)) * 4
    return GridSpec(
        math.floor(per_octave * math.log2(xi_lo)),
        math.ceil(per_octave * math.log2(xi_hi)),
        per_octave,
    )


@dataclass(frozen=True)
class SupResult:
    sup: float
    argmax_xi: float
    samples: tuple
    certified_fraction: float
    asymptote_gap: float

    def to_json(self):
        return {
            "sup": self.sup,
            "argmax_xi": self.argmax_xi,
            "certified_fraction": self.certified_fraction,
            "asymptote_gap": self.asymptote_gap,
        }


def multiplier_sup(Q: Fewnomial, grid: Optional[GridSpec] = None, tol: float = 1e-6) -> SupResult:
    """sup over the grid of |m(xi)|, taken over certified samples only."""
    grid = grid or default_grid(Q)
    xs = grid.values()
    if not xs:
        raise ValueError("empty frequency grid")
    samples = []
    for x in xs:
        try:
            samples.append(pv_multiplier(Q, x, tol))
        except ToleranceNotMet as exc:
            v = exc.value if exc.value is not None else complex("nan")
            e = exc.abs_err if exc.abs_err is not None else math.inf
            samples.append(MultiplierSample(x, complex(v), float(e), 0, certified=False))
    good = [s for s in samples if s.certified]
    if good:
        best = max(good, key=lambda s: abs(s.value))
        sup, arg = abs(best.value), best.xi
    else:
        sup, arg = math.nan, math.nan
    ends = [s for s in (samples[0], samples[-1]) if s.certified and s.xi != 0]
    gap = max((abs(s.value - hilbert_value(s.xi)) for s in ends), default=math.nan)
    return SupResult(sup, arg, tuple(samples), len(good) / len(samples), gap)
