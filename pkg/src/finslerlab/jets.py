"""Forward-mode truncated Taylor arithmetic (multivariate jets).

A :class:`Jet` stores the Taylor coefficients of a scalar expression in
``n_vars`` real variables, truncated at total degree ``order``.  The
coefficient of the monomial z^alpha sits at a fixed position in a dense
array ordered by (degree, lexicographic index pattern), and the mixed
partial d^alpha f equals ``coeff(alpha) * alpha!``.

Arithmetic (+, -, *, /, integer and real powers) and the analytic
functions below (sqrt, exp, log, sin, cos, sinh, cosh) are closed on jets
and exact to the truncation order; composition happens through the
univariate Taylor series of the outer function evaluated by Horner's rule
in the nilpotent part.  Any code written against the module-level
functions runs unchanged on plain floats and on jets.  That shared scalar
ring is the architectural contract of the package: one metric definition
serves point evaluation, spray/curvature assembly, and the implicit
root-finding used for convex-body metrics.

An independent finite-difference oracle (:func:`fd_oracle`) cross-checks
any jet derivative with nested central differences plus two-level
Richardson extrapolation; it never touches the jet code path.
"""

import itertools
import math
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import FDOracleError, JetError


# ---------------------------------------------------------------------------
# context: monomial bookkeeping shared by every jet of a given (n_vars, order)


class JetContext:
    """Precomputed monomial tables for jets in ``n_vars`` variables.

    Holds the graded monomial list, the sparse multiplication table
    (triples i, j -> k with monomial_i * monomial_j = monomial_k kept when
    the degrees fit), the multi-index factorials used to convert
    coefficients to derivatives, and scatter maps used to reshape
    coefficient data into dense symmetric derivative tensors.
    """

    def __init__(self, n_vars, order):
        if n_vars < 1:
            raise JetError(f"n_vars must be >= 1, got {n_vars}")
        if order < 1:
            raise JetError(f"order must be >= 1, got {order}")
        self.n_vars = n_vars
        self.order = order

        monos = []
        degree_start = []
        for deg in range(order + 1):
            degree_start.append(len(monos))
            for combo in itertools.combinations_with_replacement(range(n_vars), deg):
                e = [0] * n_vars
                for i in combo:
                    e[i] += 1
                monos.append(tuple(e))
        degree_start.append(len(monos))

        self.monomials = monos
        self.n_terms = len(monos)
        self.degree_start = degree_start
        self.index = {m: p for p, m in enumerate(monos)}
        self.degrees = np.array([sum(m) for m in monos], dtype=np.int64)
        self.factorials = np.array(
            [math.prod(math.factorial(e) for e in m) for m in monos]
        )

        mi, mj, mk = [], [], []
        for da in range(order + 1):
            for db in range(order + 1 - da):
                for i in range(degree_start[da], degree_start[da + 1]):
                    ma = monos[i]
                    for j in range(degree_start[db], degree_start[db + 1]):
                        mb = monos[j]
                        key = tuple(ea + eb for ea, eb in zip(ma, mb))
                        mi.append(i)
                        mj.append(j)
                        mk.append(self.index[key])
        self.mul_i = np.array(mi, dtype=np.int64)
        self.mul_j = np.array(mj, dtype=np.int64)
        self.mul_k = np.array(mk, dtype=np.int64)

        self._tensor_maps = {}
        self._partial_maps = {}

    # -- derivative-tensor scatter ---------------------------------------

    def tensor_map(self, k):
        """Maps for degree-k coefficients <-> dense d^k derivative tensor.

        Returns (slot_mono, slot_fact, repr_slot): for each flat slot of the
        (n_vars,)*k tensor the monomial position and its alpha!, plus one
        representative flat slot per degree-k monomial.
        """
        if k in self._tensor_maps:
            return self._tensor_maps[k]
        if not 1 <= k <= self.order:
            raise JetError(f"tensor order {k} outside 1..{self.order}")
        d = self.n_vars
        size = d**k
        slot_mono = np.empty(size, dtype=np.int64)
        slot_fact = np.empty(size)
        lo = self.degree_start[k]
        hi = self.degree_start[k + 1]
        repr_slot = np.full(hi - lo, -1, dtype=np.int64)
        for flat, combo in enumerate(itertools.product(range(d), repeat=k)):
            e = [0] * d
            for i in combo:
                e[i] += 1
            pos = self.index[tuple(e)]
            slot_mono[flat] = pos
            slot_fact[flat] = self.factorials[pos]
            if repr_slot[pos - lo] < 0:
                repr_slot[pos - lo] = flat
        self._tensor_maps[k] = (slot_mono, slot_fact, repr_slot)
        return self._tensor_maps[k]

    def partial_map(self, i):
        """Shift map realizing d/dz_i as an (order-1)-jet of the derivative."""
        if i in self._partial_maps:
            return self._partial_maps[i]
        if not 0 <= i < self.n_vars:
            raise JetError(f"variable index {i} outside 0..{self.n_vars - 1}")
        lower = get_context(self.n_vars, self.order - 1) if self.order > 1 else None
        count = lower.n_terms if lower is not None else 1
        src = np.empty(count, dtype=np.int64)
        scale = np.empty(count)
        target = lower.monomials if lower is not None else [(0,) * self.n_vars]
        for q, mono in enumerate(target):
            shifted = list(mono)
            shifted[i] += 1
            src[q] = self.index[tuple(shifted)]
            scale[q] = shifted[i]
        self._partial_maps[i] = (lower, src, scale)
        return self._partial_maps[i]


@lru_cache(maxsize=None)
def get_context(n_vars, order):
    return JetContext(n_vars, order)


# ---------------------------------------------------------------------------
# the jet scalar


def _coerce(value):
    if isinstance(value, (int, float, np.integer, np.floating)):
        return float(value)
    return None


class Jet:
    """Truncated Taylor expansion of a scalar expression."""

    __slots__ = ("ctx", "coeffs")
    # keep numpy from hijacking scalar-op dispatch so float64 * Jet works
    __array_ufunc__ = None

    def __init__(self, ctx, coeffs):
        self.ctx = ctx
        self.coeffs = coeffs

    # -- introspection -----------------------------------------------------

    @property
    def order(self):
        return self.ctx.order

    @property
    def n_vars(self):
        return self.ctx.n_vars

    @property
    def value(self):
        """Base (degree-0) value."""
        return self.coeffs[0]

    def __repr__(self):
        return (
            f"Jet(n_vars={self.ctx.n_vars}, order={self.ctx.order}, "
            f"value={self.coeffs[0]!r})"
        )

    # -- ring operations ----------------------------------------------------

    def _check_ctx(self, other):
        if other.ctx is not self.ctx:
            raise JetError("jets from different contexts cannot be combined")

    def __neg__(self):
        return Jet(self.ctx, -self.coeffs)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check_ctx(other)
            return Jet(self.ctx, self.coeffs + other.coeffs)
        c = _coerce(other)
        if c is None:
            return NotImplemented
        out = self.coeffs.copy()
        out[0] += c
        return Jet(self.ctx, out)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            self._check_ctx(other)
            return Jet(self.ctx, self.coeffs - other.coeffs)
        c = _coerce(other)
        if c is None:
            return NotImplemented
        out = self.coeffs.copy()
        out[0] -= c
        return Jet(self.ctx, out)

    def __rsub__(self, other):
        c = _coerce(other)
        if c is None:
            return NotImplemented
        out = -self.coeffs
        out[0] += c
        return Jet(self.ctx, out)

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check_ctx(other)
            ctx = self.ctx
            out = _kernels.multiply(
                self.coeffs, other.coeffs, ctx.mul_i, ctx.mul_j, ctx.mul_k, ctx.n_terms
            )
            return Jet(ctx, out)
        c = _coerce(other)
        if c is None:
            return NotImplemented
        return Jet(self.ctx, self.coeffs * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            self._check_ctx(other)
            return self * _reciprocal(other)
        c = _coerce(other)
        if c is None:
            return NotImplemented
        if c == 0.0:
            raise ZeroDivisionError("jet divided by zero scalar")
        return Jet(self.ctx, self.coeffs / c)

    def __rtruediv__(self, other):
        c = _coerce(other)
        if c is None:
            return NotImplemented
        return _reciprocal(self) * c

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)):
            p = int(p)
            if p < 0:
                return _reciprocal(self._int_pow(-p))
            return self._int_pow(p)
        c = _coerce(p)
        if c is None:
            return NotImplemented
        return power(self, c)

    def _int_pow(self, p):
        result = constant(self.ctx, 1.0)
        base = self
        while p:
            if p & 1:
                result = result * base
            base_needed = p >> 1
            if base_needed:
                base = base * base
            p = base_needed
        return result


# ---------------------------------------------------------------------------
# constructors


def constant(ctx, value):
    coeffs = np.zeros(ctx.n_terms)
    coeffs[0] = float(value)
    return Jet(ctx, coeffs)


def variables(values, order):
    """Seed one jet per entry of ``values``, each with a unit linear coefficient."""
    vals = np.asarray(values, dtype=float).ravel()
    ctx = get_context(vals.size, order)
    out = []
    for i, v in enumerate(vals):
        coeffs = np.zeros(ctx.n_terms)
        coeffs[0] = v
        coeffs[1 + i] = 1.0  # degree-1 block starts right after the constant
        out.append(Jet(ctx, coeffs))
    return out


def seed_variables(x, y, order):
    """Seed the 2n coordinate jets for a tangent-space point (x, y).

    ``order`` must lie in {1, 2, 3, 4}; the returned list holds the x-jets
    followed by the y-jets, each carrying its own unit first-order
    coefficient.
    """
    if order not in (1, 2, 3, 4):
        raise JetError(f"jet order must be one of 1..4, got {order!r}")
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise JetError(f"x and y must have equal length, got {x.size} and {y.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise JetError("seed point contains non-finite entries")
    return variables(np.concatenate([x, y]), order)


# ---------------------------------------------------------------------------
# derivative access


def _normalize_idx(ctx, idx):
    idx = tuple(int(e) for e in np.asarray(idx).ravel())
    if len(idx) != ctx.n_vars:
        raise JetError(
            f"multi-index length {len(idx)} does not match n_vars={ctx.n_vars}"
        )
    if any(e < 0 for e in idx):
        raise JetError(f"multi-index entries must be >= 0, got {idx}")
    return idx


def extract_derivative(jet, idx):
    """Mixed partial d^idx f at the seed point (coefficient times idx!)."""
    ctx = jet.ctx
    idx = _normalize_idx(ctx, idx)
    total = sum(idx)
    if total > ctx.order:
        raise JetError(f"|idx| = {total} exceeds jet order {ctx.order}")
    pos = ctx.index[idx]
    return jet.coeffs[pos] * ctx.factorials[pos]


def derivative_tensors(jet, max_order=None):
    """Dense symmetric derivative tensors [f, Df, D2f, ...] up to max_order."""
    ctx = jet.ctx
    if max_order is None:
        max_order = ctx.order
    if max_order > ctx.order:
        raise JetError(f"requested order {max_order} exceeds jet order {ctx.order}")
    out = [jet.coeffs[0]]
    d = ctx.n_vars
    for k in range(1, max_order + 1):
        slot_mono, slot_fact, _ = ctx.tensor_map(k)
        out.append((jet.coeffs[slot_mono] * slot_fact).reshape((d,) * k))
    return out


def jet_from_tensors(ctx, value, tensors):
    """Inverse of :func:`derivative_tensors`: build a jet from value + D1..Dk.

    ``tensors[k-1]`` must be the symmetric order-k derivative tensor; only
    one representative entry per monomial is read.
    """
    if len(tensors) != ctx.order:
        raise JetError(
            f"need {ctx.order} tensors for an order-{ctx.order} jet, got {len(tensors)}"
        )
    coeffs = np.zeros(ctx.n_terms)
    coeffs[0] = float(value)
    for k, tensor in enumerate(tensors, start=1):
        tensor = np.asarray(tensor)
        _, _, repr_slot = ctx.tensor_map(k)
        lo = ctx.degree_start[k]
        hi = ctx.degree_start[k + 1]
        coeffs[lo:hi] = tensor.reshape(-1)[repr_slot] / ctx.factorials[lo:hi]
    return Jet(ctx, coeffs)


def jet_partial(jet, i):
    """The derivative d jet/dz_i as a jet one order lower."""
    ctx = jet.ctx
    if ctx.order < 2:
        raise JetError("cannot take a jet partial of an order-1 jet")
    lower, src, scale = ctx.partial_map(i)
    return Jet(lower, jet.coeffs[src] * scale)


def truncate(jet, order):
    """The same expansion truncated to a lower order."""
    ctx = jet.ctx
    if order == ctx.order:
        return jet
    if order > ctx.order:
        raise JetError(f"cannot truncate order {ctx.order} up to {order}")
    lower = get_context(ctx.n_vars, order)
    return Jet(lower, jet.coeffs[: lower.n_terms].copy())


# ---------------------------------------------------------------------------
# analytic functions on the scalar ring


def _compose(jet, series):
    """g(f) for g given by its Taylor coefficients about f's base value.

    ``series[k]`` = g^(k)(f0)/k!.  Horner evaluation in the nilpotent part
    f - f0 costs ``order`` table multiplications.
    """
    ctx = jet.ctx
    nil = jet.coeffs.copy()
    nil[0] = 0.0
    nil_jet = Jet(ctx, nil)
    acc = constant(ctx, series[ctx.order])
    for k in range(ctx.order - 1, -1, -1):
        acc = acc * nil_jet
        acc.coeffs[0] += series[k]
    return acc


def _reciprocal(jet):
    c = jet.coeffs[0]
    if c == 0.0:
        raise JetError("division by a jet with zero base value")
    series = [(-1.0) ** k / c ** (k + 1) for k in range(jet.ctx.order + 1)]
    return _compose(jet, series)


def sqrt(v):
    if isinstance(v, Jet):
        return power(v, 0.5)
    return np.sqrt(v)


def power(v, p):
    """v**p for real p (positive base required on the jet path)."""
    if isinstance(v, Jet):
        c = v.coeffs[0]
        if c <= 0.0:
            raise JetError(f"power({p}) of a jet requires a positive base, got {c}")
        series = []
        binom = 1.0
        for k in range(v.ctx.order + 1):
            series.append(binom * c ** (p - k))
            binom *= (p - k) / (k + 1)
        return _compose(v, series)
    return np.power(v, p)


def exp(v):
    if isinstance(v, Jet):
        e = math.exp(v.coeffs[0])
        series = [e / math.factorial(k) for k in range(v.ctx.order + 1)]
        return _compose(v, series)
    return np.exp(v)


def log(v):
    if isinstance(v, Jet):
        c = v.coeffs[0]
        if c <= 0.0:
            raise JetError(f"log of a jet requires a positive base, got {c}")
        series = [math.log(c)]
        for k in range(1, v.ctx.order + 1):
            series.append((-1.0) ** (k + 1) / (k * c**k))
        return _compose(v, series)
    return np.log(v)


def _cyclic(v, table):
    c = v.coeffs[0]
    series = [table[k % 4](c) / math.factorial(k) for k in range(v.ctx.order + 1)]
    return _compose(v, series)


def sin(v):
    if isinstance(v, Jet):
        return _cyclic(v, (math.sin, math.cos, lambda c: -math.sin(c), lambda c: -math.cos(c)))
    return np.sin(v)


def cos(v):
    if isinstance(v, Jet):
        return _cyclic(v, (math.cos, lambda c: -math.sin(c), lambda c: -math.cos(c), math.sin))
    return np.cos(v)


def sinh(v):
    if isinstance(v, Jet):
        c = v.coeffs[0]
        s, ch = math.sinh(c), math.cosh(c)
        series = [(s if k % 2 == 0 else ch) / math.factorial(k) for k in range(v.ctx.order + 1)]
        return _compose(v, series)
    return np.sinh(v)


def cosh(v):
    if isinstance(v, Jet):
        c = v.coeffs[0]
        s, ch = math.sinh(c), math.cosh(c)
        series = [(ch if k % 2 == 0 else s) / math.factorial(k) for k in range(v.ctx.order + 1)]
        return _compose(v, series)
    return np.cosh(v)


def is_jet(v):
    return isinstance(v, Jet)


# ---------------------------------------------------------------------------
# finite-difference oracle (independent of the jet code path)

# base steps balance truncation against round-off per derivative order;
# two Richardson levels then push truncation to O(h^6).  The smallest step
# actually used is base/4, and cancellation noise grows like eps/h^order,
# so higher orders need visibly larger bases to keep the noise floor under
# the 1e-6 relative target once extrapolation has killed the truncation.
DEFAULT_FD_STEPS = {1: 1e-4, 2: 5e-4, 3: 2e-2, 4: 2.5e-2}


def _nested_central(fz, z, coords, h):
    if not coords:
        return fz(z)
    i = coords[0]
    rest = coords[1:]
    zp = z.copy()
    zp[i] += h[i]
    zm = z.copy()
    zm[i] -= h[i]
    return (_nested_central(fz, zp, rest, h) - _nested_central(fz, zm, rest, h)) / (
        2.0 * h[i]
    )


def fd_derivative(fz, z, idx, base_step=None, levels=2):
    """Central-difference mixed partial of ``fz`` at ``z`` with extrapolation.

    ``idx`` is an exponent multi-index over the entries of ``z``.  Raises
    :class:`FDOracleError` when successive extrapolation levels fail to
    contract (non-smooth point or hopeless scaling).
    """
    z = np.asarray(z, dtype=float).ravel()
    idx = tuple(int(e) for e in np.asarray(idx).ravel())
    if len(idx) != z.size:
        raise JetError(f"multi-index length {len(idx)} does not match len(z)={z.size}")
    k = sum(idx)
    if not 1 <= k <= 4:
        raise JetError(f"fd oracle supports derivative orders 1..4, got {k}")
    coords = tuple(
        i for i, e in enumerate(idx) for _ in range(e)
    )
    if base_step is None:
        base_step = DEFAULT_FD_STEPS[k]
    h0 = base_step * np.maximum(1.0, np.abs(z))

    estimates = [
        _nested_central(fz, z, coords, h0 / 2.0**lev) for lev in range(levels + 1)
    ]
    table = [list(estimates)]
    for m in range(1, levels + 1):
        prev = table[-1]
        fac = 4.0**m
        table.append(
            [(fac * prev[i + 1] - prev[i]) / (fac - 1.0) for i in range(len(prev) - 1)]
        )
    best = table[-1][0]

    if levels >= 2:
        d0 = abs(table[0][1] - table[0][0])
        d1 = abs(table[1][1] - table[1][0])
        scale = max(1.0, abs(best))
        if d1 > 0.5 * d0 and d1 > 1e-6 * scale:
            raise FDOracleError(
                f"Richardson extrapolation diverges at z={z}, idx={idx}: "
                f"level differences {d0:.3e} -> {d1:.3e}"
            )
    return best


def fd_oracle(f, x, y, idx, base_step=None, levels=2):
    """Finite-difference estimate of d^idx f(x, y) over the joined (x, y) slots.

    ``f`` is called as f(x_array, y_array) -> float; ``idx`` has one
    exponent per entry of (x, y).  Documented accuracy target: 1e-6
    relative for well-scaled smooth inputs at derivative order <= 3.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    n = x.size

    def fz(z):
        return float(f(z[:n], z[n:]))

    return fd_derivative(fz, np.concatenate([x, y]), idx, base_step, levels)


def jet_of(f, x, y, order):
    """Evaluate a scalar-ring-generic f(x, y) over seeded jets."""
    n = np.asarray(x).size
    zs = seed_variables(x, y, order)
    return f(zs[:n], zs[n:])
