"""Jet arithmetic: exactness, chain rule, FD cross-checks, backend parity."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finslerlab import _kernels, jets as jr
from finslerlab.errors import FDOracleError, JetError


# ---------------------------------------------------------------------------
# seeding and extraction basics


def test_seed_variables_bases_and_gradients():
    zs = jr.seed_variables([2.0], [3.0], order=1)
    assert len(zs) == 2
    assert zs[0].value == 2.0 and zs[1].value == 3.0
    assert jr.extract_derivative(zs[0], (1, 0)) == 1.0
    assert jr.extract_derivative(zs[0], (0, 1)) == 0.0
    assert jr.extract_derivative(zs[1], (0, 1)) == 1.0


def test_mixed_partial_of_product():
    x, y = jr.seed_variables([2.0], [3.0], order=2)
    assert jr.extract_derivative(x * y, (1, 1)) == 1.0


def test_second_derivative_of_square():
    zs = jr.seed_variables([0.0, 0.0], [1.0, 2.0], order=2)
    q = zs[2] * zs[2] + zs[3] * zs[3]
    assert jr.extract_derivative(q, (0, 0, 2, 0)) == 2.0
    assert jr.extract_derivative(q, (0, 0, 0, 2)) == 2.0


def test_sin_derivative_at_zero():
    (v,) = jr.variables([0.0], order=3)
    assert jr.extract_derivative(jr.sin(v), (1,)) == 1.0


def test_constant_jet_has_zero_derivatives():
    ctx = jr.get_context(2, 3)
    c = jr.constant(ctx, 5.0)
    assert c.value == 5.0
    for idx in [(1, 0), (0, 2), (1, 1), (2, 1)]:
        assert jr.extract_derivative(c, idx) == 0.0


def test_order_validation():
    with pytest.raises(JetError):
        jr.seed_variables([0.0], [1.0], order=5)
    with pytest.raises(JetError):
        jr.seed_variables([0.0], [1.0], order=0)


def test_extract_rejects_excessive_order():
    zs = jr.seed_variables([0.0], [1.0], order=2)
    with pytest.raises(JetError):
        jr.extract_derivative(zs[0], (2, 1))


def test_context_mismatch_rejected():
    a = jr.variables([1.0, 2.0], order=2)[0]
    b = jr.variables([1.0], order=2)[0]
    with pytest.raises(JetError):
        _ = a + b


def test_zero_base_division_rejected():
    (v,) = jr.variables([0.0], order=2)
    with pytest.raises(JetError):
        _ = 1.0 / v


def test_negative_base_sqrt_and_log_rejected():
    (v,) = jr.variables([-1.0], order=2)
    with pytest.raises(JetError):
        jr.sqrt(v)
    with pytest.raises(JetError):
        jr.log(v)


# ---------------------------------------------------------------------------
# exact polynomial algebra against a naive dict-based oracle


def _naive_mul(p, q, n_vars, order):
    out = {}
    for ma, ca in p.items():
        for mb, cb in q.items():
            mk = tuple(a + b for a, b in zip(ma, mb))
            if sum(mk) <= order:
                out[mk] = out.get(mk, 0.0) + ca * cb
    return out


def _naive_derivative(poly, alpha, point):
    # d^alpha of sum c * z^m evaluated at point
    total = 0.0
    for mono, coef in poly.items():
        term = coef
        ok = True
        for mi, ai, zi in zip(mono, alpha, point):
            if mi < ai:
                ok = False
                break
            term *= math.perm(mi, ai) * zi ** (mi - ai)
        if ok:
            total += term
    return total


def _poly_on_jets(poly, zs, ctx):
    acc = jr.constant(ctx, 0.0)
    for mono, coef in poly.items():
        term = jr.constant(ctx, float(coef))
        for v, e in zip(zs, mono):
            for _ in range(e):
                term = term * v
        acc = acc + term
    return acc


@st.composite
def _polys(draw, n_vars=3, max_deg=2):
    monos = [
        m
        for m in itertools.product(range(max_deg + 1), repeat=n_vars)
        if sum(m) <= max_deg
    ]
    coefs = draw(
        st.lists(
            st.integers(min_value=-4, max_value=4),
            min_size=len(monos),
            max_size=len(monos),
        )
    )
    return {m: float(c) for m, c in zip(monos, coefs) if c != 0}


@settings(max_examples=25, deadline=None)
@given(_polys(), _polys())
def test_product_rule_matches_naive_polynomial_algebra(p, q):
    n_vars, order = 3, 4
    point = np.array([0.5, -1.25, 2.0])
    zs = jr.variables(point, order)
    ctx = zs[0].ctx
    jet = _poly_on_jets(p, zs, ctx) * _poly_on_jets(q, zs, ctx)
    prod = _naive_mul(p, q, n_vars, order)
    for alpha in itertools.product(range(order + 1), repeat=n_vars):
        if sum(alpha) > order:
            continue
        want = _naive_derivative(prod, alpha, point)
        got = jr.extract_derivative(jet, alpha)
        assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_chain_rule_closed_form():
    # f(x) = sqrt(1 + x^2): derivatives known in closed form at x = 0.7
    (v,) = jr.variables([0.7], order=4)
    f = jr.sqrt(1.0 + v * v)
    s = math.sqrt(1.49)
    assert jr.extract_derivative(f, (1,)) == pytest.approx(0.7 / s, rel=1e-14)
    assert jr.extract_derivative(f, (2,)) == pytest.approx(1.0 / s - 0.49 / s**3, rel=1e-13)


def test_analytic_function_identities_on_jets():
    (v,) = jr.variables([0.37], order=4)
    ident = jr.log(jr.exp(v))
    assert np.allclose(ident.coeffs, v.coeffs, atol=1e-13)
    pyth = jr.sin(v) * jr.sin(v) + jr.cos(v) * jr.cos(v)
    one = jr.constant(v.ctx, 1.0)
    assert np.allclose(pyth.coeffs, one.coeffs, atol=1e-14)
    hyp = jr.cosh(v) * jr.cosh(v) - jr.sinh(v) * jr.sinh(v)
    assert np.allclose(hyp.coeffs, one.coeffs, atol=1e-14)
    # a/b*b == a
    a = jr.exp(v)
    b = 1.0 + v * v
    assert np.allclose(((a / b) * b).coeffs, a.coeffs, atol=1e-13)
    # integer power vs repeated multiplication, real power vs sqrt
    assert np.allclose((b**3).coeffs, (b * b * b).coeffs, atol=1e-13)
    assert np.allclose(jr.power(b, 0.5).coeffs, jr.sqrt(b).coeffs, atol=1e-14)
    assert np.allclose((b**-2).coeffs, (1.0 / (b * b)).coeffs, atol=1e-13)


# ---------------------------------------------------------------------------
# jet vs finite differences on transcendental compositions


def _sample_expr(x, y):
    # smooth, positively curved-ish composite touching every ring function
    s = x[0] * y[0] + x[1] * y[1]
    r = y[0] * y[0] + y[1] * y[1]
    return jr.sqrt(r + 0.5 * s * s) * jr.exp(0.1 * x[0]) + jr.log(2.0 + jr.sin(x[1]))


@pytest.mark.parametrize("order", [1, 2, 3])
def test_jet_matches_fd_oracle_low_orders(order):
    x = np.array([0.3, -0.4])
    y = np.array([0.9, 0.55])
    jet = jr.jet_of(_sample_expr, x, y, order=order)
    for alpha in itertools.product(range(order + 1), repeat=4):
        if not 1 <= sum(alpha) <= order:
            continue
        fd = jr.fd_oracle(_sample_expr, x, y, alpha)
        got = jr.extract_derivative(jet, alpha)
        assert got == pytest.approx(fd, rel=1e-6, abs=1e-6)


def test_jet_matches_fd_oracle_order_four():
    x = np.array([0.3, -0.4])
    y = np.array([0.9, 0.55])
    jet = jr.jet_of(_sample_expr, x, y, order=4)
    for alpha in [(1, 1, 1, 1), (0, 0, 4, 0), (2, 0, 0, 2), (0, 1, 2, 1)]:
        fd = jr.fd_oracle(_sample_expr, x, y, alpha)
        got = jr.extract_derivative(jet, alpha)
        # 4th-order differences carry visibly more round-off
        assert got == pytest.approx(fd, rel=2e-4, abs=2e-4)


def test_fd_oracle_norm_gradient_at_unit_vector():
    f = lambda x, y: np.sqrt(y[0] ** 2 + y[1] ** 2)
    got = jr.fd_oracle(f, [0.0, 0.0], [1.0, 0.0], (0, 0, 1, 0))
    assert got == pytest.approx(1.0, abs=1e-10)


def test_fd_oracle_euclidean_second_derivative():
    f = lambda x, y: y[0] ** 2 + y[1] ** 2
    got = jr.fd_oracle(f, [0.0, 0.0], [0.3, 0.4], (0, 0, 2, 0))
    assert got == pytest.approx(2.0, abs=1e-9)


def test_fd_oracle_flags_nonsmooth_point():
    f = lambda x, y: abs(y[0])
    with pytest.raises(FDOracleError):
        jr.fd_oracle(f, [0.0], [0.0], (0, 2))


# ---------------------------------------------------------------------------
# homogeneity transported to the jet level


def test_euler_scaling_of_homogeneous_expression():
    # F positively 1-homogeneous in y: y-derivatives of degree k scale as lam^(1-k)
    def F(x, y):
        r = y[0] * y[0] + y[1] * y[1]
        return jr.sqrt(r + 0.3 * (x[0] * y[0] + x[1] * y[1]) ** 2)

    x = np.array([0.2, -0.1])
    y = np.array([0.7, 0.4])
    base = jr.jet_of(F, x, y, order=3)
    for lam in (0.5, 2.0):
        scaled = jr.jet_of(F, x, lam * y, order=3)
        for alpha in itertools.product(range(4), repeat=4):
            k = alpha[2] + alpha[3]
            if sum(alpha) > 3 or sum(alpha[:2]) > 0 or k == 0:
                continue
            want = lam ** (1 - k) * jr.extract_derivative(base, alpha)
            got = jr.extract_derivative(scaled, alpha)
            assert got == pytest.approx(want, rel=1e-10, abs=1e-12)


# ---------------------------------------------------------------------------
# tensors, partials, truncation


def test_derivative_tensors_and_inverse_roundtrip():
    zs = jr.seed_variables([0.1, 0.2], [0.5, -0.3], order=4)
    expr = jr.sqrt(1.0 + zs[0] * zs[2] + zs[1] * zs[3] + zs[2] * zs[2] + zs[3] * zs[3])
    tensors = jr.derivative_tensors(expr)
    # symmetry of every tensor under index permutations
    d2, d3 = tensors[2], tensors[3]
    assert np.allclose(d2, d2.T)
    assert np.allclose(d3, np.transpose(d3, (1, 0, 2)))
    assert np.allclose(d3, np.transpose(d3, (0, 2, 1)))
    back = jr.jet_from_tensors(expr.ctx, tensors[0], tensors[1:])
    assert np.allclose(back.coeffs, expr.coeffs, atol=1e-15)


def test_jet_partial_matches_tensor_entries():
    zs = jr.seed_variables([0.1, 0.2], [0.5, -0.3], order=3)
    expr = jr.exp(0.2 * zs[0]) * jr.sqrt(zs[2] * zs[2] + zs[3] * zs[3])
    tensors = jr.derivative_tensors(expr)
    for i in range(4):
        p = jr.jet_partial(expr, i)
        assert p.order == 2
        assert p.value == pytest.approx(tensors[1][i], rel=1e-13)
        grad = jr.derivative_tensors(p)[1]
        assert np.allclose(grad, tensors[2][i], atol=1e-13)


def test_truncate():
    zs = jr.seed_variables([0.1], [0.9], order=4)
    expr = jr.exp(zs[0] * zs[1])
    t2 = jr.truncate(expr, 2)
    assert t2.order == 2
    assert np.allclose(t2.coeffs, expr.coeffs[: t2.ctx.n_terms])


# ---------------------------------------------------------------------------
# backend parity


def test_numpy_backend_matches_numba():
    zs = jr.seed_variables([0.3, -0.2], [0.8, 0.6], order=4)
    expr_fn = lambda: jr.sqrt(zs[2] * zs[2] + zs[3] * zs[3] + 0.2 * zs[0] * zs[3]) * (
        1.0 + zs[1] * zs[2]
    )
    default = expr_fn().coeffs
    prev = _kernels.set_backend("numpy")
    try:
        via_numpy = expr_fn().coeffs
    finally:
        _kernels.set_backend(prev)
    assert np.allclose(default, via_numpy, atol=0.0, rtol=0.0)


def test_backend_selector_validation():
    with pytest.raises(ValueError):
        _kernels.set_backend("fortran")
