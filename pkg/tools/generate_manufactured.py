#!/usr/bin/env python3
"""Regenerate src/stokesxt/_manufactured.py.

Derives body forces and interface force densities for the built-in
benchmark cases from prescribed exact solutions, symbolically:

    g_i   = rho_i * du/dt - 2 mu_i * Laplace(u) + grad p_i
    f     = [(2 mu D(u) - p I) n]_{NEG side} - [...]_{POS side}

with D(u) = grad u + grad u^T and n = grad phi / |grad phi| pointing from
the phi<0 subdomain into phi>0.  The emitted module contains plain numpy
closed forms only; run this script after editing any case definition and
commit the result.
"""

import os
import sys

import sympy as sp
from sympy.printing.numpy import NumPyPrinter

HEADER = '''"""Closed-form manufactured data for the built-in benchmark cases.

AUTO-GENERATED by tools/generate_manufactured.py -- do not edit by hand.
All functions are vectorized over numpy arrays.
"""

import numpy


'''


def grad(f, xs):
    return [sp.diff(f, v) for v in xs]


def laplacian(f, xs):
    return sum(sp.diff(f, v, 2) for v in xs)


def make_case(name, xs, t, u, p_pos, p_neg, phi, rho, mu):
    """Return {func_name: (args, [exprs])} for one case."""
    d = len(xs)
    rho_pos, rho_neg = rho
    mu_pos, mu_neg = mu

    div_u = sum(sp.diff(u[i], xs[i]) for i in range(d))
    assert sp.simplify(div_u) == 0, f"{name}: velocity is not divergence free"

    grad_u = [[sp.diff(u[i], xs[j]) for j in range(d)] for i in range(d)]

    def g(p, rho_i, mu_i):
        return [sp.diff(u[i], t) * rho_i - 2 * mu_i * laplacian(u[i], xs)
                + sp.diff(p, xs[i]) for i in range(d)]

    gp = grad(phi, xs)
    norm = sp.sqrt(sum(c ** 2 for c in gp))
    n = [c / norm for c in gp]

    def stress_normal(p, mu_i):
        # (2 mu D(u) - p I) n with D = grad u + grad u^T
        out = []
        for i in range(d):
            s = -p * n[i]
            for j in range(d):
                s += 2 * mu_i * (grad_u[i][j] + grad_u[j][i]) * n[j]
            out.append(s)
        return out

    sn_pos = stress_normal(p_pos, mu_pos)
    sn_neg = stress_normal(p_neg, mu_neg)
    f_iface = [sp.together(sn_neg[i] - sn_pos[i]) for i in range(d)]

    args = tuple(xs) + (t,)
    funcs = {
        f"{name}_u": (args, list(u)),
        f"{name}_u_grad": (args, [grad_u[i][j] for i in range(d) for j in range(d)]),
        f"{name}_p_pos": (args, [p_pos]),
        f"{name}_p_neg": (args, [p_neg]),
        f"{name}_g_pos": (args, g(p_pos, rho_pos, mu_pos)),
        f"{name}_g_neg": (args, g(p_neg, rho_neg, mu_neg)),
        f"{name}_f_iface": (args, f_iface),
    }
    return funcs


def make_case_phasewise(name, xs, t, u_pos, u_neg, p_pos, p_neg, phi, rho, mu):
    """Like make_case but with phase-wise velocity (kink across phi = 0)."""
    d = len(xs)
    funcs = {}
    for tag, u, p, rho_i, mu_i in (("pos", u_pos, p_pos, rho[0], mu[0]),
                                   ("neg", u_neg, p_neg, rho[1], mu[1])):
        div_u = sp.simplify(sum(sp.diff(u[i], xs[i]) for i in range(d)))
        assert div_u == 0, f"{name}/{tag}: velocity not divergence free"
        grad_u = [[sp.diff(u[i], xs[j]) for j in range(d)] for i in range(d)]
        gvec = [sp.diff(u[i], t) * rho_i - 2 * mu_i * laplacian(u[i], xs)
                + sp.diff(p, xs[i]) for i in range(d)]
        args = tuple(xs) + (t,)
        funcs[f"{name}_u_{tag}"] = (args, list(u))
        funcs[f"{name}_u_grad_{tag}"] = (
            args, [grad_u[i][j] for i in range(d) for j in range(d)])
        funcs[f"{name}_p_{tag}"] = (args, [p])
        funcs[f"{name}_g_{tag}"] = (args, gvec)

    gp = grad(phi, xs)
    norm = sp.sqrt(sum(c ** 2 for c in gp))
    n = [c / norm for c in gp]

    def stress_normal(u, p, mu_i):
        grad_u = [[sp.diff(u[i], xs[j]) for j in range(d)] for i in range(d)]
        return [sum(2 * mu_i * (grad_u[i][j] + grad_u[j][i]) * n[j]
                    for j in range(d)) - p * n[i] for i in range(d)]

    sn_pos = stress_normal(u_pos, p_pos, mu[0])
    sn_neg = stress_normal(u_neg, p_neg, mu[1])
    args = tuple(xs) + (t,)
    funcs[f"{name}_f_iface"] = (args, [sn_neg[i] - sn_pos[i] for i in range(d)])
    return funcs


def disk2d_smooth():
    x, y, t = sp.symbols("x y t", real=True)
    cy = t / 2
    phi = x ** 2 + (y - cy) ** 2 - sp.Rational(1, 4)
    psi = sp.sin(2 * t) * (1 - x ** 2) ** 2 \
        * (y + sp.Rational(3, 4)) ** 2 * (sp.Rational(5, 4) - y) ** 2 / 4
    u = (sp.diff(psi, y), -sp.diff(psi, x))
    # pressure: strong smooth background plus a moderate jump on the NEG
    # side; the shift makes the global mean zero for every t
    shift = -sp.pi / 16
    p_pos = 8 * sp.sin(2 * t) * x * (y - cy) + shift
    p_neg = p_pos + 1 + sp.sin(2 * t) * x * (y - cy) / 2
    return make_case("disk2d_smooth", (x, y), t, u, p_pos, p_neg, phi,
                     rho=(1, 10), mu=(1, 25))


def disk2d_kink():
    x, y, t = sp.symbols("x y t", real=True)
    cy = t / 2
    s = x ** 2 + (y - cy) ** 2
    r2 = sp.Rational(1, 4)
    s0 = sp.Rational(9, 16)
    phi = s - r2
    w_out_core = 16 * (s0 - s) ** 4
    w_pos = sp.Piecewise((w_out_core, s < s0), (0, True))
    w_neg = w_out_core.subs(s, r2) + 3 * (s - r2)
    # u = curl of a radial stream function about the moving center:
    # u = 2 W(s) * (y - cy, -x), divergence free per phase
    u_pos = (2 * w_pos * (y - cy), -2 * w_pos * x)
    u_neg = (2 * w_neg * (y - cy), -2 * w_neg * x)
    u_pos = tuple(sp.sin(2 * t) * c for c in u_pos)
    u_neg = tuple(sp.sin(2 * t) * c for c in u_neg)
    shift = -sp.pi / 4
    p_pos = shift + 0 * x
    p_neg = 4 + shift + 0 * x
    return make_case_phasewise("disk2d_kink", (x, y), t, u_pos, u_neg,
                               p_pos, p_neg, phi, rho=(1, 5), mu=(1, 2))


def ball3d_smooth():
    x, y, z, t = sp.symbols("x y z t", real=True)
    phi = x ** 2 + y ** 2 + (z - t) ** 2 - sp.Rational(1, 2)
    u = (
        sp.sin(2 * t) * (x ** 2 + 5 * y ** 2 - 10 * t * z + 5 * z ** 2) * y / 5,
        sp.sin(2 * t) * (10 * t ** 2 + 5 * x ** 2 + y ** 2 - 10 * t * z
                         + 5 * z ** 2 - 8) * x / 5,
        sp.sin(2 * t) * 4 * (t - z) * x * y / 5,
    )
    # mean-zero shift: jump integrates to 2*sqrt(2) * |ball| over a box of
    # volume 10
    shift = -2 * sp.sqrt(2) * (sp.Rational(4, 3) * sp.pi / (2 * sp.sqrt(2))) / 10
    p_pos = shift + 0 * x
    p_neg = sp.Rational(96, 5) * sp.sin(2 * t) * x * y + 2 * sp.sqrt(2) + shift
    return make_case("ball3d_smooth", (x, y, z), t, u, p_pos, p_neg, phi,
                     rho=(1, 10), mu=(1, 25))


def ball3d_kink():
    x, y, z, t = sp.symbols("x y z t", real=True)
    m = x ** 2 + y ** 2 + (z - t) ** 2
    phi = m - sp.Rational(1, 2)
    g_pos = sp.exp(-m) / 2
    g_neg = -sp.exp(sp.Rational(-1, 2)) / 2 + sp.exp(-m)
    u_pos = tuple(sp.sin(2 * t) * a * g_pos for a in (-y, x, 0))
    u_neg = tuple(sp.sin(2 * t) * a * g_neg for a in (-y, x, 0))
    shift = -2 * sp.sqrt(2) * (sp.Rational(4, 3) * sp.pi / (2 * sp.sqrt(2))) / 10
    p_pos = shift + 0 * x
    p_neg = 2 * sp.sqrt(2) + shift + 0 * x
    return make_case_phasewise("ball3d_kink", (x, y, z), t, u_pos, u_neg,
                               p_pos, p_neg, phi, rho=(1, 5), mu=(1, 2))


def emit(funcs, printer):
    chunks = []
    for fname, (args, exprs) in funcs.items():
        repl, reduced = sp.cse(exprs, optimizations="basic")
        lines = [f"def {fname}({', '.join(str(a) for a in args)}):"]
        for sym, ex in repl:
            lines.append(f"    {sym} = {printer.doprint(ex)}")
        body = ", ".join(printer.doprint(ex) for ex in reduced)
        lines.append(f"    return ({body}{',' if len(reduced) == 1 else ''})")
        chunks.append("\n".join(lines))
    return "\n\n\n".join(chunks) + "\n"


def main():
    printer = NumPyPrinter()
    funcs = {}
    for builder in (disk2d_smooth, disk2d_kink, ball3d_smooth, ball3d_kink):
        funcs.update(builder())
    text = HEADER + emit(funcs, printer)
    out = os.path.join(os.path.dirname(__file__), os.pardir,
                       "src", "stokesxt", "_manufactured.py")
    out = os.path.normpath(out)
    with open(out, "w") as fh:
        fh.write(text)
    print(f"wrote {out} ({len(funcs)} functions)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
