"""Closed-form manufactured data for the built-in benchmark cases.

AUTO-GENERATED by tools/generate_manufactured.py -- do not edit by hand.
All functions are vectorized over numpy arrays.
"""

import numpy


def disk2d_smooth_u(x, y, t):
    x0 = numpy.sin(2*t)
    x1 = 4*y
    x2 = x**2 - 1
    return ((1/128)*x0*x2**2*(x1 - 5)*(x1 + 3)*(8*y - 2), -x*x0*x2*(y - 5/4)**2*(y + 3/4)**2)


def disk2d_smooth_u_grad(x, y, t):
    x0 = x**2
    x1 = x0 - 1
    x2 = 4*y
    x3 = x2 - 5
    x4 = x2 + 3
    x5 = x3*x4
    x6 = numpy.sin(2*t)
    x7 = (1/32)*x6
    x8 = x*x1*x5*x7*(8*y - 2)
    x9 = x3**2
    x10 = x4**2
    return (x8, x1**2*x7*(x10 + 4*x5 + x9), -1/256*x10*x6*x9*(3*x0 - 1), -x8)


def disk2d_smooth_p_pos(x, y, t):
    return (-4*x*(t - 2*y)*numpy.sin(2*t) - 1/16*numpy.pi,)


def disk2d_smooth_p_neg(x, y, t):
    return (-17/4*x*(t - 2*y)*numpy.sin(2*t) - 1/16*numpy.pi + 1,)


def disk2d_smooth_g_pos(x, y, t):
    x0 = 2*t
    x1 = numpy.sin(x0)
    x2 = 4*y
    x3 = x**2
    x4 = x3 - 1
    x5 = x4**2
    x6 = numpy.cos(x0)
    x7 = x2 - 5
    x8 = x2 + 3
    x9 = x8**2
    x10 = x7**2
    x11 = 2*x3
    x12 = x7*x8
    x13 = x10*x9
    return (-1/16*x1*x12*(x11*x7 + x11*x8 + x4*x7 + x4*x8) - 3*x1*x5*(x2 - 1) - 4*x1*(t - 2*y) + (1/64)*x10*x5*x6*x8 + (1/64)*x5*x6*x7*x9, x*((3/64)*x1*x13 + (1/4)*x1*x4*(x10 + 4*x12 + x9) + 8*x1 - 1/128*x13*x4*x6))


def disk2d_smooth_g_neg(x, y, t):
    x0 = 2*t
    x1 = numpy.sin(x0)
    x2 = x**2
    x3 = x2 - 1
    x4 = x3**2
    x5 = 4*y
    x6 = 75*x1
    x7 = numpy.cos(x0)
    x8 = x5 - 5
    x9 = x5 + 3
    x10 = x9**2
    x11 = x8**2
    x12 = 2*x2
    x13 = x8*x9
    x14 = x10*x11
    return (-25/16*x1*x13*(x12*x8 + x12*x9 + x3*x8 + x3*x9) - 17/4*x1*(t - 2*y) + (5/32)*x10*x4*x7*x8 + (5/32)*x11*x4*x7*x9 - x4*x6*(x5 - 1), (1/64)*x*(400*x1*x3*(x10 + x11 + 4*x13) + 544*x1 - 5*x14*x3*x7 + x14*x6))


def disk2d_smooth_f_iface(x, y, t):
    x0 = t - 2*y
    x1 = numpy.sin(2*t)
    x2 = x0*x1
    x3 = x*x2
    x4 = 64*x3 + numpy.pi
    x5 = 2*x
    x6 = -68*x3 - numpy.pi + 16
    x7 = x**2
    x8 = x7 - 1
    x9 = 4*y
    x10 = x9 - 5
    x11 = x9 - 1
    x12 = x9 + 3
    x13 = x10**2
    x14 = x8**2
    x15 = 8*x14
    x16 = x12**2
    x17 = x13*x16
    x18 = x10*x12
    x19 = x13*x15 + 32*x14*x18 + x15*x16 - 2*x17*x7 - x17*x8
    x20 = (1/16)/numpy.sqrt(x0**2 + 4*x7)
    return (x20*(192*x1*x10*x11*x12*x7*x8 - 3*x19*x2 - x4*x5 - x5*x6), x20*(6*x*x1*x19 + x0*x4 + x0*x6 + 96*x11*x18*x3*x8))


def disk2d_kink_u_pos(x, y, t):
    x0 = x**2 + (1/4)*(t - 2*y)**2
    x1 = 2*numpy.select([numpy.less(x0, 9/16),True], [16*(x0 - 9/16)**4,0], default=numpy.nan)*numpy.sin(2*t)
    return (-x1*((1/2)*t - y), -x*x1)


def disk2d_kink_u_grad_pos(x, y, t):
    x0 = x**2
    x1 = t - 2*y
    x2 = x0 + (1/4)*x1**2
    x3 = (x2 - 9/16)**3
    x4 = 128*x
    x5 = numpy.less(x2, 9/16)
    x6 = 2*numpy.sin(2*t)
    x7 = x0 + (1/4)*x1**2 - 9/16
    x8 = numpy.select([x5,True], [16*x7**4,0], default=numpy.nan)
    x9 = x7**3
    x10 = 64*x1
    return (-x6*((1/2)*t - y)*numpy.select([x5,True], [x3*x4,0], default=numpy.nan), x6*(-1/2*x1*numpy.select([x5,True], [-x10*x9,0], default=numpy.nan) + x8), -x6*(x*numpy.select([x5,True], [x4*x9,0], default=numpy.nan) + x8), -x*x6*numpy.select([x5,True], [-x10*x3,0], default=numpy.nan))


def disk2d_kink_p_pos(x, y, t):
    return (-1/4*numpy.pi,)


def disk2d_kink_g_pos(x, y, t):
    x0 = 2*t
    x1 = numpy.sin(x0)
    x2 = x**2
    x3 = t - 2*y
    x4 = x2 + (1/4)*x3**2 - 9/16
    x5 = x3**2
    x6 = x2 + (1/4)*x5
    x7 = numpy.less(x6, 9/16)
    x8 = numpy.select([x7,True], [16*x4**4,0], default=numpy.nan)
    x9 = 2*x8*numpy.cos(x0)
    x10 = x1*numpy.select([x7,True], [32*x3*x4**3,0], default=numpy.nan)
    x11 = 4*x5
    x12 = 16*x2 - 9
    x13 = (1/32)*(x11 + x12)**2
    x14 = numpy.select([x7,True], [x13*(x11 + 112*x2 - 9),0], default=numpy.nan)
    x15 = (x6 - 9/16)**3
    x16 = numpy.select([x7,True], [x13*(x12 + 28*x5),0], default=numpy.nan)
    return (2*x1*x14*x3 - x1*x8 + 2*x1*(x16*x3 - 4*numpy.select([x7,True], [-64*x15*x3,0], default=numpy.nan)) - x10*x3 - x3*x9, 4*x*x1*x16 - 2*x*x10 - 2*x*x9 + 4*x1*(x*x14 + 2*numpy.select([x7,True], [128*x*x15,0], default=numpy.nan)))


def disk2d_kink_u_neg(x, y, t):
    x0 = (6*x**2 + (3/2)*(t - 2*y)**2 - 2447/2048)*numpy.sin(2*t)
    return (-x0*((1/2)*t - y), -x*x0)


def disk2d_kink_u_grad_neg(x, y, t):
    x0 = numpy.sin(2*t)
    x1 = x*x0
    x2 = x**2
    x3 = t - 2*y
    return (-12*x1*((1/2)*t - y), x0*(6*x2 + (9/2)*x3**2 - 2447/2048), -x0*(18*x2 + (3/2)*x3**2 - 2447/2048), 6*x1*x3)


def disk2d_kink_p_neg(x, y, t):
    return (4 - 1/4*numpy.pi,)


def disk2d_kink_g_neg(x, y, t):
    x0 = 2*t
    x1 = numpy.sin(x0)
    x2 = t - 2*y
    x3 = x2**2
    x4 = 12288*x**2 - 2447
    x5 = 3072*x3 + x4
    x6 = numpy.cos(x0)
    return (96*x1*x2 - 15/2*x1*x3 - 5/4096*x1*x5 - 5/2048*x2*x5*x6, x*(-15*x1*x2 + 192*x1 - 5/1024*x6*(3072*x2**2 + x4)))


def disk2d_kink_f_iface(x, y, t):
    x0 = x**2
    x1 = t - 2*y
    x2 = x1**2
    x3 = 1/numpy.sqrt(4*x0 + x2)
    x4 = (1/2)*x
    x5 = 16 - numpy.pi
    x6 = numpy.sin(2*t)
    x7 = x1*x6
    x8 = -x1
    x9 = x8**2
    x10 = 8*x0 - 3*x2 + x9
    x11 = x0 + (1/4)*x9
    x12 = x11 - 9/16
    x13 = x12**3
    x14 = 128*x
    x15 = x0 + (1/4)*x2
    x16 = numpy.less(x15, 9/16)
    x17 = numpy.select([x16,True], [x13*x14,0], default=numpy.nan)
    x18 = -x12**3
    x19 = numpy.less(x11, 9/16)
    x20 = 2*x
    x21 = 64*x1
    x22 = x*x6
    return (x3*(8*x*x1*x17*x6 - 96*x0*x7 + 6*x10*x7 - x4*x5 - numpy.pi*x4 - 2*x7*(x20*numpy.select([x19,True], [-x14*x18,0], default=numpy.nan) - x8*numpy.select([x19,True], [x18*x21,0], default=numpy.nan))), x3*(4*x*x6*(x1*numpy.select([x16,True], [-x13*x21,0], default=numpy.nan) + x17*x20) - 8*x*x7*numpy.select([x16,True], [-x21*(x15 - 9/16)**3,0], default=numpy.nan) + (1/4)*x1*x5 + (1/4)*numpy.pi*x1 - 12*x10*x22 - 48*x2*x22))


def ball3d_smooth_u(x, y, z, t):
    x0 = x**2
    x1 = y**2
    x2 = -10*t*z + 5*z**2
    x3 = numpy.sin(2*t)
    x4 = (1/5)*x3
    return (x4*y*(x0 + 5*x1 + x2), x*x4*(10*t**2 + 5*x0 + x1 + x2 - 8), (4/5)*x*x3*y*(t - z))


def ball3d_smooth_u_grad(x, y, z, t):
    x0 = 2*t
    x1 = numpy.sin(x0)
    x2 = x1*y
    x3 = x*x2
    x4 = (2/5)*x3
    x5 = y**2
    x6 = x**2
    x7 = -x0*z + z**2
    x8 = t - z
    x9 = 2*x8
    x10 = x*x1
    x11 = (4/5)*x8
    return (x4, x1*(3*x5 + (1/5)*x6 + x7), -x2*x9, x1*(2*t**2 + (1/5)*x5 + 3*x6 + x7 - 8/5), x4, -x10*x9, x11*x2, x10*x11, -4/5*x3)


def ball3d_smooth_p_pos(x, y, z, t):
    return (-2/15*numpy.pi,)


def ball3d_smooth_p_neg(x, y, z, t):
    return (2*((48/5)*x*y*numpy.sin(2*t) - 1/15*numpy.pi + numpy.sqrt(2)),)


def ball3d_smooth_g_pos(x, y, z, t):
    x0 = 2*t
    x1 = numpy.sin(x0)
    x2 = (42/5)*x1
    x3 = numpy.cos(x0)
    x4 = x**2
    x5 = y**2
    x6 = -10*t*z + 5*z**2
    x7 = -z
    return (2*y*(-x1*z - x2 + (1/5)*x3*(x4 + 5*x5 + x6)), 2*x*(x1*(x0 + x7) - x2 + (1/5)*x3*(10*t**2 + 5*x4 + x5 + x6 - 8)), (4/5)*x*y*(x1 + 2*x3*(t + x7)))


def ball3d_smooth_g_neg(x, y, z, t):
    x0 = 2*t
    x1 = numpy.sin(x0)
    x2 = (501/5)*x1
    x3 = 5*x1
    x4 = numpy.cos(x0)
    x5 = x**2
    x6 = y**2
    x7 = -10*t*z + 5*z**2
    x8 = -z
    return (4*y*(-x2 - x3*z + x4*(x5 + 5*x6 + x7)), 4*x*(-x2 + x3*(x0 + x8) + x4*(10*t**2 + 5*x5 + x6 + x7 - 8)), 8*x*y*(x1 + 2*x4*(t + x8)))


def ball3d_smooth_f_iface(x, y, z, t):
    x0 = x**2
    x1 = numpy.sin(2*t)
    x2 = x1*y
    x3 = t - z
    x4 = x3**2
    x5 = 432*x4
    x6 = numpy.sqrt(2)
    x7 = 144*x2
    x8 = x*x7 + 15*x6 - numpy.pi
    x9 = y**2
    x10 = 5*t**2 - 10*t*z + 8*x0 + 8*x9 + 5*z**2 - 4
    x11 = 1/numpy.sqrt(x0 + x4 + x9)
    x12 = (2/15)*x11
    x13 = x*x1
    return (x12*(-x*x8 - numpy.pi*x + 288*x0*x2 + x10*x7 + x2*x5), x12*(144*x10*x13 + x13*x5 + 288*x13*x9 - x8*y - numpy.pi*y), -2/5*x11*x3*(48*x*x2 - 5*x6))


def ball3d_kink_u_pos(x, y, z, t):
    x0 = (1/2)*numpy.exp(-x**2 - y**2 - (-t + z)**2)*numpy.sin(2*t)
    return (-x0*y, x*x0, 0)


def ball3d_kink_u_grad_pos(x, y, z, t):
    x0 = x**2
    x1 = y**2
    x2 = t - z
    x3 = numpy.exp(-x0 - x1 - x2**2)*numpy.sin(2*t)
    x4 = x3*y
    x5 = x*x4
    return (x5, x3*(x1 - 1/2), -x2*x4, x3*(1/2 - x0), -x5, x*x2*x3, 0, 0, 0)


def ball3d_kink_p_pos(x, y, z, t):
    return (-2/15*numpy.pi,)


def ball3d_kink_g_pos(x, y, z, t):
    x0 = x**2
    x1 = y**2
    x2 = t - z
    x3 = numpy.exp(-x0 - x1 - x2**2)
    x4 = 2*x0
    x5 = 2*t
    x6 = numpy.sin(x5)
    x7 = 2*x6
    x8 = 2*x1
    x9 = x2*x6 + x7*(2*x2**2 - 1) - numpy.cos(x5)
    return (x3*y*(x7*(x4 - 1) + x7*(x8 - 3) + x9), x*x3*(-x7*(x4 - 3) - x7*(x8 - 1) - x9), 0)


def ball3d_kink_u_neg(x, y, z, t):
    x0 = (-numpy.exp(-x**2 - y**2 - (-t + z)**2) + (1/2)*numpy.exp(-1/2))*numpy.sin(2*t)
    return (x0*y, -x*x0, 0)


def ball3d_kink_u_grad_neg(x, y, z, t):
    x0 = numpy.sin(2*t)
    x1 = x**2
    x2 = y**2
    x3 = t - z
    x4 = numpy.exp(-x1 - x2 - x3**2)
    x5 = 2*x4
    x6 = x0*x5*y
    x7 = x*x6
    x8 = -x4 + (1/2)*numpy.exp(-1/2)
    return (x7, x0*(x2*x5 + x8), -x3*x6, x0*(-x1*x5 - x8), -x7, x*x0*x3*x5, 0, 0, 0)


def ball3d_kink_p_neg(x, y, z, t):
    return (2*(-1/15*numpy.pi + numpy.sqrt(2)),)


def ball3d_kink_g_neg(x, y, z, t):
    x0 = x**2
    x1 = 2*x0
    x2 = y**2
    x3 = t - z
    x4 = numpy.exp(-x0 - x2 - x3**2)
    x5 = 2*t
    x6 = x4*numpy.sin(x5)
    x7 = 4*x6
    x8 = 2*x2
    x9 = 5*x3*x6 + x7*(2*x3**2 - 1) - 5/2*(2*x4 - numpy.exp(-1/2))*numpy.cos(x5)
    return (2*y*(x7*(x1 - 1) + x7*(x8 - 3) + x9), 2*x*(-x7*(x1 - 3) - x7*(x8 - 1) - x9), 0)


def ball3d_kink_f_iface(x, y, z, t):
    x0 = (1/15)*x
    x1 = numpy.sqrt(2)
    x2 = 15*x1 - numpy.pi
    x3 = x**2
    x4 = numpy.sin(2*t)
    x5 = t - z
    x6 = y**2
    x7 = x3 + x6
    x8 = numpy.exp(-x5**2 - x7)
    x9 = x5**2
    x10 = x3 - x6
    x11 = x4*x8
    x12 = 2/numpy.sqrt(x7 + x9)
    x13 = (1/15)*y
    x14 = x*x11
    x15 = 3*x14
    return (x12*(-x0*x2 - numpy.pi*x0 - 3*x10*x11*y + 6*x3*x4*x8*y + 3*x4*x8*x9*y), -x12*(x10*x15 + x13*x2 + numpy.pi*x13 + 6*x14*x6 + x15*x9), x1*x12*x5)
