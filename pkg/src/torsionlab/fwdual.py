"""Forward-mode sensitivities over two direction banks, for differentiating
the Lagrangian density in its potential slots and along the chart at once.

A CrossDual carries, for a tensor of base shape ``s``:

* ``val``   the value, shape ``s``
* ``dx``    first derivatives along P "outer" directions, shape ``s + (P,)``
* ``dz``    first derivatives along Q "inner" directions, shape ``s + (Q,)``
* ``dxz``   the mixed second derivatives, shape ``s + (P, Q)``

With the outer bank seeded by chart derivatives and the inner bank by the
(B, dB) slots, one evaluation of the Lagrangian yields its slot gradients and
their coordinate divergences simultaneously. Uppercase X and Z are reserved
einsum letters for the direction axes; base subscripts must be lowercase.
"""

import numpy as np


class CrossDual:
    __slots__ = ("val", "dx", "dz", "dxz")

    def __init__(self, val, dx, dz, dxz):
        self.val = val
        self.dx = dx
        self.dz = dz
        self.dxz = dxz

    @property
    def nx(self):
        return self.dx.shape[-1]

    @property
    def nz(self):
        return self.dz.shape[-1]

    @classmethod
    def constant(cls, val, nx, nz):
        val = np.asarray(val, dtype=float)
        s = val.shape
        return cls(val, np.zeros(s + (nx,)), np.zeros(s + (nz,)),
                   np.zeros(s + (nx, nz)))

    @classmethod
    def seeded(cls, val, nx, nz, dx=None, dz=None):
        """Variable with optional dx seed and a dz seed (slices of identity)."""
        out = cls.constant(val, nx, nz)
        if dx is not None:
            out.dx = np.asarray(dx, dtype=float).copy()
        if dz is not None:
            out.dz = np.asarray(dz, dtype=float).copy()
        return out

    def __add__(self, other):
        if isinstance(other, CrossDual):
            return CrossDual(self.val + other.val, self.dx + other.dx,
                             self.dz + other.dz, self.dxz + other.dxz)
        return CrossDual(self.val + other, self.dx, self.dz, self.dxz)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, CrossDual):
            return CrossDual(self.val - other.val, self.dx - other.dx,
                             self.dz - other.dz, self.dxz - other.dxz)
        return CrossDual(self.val - other, self.dx, self.dz, self.dxz)

    def __neg__(self):
        return CrossDual(-self.val, -self.dx, -self.dz, -self.dxz)

    def scaled(self, c):
        return CrossDual(c * self.val, c * self.dx, c * self.dz, c * self.dxz)

    def rearrange(self, spec):
        """Single-operand einsum on the base axes (transpose, trace, diagonal)."""
        lhs, rhs = spec.split("->")
        return CrossDual(
            np.einsum(spec, self.val),
            np.einsum(f"{lhs}X->{rhs}X", self.dx),
            np.einsum(f"{lhs}Z->{rhs}Z", self.dz),
            np.einsum(f"{lhs}XZ->{rhs}XZ", self.dxz),
        )


def contract(spec, a, b):
    """Binary einsum with the full bilinear product rule."""
    ins, out = spec.split("->")
    s1, s2 = ins.split(",")
    e = np.einsum
    val = e(f"{s1},{s2}->{out}", a.val, b.val)
    dx = (e(f"{s1}X,{s2}->{out}X", a.dx, b.val)
          + e(f"{s1},{s2}X->{out}X", a.val, b.dx))
    dz = (e(f"{s1}Z,{s2}->{out}Z", a.dz, b.val)
          + e(f"{s1},{s2}Z->{out}Z", a.val, b.dz))
    dxz = (e(f"{s1}XZ,{s2}->{out}XZ", a.dxz, b.val)
           + e(f"{s1}X,{s2}Z->{out}XZ", a.dx, b.dz)
           + e(f"{s1}Z,{s2}X->{out}XZ", a.dz, b.dx)
           + e(f"{s1},{s2}XZ->{out}XZ", a.val, b.dxz))
    return CrossDual(val, dx, dz, dxz)


def inverse(m):
    """Inverse of a square-matrix CrossDual (base shape (D, D)).

    All contractions are pairwise; einsum's naive many-operand path would
    otherwise loop the full joint index space.
    """
    iv = np.linalg.inv(m.val)
    e = np.einsum
    iv_ax_iv = e("ikX,kl->ilX", e("ij,jkX->ikX", iv, m.dx), iv)
    iv_az_iv = e("ikZ,kl->ilZ", e("ij,jkZ->ikZ", iv, m.dz), iv)
    ax_iv = e("lmX,mn->lnX", m.dx, iv)
    az_iv = e("lmZ,mn->lnZ", m.dz, iv)
    term_zx = e("ilZ,lnX->inXZ", iv_az_iv, ax_iv)    # iv A_z iv A_x iv
    term_xz = e("ilX,lnZ->inXZ", iv_ax_iv, az_iv)    # iv A_x iv A_z iv
    mixed = e("ikXZ,kl->ilXZ", e("ij,jkXZ->ikXZ", iv, m.dxz), iv)
    return CrossDual(iv, -iv_ax_iv, -iv_az_iv, term_zx + term_xz - mixed)


def det(m):
    """Determinant of a square-matrix CrossDual, as a scalar CrossDual."""
    d = float(np.linalg.det(m.val))
    iv = np.linalg.inv(m.val)
    e = np.einsum
    t_x = e("ij,jiX->X", iv, m.dx)
    t_z = e("ij,jiZ->Z", iv, m.dz)
    ivdz = e("ij,jkZ->ikZ", iv, m.dz)
    ivdx = e("ij,jkX->ikX", iv, m.dx)
    cross = e("ikZ,kiX->XZ", ivdz, ivdx)         # tr(iv A_z iv A_x)
    mixed = e("ij,jiXZ->XZ", iv, m.dxz)
    dxz = d * (t_x[:, None] * t_z[None, :] - cross + mixed)
    return CrossDual(np.float64(d), d * t_x, d * t_z, dxz)
