"""Back-projection reference reconstruction.

Direct matched-filter summation with exact two-way distances; no
approximations anywhere, which is what makes it the trust anchor for the
wavenumber-domain pipeline.  The voxel loops are compiled with numba and
parallelized over voxels only; every voxel accumulates its samples in a
fixed order, so images are bit-identical for any worker count.
"""

from __future__ import annotations

import math
import os

import numba as nb
import numpy as np

from .forward import EchoCube, MonostaticEcho
from .geometry import SceneGrid
from .rma import ImageVolume


def _apply_thread_cap():
    raw = os.environ.get("ARCMIMO_THREADS")
    if not raw:
        return
    try:
        n = int(raw)
    except ValueError:
        return
    if n >= 1:
        nb.set_num_threads(min(n, nb.config.NUMBA_NUM_THREADS))


@nb.njit(parallel=True, fastmath=False, cache=True)
def _bp_kernel(echo, k0, dk, tx, rx, zp, xs, ys, zs, radius, decay):
    nt = tx.size
    nr = rx.size
    nzp = zp.size
    nk = echo.shape[3]
    nx, ny, nzv = xs.size, ys.size, zs.size
    img = np.zeros((nx, ny, nzv), dtype=np.complex128)

    for p in nb.prange(nx * ny):
        ix = p // ny
        iy = p % ny
        x = xs[ix]
        y = ys[iy]
        rho_t2 = np.empty(nt)
        rho_r2 = np.empty(nr)
        for it in range(nt):
            ax = radius * math.sin(tx[it])
            ay = -radius * math.cos(tx[it])
            rho_t2[it] = (x - ax) ** 2 + (y - ay) ** 2
        for ir in range(nr):
            ax = radius * math.sin(rx[ir])
            ay = -radius * math.cos(rx[ir])
            rho_r2[ir] = (x - ax) ** 2 + (y - ay) ** 2
        r_t = np.empty(nt)
        p_t = np.empty(nt, dtype=np.complex128)
        w_t = np.empty(nt, dtype=np.complex128)
        r_r = np.empty(nr)
        p_r = np.empty(nr, dtype=np.complex128)
        w_r = np.empty(nr, dtype=np.complex128)
        for iz in range(nzv):
            z = zs[iz]
            acc = 0.0 + 0.0j
            for izp in range(nzp):
                dz2 = (z - zp[izp]) ** 2
                for it in range(nt):
                    r = math.sqrt(rho_t2[it] + dz2)
                    r_t[it] = r
                    p_t[it] = complex(math.cos(k0 * r), math.sin(k0 * r))
                    w_t[it] = complex(math.cos(dk * r), math.sin(dk * r))
                for ir in range(nr):
                    r = math.sqrt(rho_r2[ir] + dz2)
                    r_r[ir] = r
                    p_r[ir] = complex(math.cos(k0 * r), math.sin(k0 * r))
                    w_r[ir] = complex(math.cos(dk * r), math.sin(dk * r))
                for it in range(nt):
                    for ir in range(nr):
                        if r_t[it] == 0.0 or r_r[ir] == 0.0:
                            continue  # voxel on an antenna: skip the term
                        ph = p_t[it] * p_r[ir]
                        w = w_t[it] * w_r[ir]
                        term = 0.0 + 0.0j
                        for ik in range(nk):
                            term += echo[it, ir, izp, ik] * ph
                            ph = ph * w
                        if decay:
                            term = term / (r_t[it] * r_r[ir])
                        acc += term
            img[ix, iy, iz] = acc
    return img


@nb.njit(parallel=True, fastmath=False, cache=True)
def _bp_kernel_mono(echo, k0, dk, theta, zp, xs, ys, zs, radius, decay):
    na = theta.size
    nzp = zp.size
    nk = echo.shape[2]
    nx, ny, nzv = xs.size, ys.size, zs.size
    img = np.zeros((nx, ny, nzv), dtype=np.complex128)

    for p in nb.prange(nx * ny):
        ix = p // ny
        iy = p % ny
        x = xs[ix]
        y = ys[iy]
        rho2 = np.empty(na)
        for ia in range(na):
            ax = radius * math.sin(theta[ia])
            ay = -radius * math.cos(theta[ia])
            rho2[ia] = (x - ax) ** 2 + (y - ay) ** 2
        for iz in range(nzv):
            z = zs[iz]
            acc = 0.0 + 0.0j
            for izp in range(nzp):
                dz2 = (z - zp[izp]) ** 2
                for ia in range(na):
                    r = math.sqrt(rho2[ia] + dz2)
                    if r == 0.0:
                        continue
                    ph = complex(math.cos(2.0 * k0 * r), math.sin(2.0 * k0 * r))
                    w = complex(math.cos(2.0 * dk * r), math.sin(2.0 * dk * r))
                    term = 0.0 + 0.0j
                    for ik in range(nk):
                        term += echo[ia, izp, ik] * ph
                        ph = ph * w
                    if decay:
                        term = term / (r * r)
                    acc += term
            img[ix, iy, iz] = acc
    return img


def bp_reconstruct(echo: EchoCube, scene: SceneGrid, *,
                   amplitude_decay: bool = False) -> ImageVolume:
    """Back-project a MIMO echo cube onto the scene grid.

    g(x,y,z) = sum over all samples of s * exp(+j k (R_T + R_R)).  A voxel
    coinciding with an antenna skips that term (measure-zero event).
    """
    _apply_thread_cap()
    k = echo.k
    dk = float(k[1] - k[0]) if k.size > 1 else 0.0
    # inner frequency loop wants contiguous access
    cube = np.ascontiguousarray(echo.data.transpose(1, 2, 3, 0))
    data = _bp_kernel(cube, float(k[0]), dk,
                      echo.theta_t, echo.theta_r, echo.z,
                      scene.axis("x"), scene.axis("y"), scene.axis("z"),
                      echo.geom.radius, amplitude_decay)
    return ImageVolume(data=data, grid=scene)


def bp_reconstruct_monostatic(echo: MonostaticEcho, scene: SceneGrid, *,
                              amplitude_decay: bool = False) -> ImageVolume:
    """Back-project a monostatic echo with two-way phase +2kR."""
    _apply_thread_cap()
    k = echo.freqs.wavenumbers
    dk = float(k[1] - k[0]) if k.size > 1 else 0.0
    cube = np.ascontiguousarray(echo.data.transpose(1, 2, 0))
    data = _bp_kernel_mono(cube, float(k[0]), dk, np.asarray(echo.theta, float),
                           np.asarray(echo.z, float),
                           scene.axis("x"), scene.axis("y"), scene.axis("z"),
                           echo.radius, amplitude_decay)
    return ImageVolume(data=data, grid=scene)
