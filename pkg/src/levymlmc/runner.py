"""Monte Carlo drivers: batched path simulation, limit-law draws and the
coupled convergence-in-probability statistic.

Work is split into fixed chunks of path indices; each path owns a keyed
substream, and chunk results are merged in index order, so output is
byte-identical for any worker count.  Chunks run on a thread pool: the
recursion kernels release the GIL, numpy does the rest.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List

import numpy as np

from . import _kernels, rng
from .coeffs import Coefficient
from .limits import (
    JumpMarks,
    sample_z_case1,
    sample_z_case3,
    stable_spec_for_case,
    sample_standard_stable,
)
from .measure import LevyModel
from .paths import assemble_cells
from .scheme import CaseParams, GridSpec

PATH_CHUNK = 1024
LIMIT_CHUNK = 128


def _chunks(total: int, size: int) -> List[range]:
    return [range(lo, min(lo + size, total)) for lo in range(0, total, size)]


def _run_chunked(jobs: Iterable, worker, threads: int) -> list:
    jobs = list(jobs)
    if threads <= 1 or len(jobs) <= 1:
        return [worker(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, jobs))


def terminal_errors(
    model: LevyModel,
    case: CaseParams,
    grid: GridSpec,
    coeff: Coefficient,
    x0: float,
    n_paths: int,
    seed: int,
    mode: str = "gaussian-remainder",
    threads: int = 1,
) -> np.ndarray:
    """Normalized terminal errors u_{n,m} * U^{n,m}_1 over ``n_paths``
    independent paths, in path-index order."""
    ncells = grid.n_cells

    def worker(idx_range):
        dy = np.empty((len(idx_range), ncells))
        for row, i in enumerate(idx_range):
            gen = rng.substream(seed, rng.ROLE_PATH, i)
            dy[row] = assemble_cells(
                model, case.beta_n, ncells, mode, gen, lambda_cell=case.lambda_nm
            ).y_incr
        _, _, u = _kernels.coupled_terminal_batch(coeff, x0, dy, grid.m)
        return u

    parts = _run_chunked(_chunks(n_paths, PATH_CHUNK), worker, threads)
    return case.u_nm * np.concatenate(parts)


def limit_terminals(
    model: LevyModel,
    case: CaseParams,
    coeff: Coefficient,
    x0: float,
    m: int,
    count: int,
    seed: int,
    n_ref: int,
    beta_floor: float = None,
    mode: str = "gaussian-remainder",
    threads: int = 1,
) -> np.ndarray:
    """``count`` draws of the limit U_1, batched across the reference mesh."""
    beta = case.beta_n if beta_floor is None else beta_floor
    dt = 1.0 / n_ref
    if case.case_id in ("C2", "C4", "C5"):
        spec = stable_spec_for_case(case)
        cell_scale = spec.scale * dt ** (1.0 / spec.alpha)
    else:
        spec = None

    def worker(idx_range):
        nb = len(idx_range)
        dy = np.empty((nb, n_ref))
        dv = np.empty((nb, n_ref)) if spec is not None else None
        marks: List[JumpMarks] = []
        for row, i in enumerate(idx_range):
            gen_y = rng.substream(seed, rng.ROLE_LIMIT, i)
            gen_aux = rng.substream(seed, rng.ROLE_V, i)
            ref = assemble_cells(model, beta, n_ref, mode, gen_y)
            dy[row] = ref.y_incr
            if spec is not None:
                dv[row] = cell_scale * sample_standard_stable(
                    spec.alpha, spec.skew, gen_aux, n_ref
                )
            elif case.case_id == "C1":
                cells = np.repeat(np.arange(n_ref), ref.counts)
                marks.append(
                    JumpMarks(
                        cells=cells,
                        times=ref.jump_times,
                        sizes=ref.jump_sizes,
                        upsilons=gen_aux.random(len(ref.jump_sizes)),
                    )
                )
        x_ref = _kernels.euler_path_batch(coeff, x0, dy)
        ffp = coeff.ffp(x_ref[:, :-1])
        if spec is not None:
            z = np.concatenate(
                [np.zeros((nb, 1)), np.cumsum(ffp * dv, axis=1)], axis=1
            )
        elif case.case_id == "C3":
            z = -(case.theta_prime**2) / 4.0 * np.concatenate(
                [np.zeros((nb, 1)), np.cumsum(ffp * dt, axis=1)], axis=1
            )
        else:
            z = np.empty((nb, n_ref + 1))
            for row in range(nb):
                z[row] = sample_z_case1(coeff, x_ref[row], marks[row], case.d_const, m, dt)
        a = coeff.fp(x_ref[:, :-1]) * dy
        b = -np.diff(z, axis=1)
        u = _kernels.linear_error_recursion(a, b)
        return u[:, -1]

    parts = _run_chunked(_chunks(count, LIMIT_CHUNK), worker, threads)
    return np.concatenate(parts)


def coupled_limit_gap(
    model: LevyModel,
    case: CaseParams,
    grid: GridSpec,
    coeff: Coefficient,
    x0: float,
    n_paths: int,
    seed: int,
    mode: str = "gaussian-remainder",
    threads: int = 1,
) -> np.ndarray:
    """Per-path gap |u_{n,m} U^{n,m}_1 - U_1| with the limit U built on the
    same realization of Y (the fine scheme doubles as the reference X).
    Only meaningful for the in-probability regime C3."""
    if case.case_id != "C3":
        raise ValueError("the coupled gap statistic targets the C3 regime")
    ncells = grid.n_cells
    dt = grid.dt

    def worker(idx_range):
        dy = np.empty((len(idx_range), ncells))
        for row, i in enumerate(idx_range):
            gen = rng.substream(seed, rng.ROLE_PATH, i)
            dy[row] = assemble_cells(
                model, case.beta_n, ncells, mode, gen, lambda_cell=case.lambda_nm
            ).y_incr
        xf, _, u_nm = _kernels.coupled_terminal_batch(coeff, x0, dy, grid.m)
        x_ref = _kernels.euler_path_batch(coeff, x0, dy)
        ffp = coeff.ffp(x_ref[:, :-1])
        nb = dy.shape[0]
        z = -(case.theta_prime**2) / 4.0 * np.concatenate(
            [np.zeros((nb, 1)), np.cumsum(ffp * dt, axis=1)], axis=1
        )
        a = coeff.fp(x_ref[:, :-1]) * dy
        b = -np.diff(z, axis=1)
        u_lim = _kernels.linear_error_recursion(a, b)[:, -1]
        return np.abs(case.u_nm * u_nm - u_lim)

    parts = _run_chunked(_chunks(n_paths, PATH_CHUNK), worker, threads)
    return np.concatenate(parts)


def path_cell_counts(
    model: LevyModel,
    case: CaseParams,
    grid: GridSpec,
    n_paths: int,
    seed: int,
) -> np.ndarray:
    """Big-jump counts of every fine cell over ``n_paths`` paths (for the
    Poisson goodness-of-fit diagnostics)."""
    out = np.empty((n_paths, grid.n_cells), dtype=np.int64)
    for i in range(n_paths):
        gen = rng.substream(seed, rng.ROLE_PATH, i)
        cells = assemble_cells(
            model, case.beta_n, grid.n_cells, "drop", gen, lambda_cell=case.lambda_nm
        )
        out[i] = cells.counts
    return out
