"""Aberth-Ehrlich simultaneous iteration for complex polynomials."""

import numpy as np

from .errors import RootFindingError


def trim_leading(coeffs, rel_tol=1e-14):
    """Drop leading coefficients that are negligible relative to the largest."""
    coeffs = np.asarray(coeffs, dtype=complex)
    scale = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    if scale == 0.0:
        return coeffs[-1:]
    k = 0
    while k < coeffs.size - 1 and abs(coeffs[k]) <= rel_tol * scale:
        k += 1
    return coeffs[k:]


def _initial_guesses(coeffs):
    # Roots of the centered polynomial lie within the Fujiwara-type radius below.
    n = coeffs.size - 1
    ratios = np.abs(coeffs[1:] / coeffs[0]) ** (1.0 / np.arange(1, n + 1))
    radius = 2.0 * np.max(ratios)
    if radius == 0.0:
        radius = 1.0
    center = -coeffs[1] / (n * coeffs[0])
    angles = 2.0 * np.pi * np.arange(n) / n + 0.4
    return center + 0.5 * radius * np.exp(1j * angles)


def aberth(coeffs, tol=1e-13, max_iter=500, start="eig"):
    """All roots of ``coeffs`` (highest degree first) by Aberth iteration.

    Sweeps update the roots one at a time in a fixed order (Gauss-Seidel
    style), so the result is deterministic. ``start="eig"`` seeds the
    iteration with companion-matrix eigenvalues; ``start="circle"`` uses the
    classical circle of initial guesses. Raises RootFindingError with the
    final residuals when the corrections do not drop below ``tol`` relative
    to |z|.
    """
    coeffs = trim_leading(coeffs)
    n = coeffs.size - 1
    if n < 1:
        return np.empty(0, dtype=complex)
    if n == 1:
        return np.array([-coeffs[1] / coeffs[0]])
    dcoeffs = np.polyder(coeffs)
    if start == "eig":
        z = np.roots(coeffs).astype(complex)
        # Separate exactly repeated eigenvalues so the Aberth sum is finite.
        z = z + 1e-9 * (1.0 + np.abs(z)) * np.exp(1j * (0.7 + np.arange(n)))
    else:
        z = _initial_guesses(coeffs)
    steps = np.empty(n)
    for sweep in range(max_iter):
        for i in range(n):
            p = np.polyval(coeffs, z[i])
            if p == 0:
                steps[i] = 0.0
                continue
            ratio = p / np.polyval(dcoeffs, z[i])
            diff = z[i] - np.delete(z, i)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = ratio / (1.0 - ratio * np.sum(1.0 / diff))
            if not np.isfinite(step):
                # Coincident iterates or p' = 0: nudge deterministically.
                step = 1e-7 * (1.0 + abs(z[i])) * np.exp(1j * (1.0 + i))
            z[i] -= step
            steps[i] = abs(step) / (1.0 + abs(z[i]))
        if np.all(steps <= tol):
            return _newton_polish(coeffs, dcoeffs, z)
        if sweep >= 20 and _backward_stable(coeffs, z, 1e-13):
            return _newton_polish(coeffs, dcoeffs, z)
    if _backward_stable(coeffs, z, 1e-9):
        # Clustered roots stall at rounding level; accept them.
        return _newton_polish(coeffs, dcoeffs, z)
    residuals = np.abs(np.polyval(coeffs, z))
    raise RootFindingError(
        f"Aberth iteration did not converge in {max_iter} iterations "
        f"(max residual {residuals.max():.3e})",
        residuals=residuals,
    )


def _backward_stable(coeffs, z, rel):
    residuals = np.abs(np.polyval(coeffs, z))
    bound = np.polyval(np.abs(coeffs), np.abs(z))
    return bool(np.all(residuals <= rel * bound))


def _newton_polish(coeffs, dcoeffs, z, steps=2):
    for _ in range(steps):
        dp = np.polyval(dcoeffs, z)
        ok = dp != 0
        z = z.copy()
        z[ok] -= np.polyval(coeffs, z[ok]) / dp[ok]
    return z


def cluster(points, tol):
    """Group points closer than ``tol`` (single linkage); returns (centroids, sizes)."""
    points = np.asarray(points, dtype=complex)
    n = points.size
    labels = -np.ones(n, dtype=int)
    current = 0
    for i in range(n):
        if labels[i] >= 0:
            continue
        stack = [i]
        labels[i] = current
        while stack:
            j = stack.pop()
            near = np.flatnonzero((labels < 0) & (np.abs(points - points[j]) < tol))
            labels[near] = current
            stack.extend(near.tolist())
        current += 1
    centroids = np.array([points[labels == k].mean() for k in range(current)])
    sizes = np.array([(labels == k).sum() for k in range(current)])
    return centroids, sizes


def cluster_multiple(points, tol, eps=1e-15, factor=3.0, widest=1e-2, coeffs=None):
    """Like ``cluster``, but also recognizes k-fold roots split by rounding.

    A k-fold root perturbed at relative level eps breaks into k roots on a
    circle of radius about eps^{1/k}. Groups of k points that fit inside
    factor * eps^{1/k} * max(1, |centroid|) of their centroid are merged.
    """
    points = np.asarray(points, dtype=complex)
    if points.size < 2:
        return cluster(points, tol)
    members = _labels(points, tol)
    for t in np.geomspace(tol, widest, 25):
        cents = np.array([points[m].mean() for m in members])
        merged = []
        for idx in _groups(cents, t):
            union = [i for k in idx for i in members[k]]
            if len(idx) > 1:
                c = points[union].mean()
                allowed = factor * eps ** (1.0 / len(union)) * max(1.0, abs(c))
                if np.max(np.abs(points[union] - c)) > allowed:
                    merged.extend(members[k] for k in idx)
                    continue
            merged.append(union)
        members = merged
    centers = np.array([points[m].mean() for m in members])
    sizes = np.array([len(m) for m in members])
    if coeffs is not None:
        centers = np.array([polish_multiple(coeffs, c, k) if k > 1 else c for c, k in zip(centers, sizes)])
    return centers, sizes


def polish_multiple(coeffs, z, k, steps=4):
    """Newton on p^{(k-1)} from z, keeping z if a step does not shrink p^{(k-1)}."""
    d = np.polyder(np.asarray(coeffs, dtype=complex), k - 1)
    dd = np.polyder(d)
    for _ in range(steps):
        slope = np.polyval(dd, z)
        if slope == 0:
            break
        trial = z - np.polyval(d, z) / slope
        if abs(np.polyval(d, trial)) >= abs(np.polyval(d, z)):
            break
        z = trial
    return z


def _labels(points, tol):
    return [list(g) for g in _groups(points, tol)]


def _groups(points, tol):
    """Single-linkage groups of indices at distance < tol."""
    n = points.size
    seen = np.zeros(n, dtype=bool)
    out = []
    for i in range(n):
        if seen[i]:
            continue
        stack, group = [i], []
        seen[i] = True
        while stack:
            j = stack.pop()
            group.append(j)
            near = np.flatnonzero(~seen & (np.abs(points - points[j]) < tol))
            seen[near] = True
            stack.extend(near.tolist())
        out.append(sorted(group))
    return out
