# Copyright 2026 The coco-denoiser Authors.
# All Rights Reserved.
#
#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.
"""Maximum-likelihood gradient denoising under co-coercivity constraints.

Given K query points x_k with noisy gradients g_k and a Lipschitz constant
L, the estimator returns the gradients theta closest to g (in the
Euclidean sense) that satisfy every pairwise co-coercivity constraint

    ||theta_m - theta_l||^2 <= L <theta_m - theta_l, x_m - x_l>.

K = 2 has a closed form. Larger windows are solved on the dual with FISTA
(fast dual proximal gradient), where each pair contributes a block
s_ml of the dual variable. Row (m, l) of the difference operator A maps
alpha to alpha_m - alpha_l; blocks are ordered (1,2), (1,3), ..., (K-1,K).
Momentum is restarted whenever the prox step and the extrapolation
disagree, which keeps the tail of the iteration short on the degenerate
duals produced by collinear query points.
"""

import numpy as np

try:
    from oslo_log import log as logging
except ImportError:  # pragma: no cover
    import logging

from coco_denoiser import exceptions as coco_ex
from coco_denoiser import objects as obj
from coco_denoiser import utils

LOG = logging.getLogger(__name__)

COALESCE_RTOL = 1e-12


def _check_lipschitz(value):
    if value is None or not value > 0:
        raise coco_ex.InvalidLipschitzConstant(value=value)


def pair_ordering(ids):
    """Lexicographic list of pairs over point identifiers."""
    ids = list(ids)
    return [(ids[m], ids[j])
            for m in range(len(ids)) for j in range(m + 1, len(ids))]


def _pair_indices(count):
    return np.triu_indices(count, k=1)


def _coincidence_tol(points):
    return COALESCE_RTOL * (1.0 + float(np.max(np.abs(points))))


def _coco2_solve(x1, x2, g1, g2, lipschitz, w1=1.0, w2=1.0):
    dx = x1 - x2
    dg = g1 - g2
    if np.dot(dg, dg) <= lipschitz * np.dot(dg, dx):
        return g1.copy(), g2.copy()

    # theta_1 - theta_2 is projected onto the ball of center (L/2)dx and
    # radius (L/2)||dx||; the weighted mean of the gradients is kept.
    center = 0.5 * lipschitz * dx
    radius = 0.5 * lipschitz * np.linalg.norm(dx)
    offset = dg - center
    denom = np.linalg.norm(offset)
    if denom == 0:
        raise coco_ex.CocoException(
            reason="zero projection direction in the violated branch")
    delta = center + radius * offset / denom
    total = w1 + w2
    mean = (w1 * g1 + w2 * g2) / total
    return mean + (w2 / total) * delta, mean - (w1 / total) * delta


def coco2_closed_form(x1, x2, g1, g2, lipschitz):
    """Exact denoiser for two points.

    Co-coercive pairs are returned unchanged; otherwise the difference of
    the gradients is projected onto the feasible ball and their mean is
    preserved.
    """
    x1, x2, g1, g2 = (utils.as_vector(v, name)
                      for v, name in ((x1, 'x1'), (x2, 'x2'),
                                      (g1, 'g1'), (g2, 'g2')))
    if not x1.shape == x2.shape == g1.shape == g2.shape:
        raise coco_ex.DimensionMismatch(
            reason="x1 %s, x2 %s, g1 %s, g2 %s" %
                   (x1.shape, x2.shape, g1.shape, g2.shape))
    _check_lipschitz(lipschitz)
    return _coco2_solve(x1, x2, g1, g2, float(lipschitz))


def coco2_batch(x1, x2, g1, g2, lipschitz):
    """coco2_closed_form over N gradient draws at the same two points.

    g1 and g2 are (N, d) stacks; returns the two (N, d) estimate stacks.
    """
    x1 = utils.as_vector(x1, 'x1')
    x2 = utils.as_vector(x2, 'x2')
    g1 = np.atleast_2d(np.asarray(g1, dtype=float))
    g2 = np.atleast_2d(np.asarray(g2, dtype=float))
    if g1.shape != g2.shape or g1.shape[1:] != x1.shape or \
            x1.shape != x2.shape:
        raise coco_ex.DimensionMismatch(
            reason="x1 %s, x2 %s, g1 %s, g2 %s" %
                   (x1.shape, x2.shape, g1.shape, g2.shape))
    _check_lipschitz(lipschitz)
    dx = x1 - x2
    dg = g1 - g2
    feasible = np.einsum('ij,ij->i', dg, dg) <= lipschitz * (dg @ dx)
    center = 0.5 * lipschitz * dx
    radius = 0.5 * lipschitz * np.linalg.norm(dx)
    offset = dg - center
    denom = np.linalg.norm(offset, axis=1)
    # infeasible rows lie outside the ball, so their denominator is > 0
    denom[feasible] = 1.0
    delta = center + radius * offset / denom[:, np.newaxis]
    mean = 0.5 * (g1 + g2)
    keep = feasible[:, np.newaxis]
    return (np.where(keep, g1, mean + 0.5 * delta),
            np.where(keep, g2, mean - 0.5 * delta))


def lipschitz_dual(count, weights=None):
    """Squared spectral norm of the pairwise-difference operator.

    A^T A is the complete-graph Laplacian K I - 1 1^T (applied blockwise),
    whose largest eigenvalue is K. With point multiplicities w the operator
    is A W^-1 A^T and the eigenvalue is taken from W^-1/2 (K I - 1 1^T)
    W^-1/2.
    """
    if count < 2:
        raise coco_ex.InvalidParameter(name='K', value=count,
                                       reason="at least two points")
    if weights is None or np.all(np.asarray(weights) == 1):
        return float(count)
    weights = np.asarray(weights, dtype=float)
    scale = 1.0 / np.sqrt(weights)
    laplacian = count * np.eye(count) - np.ones((count, count))
    return float(np.linalg.eigvalsh(
        scale[:, None] * laplacian * scale[None, :]).max())


def build_dual_problem(query_set, weights=None):
    count = query_set.count
    points = query_set.points
    grads = query_set.gradients
    half_l = 0.5 * query_set.lipschitz
    index_m, index_l = _pair_indices(count)

    if count > 1:
        gaps = np.max(np.abs(points[index_m] - points[index_l]), axis=1)
        tol = _coincidence_tol(points)
        clash = np.flatnonzero(gaps <= tol)
        if clash.size:
            raise coco_ex.CoincidentPoints(m=index_m[clash[0]],
                                           l=index_l[clash[0]])

    if weights is None:
        weights = np.ones(count)
    weights = np.asarray(weights, dtype=float)
    shifted = grads - half_l * points
    centers = shifted[index_m] - shifted[index_l]
    radii = half_l * np.linalg.norm(points[index_m] - points[index_l],
                                    axis=1)
    return obj.DualProblem(
        query_set=query_set,
        pairs=list(zip(index_m.tolist(), index_l.tolist())),
        centers=centers,
        radii=radii,
        weights=weights,
        lipschitz=lipschitz_dual(count, weights) if count > 1 else None,
        index_m=index_m,
        index_l=index_l)


def _check_dual_blocks(problem, s):
    s = np.asarray(s, dtype=float)
    if s.shape != (problem.pair_count, problem.dimension):
        raise coco_ex.BlockStructureMismatch(expected=problem.pair_count,
                                             dim=problem.dimension,
                                             shape=s.shape)
    return s


def _adjoint(problem, s):
    """A^T s: block m gathers +s_ml, block l gathers -s_ml."""
    out = np.zeros((problem.count, problem.dimension))
    np.add.at(out, problem.index_m, s)
    np.add.at(out, problem.index_l, -s)
    return out


def dual_gradient(problem, s):
    """Gradient A W^-1 A^T s of the smooth dual term, matrix free."""
    s = _check_dual_blocks(problem, s)
    v = _adjoint(problem, s) / problem.weights[:, None]
    return v[problem.index_m] - v[problem.index_l]


def recover_primal(problem, s):
    """theta = g - W^-1 A^T s."""
    s = _check_dual_blocks(problem, s)
    return (problem.query_set.gradients -
            _adjoint(problem, s) / problem.weights[:, None])


def prox_q_star(s, mu, problem):
    """Proximity operator of mu * q*, blockwise.

    With z = c + s / mu, the result is mu * (z - P_B(z)) where P_B projects
    onto the origin-centered ball of radius r_ml; blocks whose z lies in
    the ball map to exactly zero.
    """
    if mu is None or not mu > 0:
        raise coco_ex.InvalidParameter(name='mu', value=mu,
                                       reason="must be > 0")
    s = _check_dual_blocks(problem, s)
    z = problem.centers + s / mu
    norms = np.linalg.norm(z, axis=1)
    shrink = np.zeros_like(norms)
    outside = norms > problem.radii
    shrink[outside] = 1.0 - problem.radii[outside] / norms[outside]
    return mu * z * shrink[:, None]


def dual_objective(problem, s):
    """p*(-A^T s) + q*(s)."""
    s = _check_dual_blocks(problem, s)
    u = _adjoint(problem, s)
    smooth = 0.5 * np.sum(np.sum(u * u, axis=1) / problem.weights)
    return float(smooth +
                 np.dot(problem.radii, np.linalg.norm(s, axis=1)) -
                 np.sum(s * problem.centers))


def feasibility_violation(theta, query_set):
    """Largest violation max(0, ||dtheta||^2 - L <dtheta, dx>) over pairs."""
    theta = obj.as_blocks(theta, 'theta')
    if theta.shape != query_set.points.shape:
        raise coco_ex.BlockStructureMismatch(expected=query_set.count,
                                             dim=query_set.dimension,
                                             shape=theta.shape)
    if query_set.count < 2:
        return 0.0
    index_m, index_l = _pair_indices(query_set.count)
    dtheta = theta[index_m] - theta[index_l]
    dx = query_set.points[index_m] - query_set.points[index_l]
    excess = (np.sum(dtheta * dtheta, axis=1) -
              query_set.lipschitz * np.sum(dtheta * dx, axis=1))
    return max(0.0, float(excess.max()))


def fdpg_solve(problem, cfg=None, init=None):
    """Fast dual proximal gradient (FISTA on the dual).

    Stops after cfg.max_iter iterations or once the dual iterate moves by
    at most cfg.tol in infinity norm. The returned objective trace starts
    with the dual objective at the initial iterate and has one entry per
    iteration after that.
    """
    if cfg is None:
        cfg = obj.SolverConfig()
    pair_count, dim = problem.pair_count, problem.dimension

    if pair_count == 0:
        theta = problem.query_set.gradients.copy()
        return obj.DenoiseResult(theta=theta,
                                 state=obj.DualState.zeros(0, dim),
                                 objective_trace=[],
                                 feasibility=0.0,
                                 iterations=0,
                                 pairs=problem.pairs)

    if init is None:
        s = np.zeros((pair_count, dim))
        y = s.copy()
        t = 1.0
    else:
        s = _check_dual_blocks(problem, init.s).copy()
        y = _check_dual_blocks(problem, init.y).copy()
        t = float(init.t)

    step = 1.0 / problem.lipschitz
    trace = [dual_objective(problem, s)]
    converged = False
    iteration = 0
    for iteration in range(1, cfg.max_iter + 1):
        s_new = prox_q_star(y - step * dual_gradient(problem, y), step,
                            problem)
        if cfg.restart and np.sum((y - s_new) * (s_new - s)) > 0:
            # momentum drives uphill, restart from the plain prox step
            t = 1.0
            t_new = 1.0
        else:
            t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = s_new + ((t - 1.0) / t_new) * (s_new - s)
        change = float(np.max(np.abs(s_new - s)))
        s, t = s_new, t_new
        trace.append(dual_objective(problem, s))
        if change <= cfg.tol:
            converged = True
            break

    if not converged:
        LOG.debug("FDPG stopped at the iteration budget %d with K=%d",
                  cfg.max_iter, problem.count)
    theta = recover_primal(problem, s)
    return obj.DenoiseResult(
        theta=theta,
        state=obj.DualState(s=s, y=y, t=t, iteration=iteration),
        objective_trace=trace,
        feasibility=feasibility_violation(theta, problem.query_set),
        iterations=iteration,
        converged=converged,
        pairs=problem.pairs)


def warm_start_shift(prev, prev_pairs, new_pairs, dimension=None):
    """Initial dual state for the window after a slide.

    Pairs present in both orderings keep their previous s block; pairs
    involving newly arrived points start at zero. Momentum is reset.
    `dimension` is only needed when there is no previous result.
    """
    new_pairs = list(new_pairs)
    if prev is None:
        if dimension is None:
            raise coco_ex.InvalidParameter(
                name='dimension', value=dimension,
                reason="required for a cold start")
        return obj.DualState.zeros(len(new_pairs), dimension)

    prev_pairs = list(prev_pairs)
    if len(prev_pairs) != len(new_pairs):
        raise coco_ex.WindowLengthMismatch(prev=len(prev_pairs),
                                           new=len(new_pairs))
    prev_s = np.asarray(prev.state.s, dtype=float)
    if prev_s.shape[0] != len(prev_pairs):
        raise coco_ex.BlockStructureMismatch(expected=len(prev_pairs),
                                             dim=prev_s.shape[-1],
                                             shape=prev_s.shape)
    position = {pair: i for i, pair in enumerate(prev_pairs)}
    s = np.zeros((len(new_pairs), prev_s.shape[1]))
    reused = 0
    for j, pair in enumerate(new_pairs):
        i = position.get(tuple(pair))
        if i is not None:
            s[j] = prev_s[i]
            reused += 1
    LOG.debug("Warm start reuses %d of %d dual blocks", reused, len(s))
    return obj.DualState(s=s)


def coalesce_points(query_set):
    """Groups coincident points.

    Returns the reduced QuerySet (one point per group, mean gradient),
    the list of original indices in every group and the group sizes.
    """
    points = query_set.points
    tol = _coincidence_tol(points)
    groups = []
    for k in range(query_set.count):
        for group in groups:
            if np.max(np.abs(points[k] - points[group[0]])) <= tol:
                group.append(k)
                break
        else:
            groups.append([k])
    if len(groups) == query_set.count:
        return query_set, groups, np.ones(query_set.count)

    LOG.debug("Coalesced %d query points into %d groups",
              query_set.count, len(groups))
    reduced = obj.QuerySet(
        points=np.array([points[group[0]] for group in groups]),
        gradients=np.array([query_set.gradients[group].mean(axis=0)
                            for group in groups]),
        lipschitz=query_set.lipschitz)
    return reduced, groups, np.array([len(g) for g in groups], dtype=float)


def denoise(query_set, cfg=None, init=None):
    """Denoises a QuerySet with the cheapest exact method available.

    Coincident points are merged first. One remaining point yields the mean
    gradient, two use the closed form, more run FDPG (optionally from
    `init`, which is ignored when points were merged).
    """
    reduced, groups, weights = coalesce_points(query_set)
    dim = query_set.dimension
    merged = len(groups) < query_set.count

    if len(groups) == 1:
        reduced_theta = reduced.gradients.copy()
        result = obj.DenoiseResult(theta=reduced_theta,
                                   state=obj.DualState.zeros(0, dim),
                                   objective_trace=[], feasibility=0.0,
                                   iterations=0)
    elif len(groups) == 2:
        x, g = reduced.points, reduced.gradients
        theta1, theta2 = _coco2_solve(x[0], x[1], g[0], g[1],
                                      reduced.lipschitz,
                                      weights[0], weights[1])
        reduced_theta = np.array([theta1, theta2])
        result = obj.DenoiseResult(
            theta=reduced_theta,
            state=obj.DualState(s=[weights[0] * (g[0] - theta1)]),
            objective_trace=[], feasibility=0.0, iterations=0)
    else:
        if merged and init is not None:
            LOG.debug("Dropping warm start: points were coalesced")
            init = None
        problem = build_dual_problem(reduced, weights=weights)
        result = fdpg_solve(problem, cfg, init)
        reduced_theta = result.theta

    if merged:
        theta = np.empty_like(query_set.gradients)
        for i, group in enumerate(groups):
            theta[group] = reduced_theta[i]
    else:
        theta = reduced_theta
    result.theta = theta
    result.feasibility = feasibility_violation(theta, query_set)
    result.pairs = None if merged else pair_ordering(
        range(query_set.count))
    return result


def power_iteration(apply_op, shape, max_iter=1000, tol=1e-12, rng=None):
    """Largest eigenvalue of a symmetric PSD operator given as a callable.

    Applied to dual_gradient this returns sigma_max(A)^2.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    x = rng.standard_normal(shape)
    x /= np.linalg.norm(x)
    eig = 0.0
    for iteration in range(1, max_iter + 1):
        y = apply_op(x)
        eig_new = float(np.sum(x * y))
        norm = np.linalg.norm(y)
        if norm == 0:
            return 0.0
        x = y / norm
        if abs(eig_new - eig) <= tol * abs(eig_new):
            LOG.debug("Power iteration converged after %d iterations",
                      iteration)
            return eig_new
        eig = eig_new
    return eig
