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
"""Monte-Carlo estimators and the closed-form predictions they are
checked against."""

import functools
import math
import multiprocessing
import os

import numpy as np
from scipy import special

try:
    from oslo_log import log as logging
except ImportError:  # pragma: no cover
    import logging

from coco_denoiser import exceptions as coco_ex
from coco_denoiser import objects as obj
from coco_denoiser import utils

LOG = logging.getLogger(__name__)

THREADS_ENV = 'COCO_THREADS'
BOOTSTRAP_RESAMPLES = 200


def norm_cdf(z):
    """Standard normal CDF, elementwise for arrays."""
    value = special.ndtr(z)
    return float(value) if np.ndim(value) == 0 else value


def _oriented(q):
    # the constraint is symmetric under swapping the two points
    if q.delta_x < 0:
        return -q.delta_x, -q.delta_grad
    return q.delta_x, q.delta_grad


def p_inactive_theoretical(q):
    delta_x, delta_grad = _oriented(q)
    scale = math.sqrt(2.0) * q.sigma
    p = (norm_cdf((q.lipschitz * delta_x - delta_grad) / scale) -
         norm_cdf(-delta_grad / scale))
    return min(1.0, max(0.0, p))


def p_active_theoretical(q):
    return 1.0 - p_inactive_theoretical(q)


def quadratic_tightness_query(delta_x, delta_lipschitz, sigma,
                              true_lipschitz=1.0):
    """Two points on f(x) = true_lipschitz * x**2 / 2 with the estimator
    told L = true_lipschitz + delta_lipschitz."""
    return obj.TightnessQuery(delta_x=float(delta_x),
                              delta_grad=true_lipschitz * float(delta_x),
                              lipschitz=true_lipschitz + delta_lipschitz,
                              sigma=float(sigma))


def mean_and_se(samples):
    """Mean and standard error with compensated summation."""
    samples = [float(v) for v in samples]
    count = len(samples)
    if count == 0:
        raise coco_ex.InvalidParameter(name='N', value=0,
                                       reason="at least one replication")
    mean = math.fsum(samples) / count
    if count < 2:
        return obj.McEstimate(mean=mean, stderr=float('nan'), count=count)
    var = math.fsum((v - mean) ** 2 for v in samples) / (count - 1)
    return obj.McEstimate(mean=mean, stderr=math.sqrt(var / count),
                          count=count)


def p_active_empirical(q, count, rng):
    if count < 2:
        raise coco_ex.InvalidParameter(name='N', value=count,
                                       reason="must be >= 2")
    noise = rng.standard_normal((count, 2)) * q.sigma
    delta = q.delta_grad + noise[:, 0] - noise[:, 1]
    violated = delta * delta > q.lipschitz * delta * q.delta_x
    return mean_and_se(violated.astype(float))


def _matched(estimates, truths):
    estimates = np.asarray(estimates, dtype=float)
    truths = np.asarray(truths, dtype=float)
    if truths.shape == estimates.shape[1:]:
        truths = np.broadcast_to(truths, estimates.shape)
    if truths.shape != estimates.shape:
        raise coco_ex.DimensionMismatch(
            reason="estimates %s and truths %s do not match" %
                   (estimates.shape, truths.shape))
    return estimates, truths


def mse_estimate(estimates, truths):
    """Mean squared error over replications (first axis).

    Each replication contributes the squared norm of its whole error, so
    an (N, K, d) stack gives the stacked MSE and an (N, d) slice gives the
    per-point MSE. `truths` may omit the replication axis.
    """
    estimates, truths = _matched(estimates, truths)
    err = (estimates - truths).reshape(estimates.shape[0], -1)
    return mean_and_se(np.einsum('ij,ij->i', err, err))


def mse_per_point(estimates, truths):
    """Per-point MSE for an (N, K, d) stack, one McEstimate per point."""
    estimates, truths = _matched(estimates, truths)
    if estimates.ndim != 3:
        raise coco_ex.DimensionMismatch(
            reason="expected an (N, K, d) stack, got %s" %
                   (estimates.shape,))
    return [mse_estimate(estimates[:, k], truths[:, k])
            for k in range(estimates.shape[1])]


def _bias_norms(estimates, truths):
    return np.linalg.norm(estimates.mean(axis=0) - truths.mean(axis=0),
                          axis=-1)


def bias_estimate(estimates, truths, rng=None,
                  resamples=BOOTSTRAP_RESAMPLES):
    """Norm of the mean error per point with a bootstrap standard error.

    Accepts (N, d) or (N, K, d) stacks and returns one McEstimate per
    point.
    """
    estimates, truths = _matched(estimates, truths)
    if estimates.ndim == 2:
        estimates = estimates[:, np.newaxis, :]
        truths = truths[:, np.newaxis, :]
    count = estimates.shape[0]
    if count < 2:
        raise coco_ex.InvalidParameter(name='N', value=count,
                                       reason="must be >= 2")
    rng = rng if rng is not None else utils.rng_stream(0)
    bias = _bias_norms(estimates, truths)
    boot = np.empty((resamples, bias.size))
    for b in range(resamples):
        idx = rng.integers(count, size=count)
        boot[b] = _bias_norms(estimates[idx], truths[idx])
    stderr = boot.std(axis=0, ddof=1)
    return [obj.McEstimate(mean=float(bias[k]), stderr=float(stderr[k]),
                           count=count)
            for k in range(bias.size)]


def slope_through_origin(xs, ys):
    xs = [float(v) for v in xs]
    ys = [float(v) for v in ys]
    if len(xs) != len(ys):
        raise coco_ex.DimensionMismatch(
            reason="%d abscissae and %d ordinates" % (len(xs), len(ys)))
    sxx = math.fsum(x * x for x in xs)
    if sxx == 0:
        raise coco_ex.InvalidParameter(name='xs', value=xs,
                                       reason="sum of squares is zero")
    return math.fsum(x * y for x, y in zip(xs, ys)) / sxx


def thread_count():
    """Worker cap from COCO_THREADS, machine parallelism by default."""
    value = os.environ.get(THREADS_ENV)
    if value in (None, ''):
        return os.cpu_count() or 1
    try:
        threads = int(value)
    except ValueError:
        threads = 0
    if threads < 1:
        raise coco_ex.CocoConfigException(
            msg="%s must be a positive integer, got %r" %
                (THREADS_ENV, value))
    return threads


def _replicate(task, master_seed, index):
    return task(utils.rng_stream(master_seed, index), index)


def run_replications(task, count, master_seed, threads=None):
    """Returns [task(rng_i, i) for i in range(count)].

    rng_i is seeded by (master_seed, i), so results do not depend on the
    number of workers. `task` must be picklable when threads > 1.
    """
    threads = thread_count() if threads is None else threads
    threads = max(1, min(threads, count))
    worker = functools.partial(_replicate, task, master_seed)
    LOG.debug("Running %d replications on %d worker(s)", count, threads)
    if threads == 1:
        return [worker(i) for i in range(count)]
    with multiprocessing.Pool(processes=threads) as pool:
        return pool.map(worker, range(count))
