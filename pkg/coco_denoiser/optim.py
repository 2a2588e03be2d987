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
"""Stochastic first-order optimizers and the COCO plug-in."""

import collections

import numpy as np

try:
    from oslo_log import log as logging
except ImportError:  # pragma: no cover
    import logging

from coco_denoiser import coco_core
from coco_denoiser import exceptions as coco_ex
from coco_denoiser import objects as obj
from coco_denoiser import utils

LOG = logging.getLogger(__name__)

FIXED = 'fixed'
DECREASING = 'decreasing'
SCHEDULES = (FIXED, DECREASING)

OPTIMIZER_KINDS = ('sgd', 'sgd-decreasing', 'adam', 'strsaga')
FULL_HISTORY = 'all'

# update operations per logical STRSAGA step
STRSAGA_RHO = 2


def _check_step_size(value, name='step_size'):
    if value is None or not value > 0:
        raise coco_ex.InvalidParameter(name=name, value=value,
                                       reason="must be > 0")


def _check_gradient(x, g):
    g = utils.as_vector(g, 'g')
    if g.shape != x.shape:
        raise coco_ex.DimensionMismatch(
            reason="gradient %s does not match iterate %s" %
                   (g.shape, x.shape))
    return g


class SgdState(obj.BaseObject):
    """SGD iterate. With the decreasing schedule `step_size` is the
    constant C of gamma_k = C / k."""
    _fields = ['x', 'step_size', 'schedule', 'k']
    _remap = {'gamma': 'step_size'}
    _defaults = {'schedule': FIXED, 'k': 0}

    def __init__(self, **kwargs):
        super(SgdState, self).__init__(**kwargs)
        self.x = utils.as_vector(self.x, 'x').copy()
        _check_step_size(self.step_size)
        if self.schedule not in SCHEDULES:
            raise coco_ex.InvalidParameter(name='schedule',
                                           value=self.schedule,
                                           reason="one of %s" % (SCHEDULES,))


def sgd_step(st, g):
    g = _check_gradient(st.x, g)
    st.k += 1
    if st.schedule == DECREASING:
        gamma = st.step_size / st.k
    else:
        gamma = st.step_size
    st.x = st.x - gamma * g
    return st


class AdamState(obj.BaseObject):
    _fields = ['x', 'm', 'v', 'k', 'step_size', 'beta1', 'beta2', 'eps']
    _remap = {'gamma': 'step_size'}
    _defaults = {'k': 0, 'beta1': 0.9, 'beta2': 0.999, 'eps': 1e-8}

    def __init__(self, **kwargs):
        super(AdamState, self).__init__(**kwargs)
        self.x = utils.as_vector(self.x, 'x').copy()
        if self.m is None:
            self.m = np.zeros_like(self.x)
        if self.v is None:
            self.v = np.zeros_like(self.x)
        _check_step_size(self.step_size)
        for name in ('beta1', 'beta2'):
            value = getattr(self, name)
            if not 0 <= value < 1:
                raise coco_ex.InvalidParameter(name=name, value=value,
                                               reason="must be in [0, 1)")


def adam_step(st, g):
    g = _check_gradient(st.x, g)
    st.k += 1
    st.m = st.beta1 * st.m + (1.0 - st.beta1) * g
    st.v = st.beta2 * st.v + (1.0 - st.beta2) * (g * g)
    m_hat = st.m / (1.0 - st.beta1 ** st.k)
    v_hat = st.v / (1.0 - st.beta2 ** st.k)
    st.x = st.x - st.step_size * m_hat / (np.sqrt(v_hat) + st.eps)
    return st


class ArrivalSchedule(obj.BaseObject):
    """Streaming order of the examples, `per_step` arrivals per step."""
    _fields = ['order', 'per_step']
    _defaults = {'per_step': 1}

    @classmethod
    def shuffled(cls, count, rng, per_step=1):
        return cls(order=rng.permutation(count).tolist(), per_step=per_step)

    def arrivals(self, step):
        start = step * self.per_step
        return self.order[start:start + self.per_step]


class StrsagaState(obj.BaseObject):
    """Streaming SAGA state.

    `table` has one row per example; rows of examples that have not been
    inserted yet are zero and not part of the mean. `table_sum` is kept
    incrementally.
    """
    _fields = ['x', 'step_size', 'table', 'table_sum', 'arrived', 'k']
    _shadow_fields = ['pending', 'calls']
    _remap = {'gamma': 'step_size'}
    _defaults = {'k': 0, 'calls': 0}

    def __init__(self, **kwargs):
        super(StrsagaState, self).__init__(**kwargs)
        self.x = utils.as_vector(self.x, 'x').copy()
        _check_step_size(self.step_size)
        if self.arrived is None:
            self.arrived = []
        if self.pending is None:
            self.pending = collections.deque()

    @classmethod
    def start(cls, x, step_size, count):
        x = utils.as_vector(x, 'x')
        return cls(x=x, step_size=step_size,
                   table=np.zeros((count, x.size)),
                   table_sum=np.zeros(x.size))

    @property
    def table_mean(self):
        return self.table_sum / len(self.arrived)


def strsaga_step(st, objective, schedule, rng, gradient_hook=None):
    """One logical STRSAGA step: take the new arrivals, then perform
    STRSAGA_RHO updates, each on a pending arrival if any, otherwise on a
    uniformly drawn arrived example.

    A pending example enters the table with a zero row. Every update uses
    direction = g_i(x) - table_i + mean(table) and stores g_i(x) in row i.
    `gradient_hook(x, g)` may replace the sampled gradient (COCO plug-in).
    """
    st.pending.extend(schedule.arrivals(st.k))
    st.k += 1
    if not st.pending and not st.arrived:
        raise coco_ex.EmptyArrivalSet()

    for _ in range(STRSAGA_RHO):
        if st.pending:
            i = st.pending.popleft()
            st.arrived.append(i)
        else:
            i = st.arrived[int(rng.integers(len(st.arrived)))]
        g = objective.example_gradient(i, st.x)
        st.calls += 1
        if gradient_hook is not None:
            g = gradient_hook(st.x, g)
        direction = g - st.table[i] + st.table_mean
        st.x = st.x - st.step_size * direction
        st.table_sum = st.table_sum + (g - st.table[i])
        st.table[i] = g
    return st


class RunningAverage(object):
    """Online Polyak-Ruppert average of the iterates."""

    def __init__(self, first=None):
        self.count = 0
        self.mean = None
        if first is not None:
            self.update(first)

    def update(self, x):
        x = np.asarray(x, dtype=float)
        self.count += 1
        if self.mean is None:
            self.mean = x.copy()
        else:
            self.mean = self.mean + (x - self.mean) / self.count
        return self.mean


def pr_average(iterates):
    iterates = list(iterates)
    if not iterates:
        raise coco_ex.InvalidParameter(name='iterates', value=0,
                                       reason="at least one iterate")
    average = RunningAverage()
    for x in iterates:
        average.update(x)
    return average.mean


class CocoWindow(object):
    """The K most recent (point, noisy gradient) pairs, oldest first.

    `size=None` keeps the whole history. The last result and its pair
    ordering are kept to warm start the next solve.
    """

    def __init__(self, size, lipschitz, solver=None):
        if size is not None and (int(size) != size or size < 1):
            raise coco_ex.InvalidParameter(name='K', value=size,
                                           reason="integer >= 1 or 'all'")
        if lipschitz is None or not lipschitz > 0:
            raise coco_ex.InvalidLipschitzConstant(value=lipschitz)
        self.size = None if size is None else int(size)
        self.lipschitz = float(lipschitz)
        self.solver = solver if solver is not None else obj.SolverConfig()
        self.points = collections.deque(maxlen=self.size)
        self.gradients = collections.deque(maxlen=self.size)
        self.ids = collections.deque(maxlen=self.size)
        self.next_id = 0
        self.last_result = None
        self.last_pairs = None

    def __len__(self):
        return len(self.points)

    def push(self, x, g):
        self.points.append(np.array(x, dtype=float))
        self.gradients.append(np.array(g, dtype=float))
        self.ids.append(self.next_id)
        self.next_id += 1

    def query_set(self):
        return obj.QuerySet(points=np.array(self.points),
                            gradients=np.array(self.gradients),
                            lipschitz=self.lipschitz)

    def pairs(self):
        return coco_core.pair_ordering(self.ids)

    def warm_start(self, pairs):
        """Initial dual state shifted from the previous solve, or None."""
        if not self.solver.warm_start or self.last_pairs is None:
            return None
        if len(self.last_pairs) != len(pairs):
            return None
        return coco_core.warm_start_shift(self.last_result, self.last_pairs,
                                          pairs)


def coco_wrap(window, x_new, g_new):
    """Pushes the new query and returns the denoised gradient at x_new."""
    g_new = utils.as_vector(g_new, 'g_new')
    window.push(x_new, g_new)
    if len(window) == 1:
        return g_new, window

    pairs = window.pairs()
    result = coco_core.denoise(window.query_set(), window.solver,
                               window.warm_start(pairs))
    window.last_result = result
    window.last_pairs = pairs if result.pairs is not None else None
    return result.theta[-1], window


class OptimizerSpec(obj.BaseObject):
    """Which optimizer to run and how.

    kind: 'sgd' (fixed step), 'sgd-decreasing' (gamma_k = C / k with
    C = step_size), 'adam' or 'strsaga'. `averaging` reports the
    Polyak-Ruppert average instead of the last iterate. `x0` is a vector
    or a scalar broadcast to every coordinate.
    """
    _fields = ['kind', 'step_size', 'averaging', 'x0', 'beta1', 'beta2',
               'eps']
    _remap = {'gamma': 'step_size'}
    _defaults = {'kind': 'sgd', 'averaging': False, 'x0': 1.0,
                 'beta1': 0.9, 'beta2': 0.999, 'eps': 1e-8}

    def __init__(self, **kwargs):
        super(OptimizerSpec, self).__init__(**kwargs)
        if self.kind not in OPTIMIZER_KINDS:
            raise coco_ex.InvalidParameter(
                name='kind', value=self.kind,
                reason="one of %s" % (OPTIMIZER_KINDS,))
        _check_step_size(self.step_size)

    def initial_point(self, dimension):
        x0 = np.asarray(self.x0, dtype=float)
        if x0.ndim == 0:
            return np.full(dimension, float(x0))
        if x0.shape != (dimension,):
            raise coco_ex.DimensionMismatch(
                reason="x0 has shape %s, objective has dimension %d" %
                       (x0.shape, dimension))
        return x0.copy()

    def label(self, window=None):
        name = self.kind.upper() if self.kind != 'sgd-decreasing' \
            else 'SGD+DecreasingSS'
        if self.averaging:
            name += '+PRaveraging'
        if window == FULL_HISTORY:
            name += '+COCO'
        elif window is not None and window > 1:
            name += '+COCO%d' % window
        return name


def _make_window(window, lipschitz, solver):
    if window is None:
        return None
    size = None if window == FULL_HISTORY else window
    return CocoWindow(size, lipschitz, solver)


def run_optimizer(oracle, spec, window=None, budget=100, seed=0,
                  run_index=0, solver=None, lipschitz=None,
                  keep_iterates=False, log_progress_as_info=False):
    """Runs one seeded optimizer trajectory for `budget` oracle calls.

    window: None (no denoising), an integer K or FULL_HISTORY. Distances
    to the minimizer are recorded after every update, starting with x0 at
    zero calls. A non-finite iterate stops the run and flags the
    trajectory as diverged. `lipschitz` overrides the constant the
    denoiser assumes (the oracle's by default).
    """
    if budget < 1:
        raise coco_ex.InvalidParameter(name='budget', value=budget,
                                       reason="must be >= 1")
    rng = utils.rng_stream(seed, run_index)
    x_star = oracle.minimizer
    x = spec.initial_point(oracle.dimension)
    denoiser = _make_window(
        window, lipschitz if lipschitz is not None else oracle.lipschitz,
        solver)
    traj = obj.Trajectory(seed=[seed, run_index])
    average = RunningAverage(x) if spec.averaging else None
    traj.record(0, x, np.linalg.norm(x - x_star), keep_iterates)

    if spec.kind == 'strsaga':
        _run_strsaga(oracle, spec, x, denoiser, budget, rng, traj,
                     average, keep_iterates)
    else:
        _run_first_order(oracle, spec, x, denoiser, budget, rng,
                         traj, average, keep_iterates)

    message = ("Run %s (seed %s, index %s) finished after %d oracle calls, "
               "final distance %g")
    args = (spec.label(window), seed, run_index, traj.calls[-1],
            traj.final_distance)
    if log_progress_as_info:
        LOG.info(message, *args)
    else:
        LOG.debug(message, *args)
    return traj


def _report(traj, calls, x, x_star, average, keep_iterates):
    if not np.all(np.isfinite(x)):
        traj.diverged = True
        LOG.warning("Trajectory %s diverged after %d oracle calls",
                    traj.seed, calls)
        return False
    point = average.update(x) if average is not None else x
    traj.record(calls, point, np.linalg.norm(point - x_star), keep_iterates)
    return True


def _run_first_order(oracle, spec, x, denoiser, budget, rng, traj, average,
                     keep_iterates):
    if spec.kind == 'adam':
        state = AdamState(x=x, step_size=spec.step_size, beta1=spec.beta1,
                          beta2=spec.beta2, eps=spec.eps)
        step = adam_step
    else:
        schedule = DECREASING if spec.kind == 'sgd-decreasing' else FIXED
        state = SgdState(x=x, step_size=spec.step_size, schedule=schedule)
        step = sgd_step

    x_star = oracle.minimizer
    for calls in range(1, budget + 1):
        g = oracle.query(state.x, rng).gradient
        if denoiser is not None:
            g, _ = coco_wrap(denoiser, state.x, g)
        step(state, g)
        if not _report(traj, calls, state.x, x_star, average,
                       keep_iterates):
            break
    return state


def _run_strsaga(oracle, spec, x, denoiser, budget, rng, traj, average,
                 keep_iterates):
    if not oracle.is_finite_sum:
        raise coco_ex.InvalidParameter(
            name='kind', value=spec.kind,
            reason="STRSAGA needs a finite-sum (logistic) objective")
    objective = oracle.objective
    schedule = ArrivalSchedule.shuffled(objective.count, rng)
    state = StrsagaState.start(x, spec.step_size, objective.count)
    hook = None
    if denoiser is not None:
        def hook(point, g):
            theta, _ = coco_wrap(denoiser, point, g)
            return theta

    x_star = oracle.minimizer
    while state.calls + STRSAGA_RHO <= budget:
        strsaga_step(state, objective, schedule, rng, hook)
        if not _report(traj, state.calls, state.x, x_star, average,
                       keep_iterates):
            break
    return state
