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
"""Experiment runners: one ResultTable per experiment kind."""

import functools
import os

import numpy as np

try:
    from oslo_log import log as logging
except ImportError:  # pragma: no cover
    import logging

import coco_denoiser
from coco_denoiser import coco_core
from coco_denoiser import config as coco_config
from coco_denoiser import exceptions as coco_ex
from coco_denoiser import mc_lab
from coco_denoiser import objects as obj
from coco_denoiser import optim
from coco_denoiser import oracles
from coco_denoiser import results
from coco_denoiser import utils

LOG = logging.getLogger(__name__)

PLOTS = {
    'mse-vs-sigma': results.PlotSpec(x='sigma2', y='mse', err='se',
                                     series='K',
                                     title='Per-point MSE against noise'),
    'mse-elementwise': results.PlotSpec(x='point', y='mse_coco',
                                        err='se_coco',
                                        title='Per-point MSE'),
    'tightness': results.PlotSpec(x='delta_x', y='p_hat', err='se',
                                  series='delta_lipschitz',
                                  title='Probability of an active '
                                        'constraint'),
    'optimize': results.PlotSpec(x='calls', y='mean_distance', err='se',
                                 series='algorithm',
                                 title='Distance to the minimizer'),
    'warmstart-bench': results.PlotSpec(x='step', y='warm_iterations',
                                        title='Solver iterations with '
                                              'warm start'),
}


def _window_size(window, points):
    return points if window == optim.FULL_HISTORY else window


def _mse_sigma_replication(truths, points, sigmas, windows, lipschitz,
                           solver, rng, index):
    """Mean per-point squared error of COCO_K for every (sigma, K).

    The same standard normal draws are scaled for every sigma and shared
    by every window.
    """
    draws = rng.standard_normal(truths.shape)
    errors = np.empty((len(sigmas), len(windows)))
    for i, sigma in enumerate(sigmas):
        noisy = truths + sigma * draws
        for j, size in enumerate(windows):
            query_set = obj.QuerySet(points=points[:size],
                                     gradients=noisy[:size],
                                     lipschitz=lipschitz)
            theta = coco_core.denoise(query_set, solver).theta
            errors[i, j] = np.mean(
                np.sum((theta - truths[:size]) ** 2, axis=1))
    return errors


def _elementwise_replication(truths, points, sigma, lipschitz, solver,
                             rng, index):
    noisy = truths + sigma * rng.standard_normal(truths.shape)
    query_set = obj.QuerySet(points=points, gradients=noisy,
                             lipschitz=lipschitz)
    return coco_core.denoise(query_set, solver).theta, noisy


def _trajectory_replication(oracle, spec, window, budget, solver,
                            lipschitz, master_seed, rng, index):
    traj = optim.run_optimizer(oracle, spec, window=window, budget=budget,
                               seed=master_seed, run_index=index,
                               solver=solver, lipschitz=lipschitz)
    return traj.calls, traj.distances, traj.diverged


class ExperimentManager(object):
    """Runs the experiment described by an ExperimentConfig."""

    def __init__(self, cfg):
        self.cfg = cfg

    def _log(self, message, *args):
        if self.cfg.log_progress_as_info:
            LOG.info(message, *args)
        else:
            LOG.debug(message, *args)

    @property
    def provenance(self):
        return [('coco-denoiser', coco_denoiser.__version__),
                ('kind', self.cfg.kind),
                ('seed', self.cfg.seed),
                ('config_hash', self.cfg.config_hash),
                ('config', self.cfg.serialize())]

    def _table(self, name, columns, units=None):
        return results.ResultTable(name=name, columns=columns,
                                   units=units or {},
                                   provenance=self.provenance)

    @property
    def solver(self):
        return obj.SolverConfig(max_iter=self.cfg.max_iter,
                                tol=float(self.cfg.tol),
                                warm_start=self.cfg.warm_start)

    def objective(self):
        cfg = self.cfg
        if cfg.objective == 'logistic':
            dataset = oracles.load_libsvm(cfg.dataset)
            return oracles.LogisticObjective(dataset, reg=cfg.reg)
        return oracles.QuadraticObjective.linspace(
            cfg.dimension, low=cfg.eigen_low, high=cfg.eigen_high,
            rotate=cfg.rotate, seed=cfg.seed)

    def lipschitz(self, objective):
        if self.cfg.lipschitz is not None:
            return float(self.cfg.lipschitz)
        return objective.lipschitz

    def sample_points(self, rng, count, dimension):
        """Query points drawn uniformly from the cube [-l, l]^d."""
        half = self.cfg.half_width
        return rng.uniform(-half, half, size=(count, dimension))

    def _quadratic_configuration(self):
        objective = self.objective()
        rng = utils.rng_stream(self.cfg.seed, 0)
        points = self.sample_points(rng, self.cfg.points,
                                    objective.dimension)
        truths = np.array([objective.gradient(x) for x in points])
        return objective, points, truths

    def run_experiment(self):
        """Runs the configured kind and returns its ResultTable."""
        runner = {'denoise-once': self.denoise_once,
                  'mse-vs-sigma': self.mse_vs_sigma,
                  'mse-elementwise': self.mse_elementwise,
                  'tightness': self.tightness,
                  'optimize': self.optimize,
                  'warmstart-bench': self.warmstart_bench}[self.cfg.kind]
        LOG.info("Running %s experiment (seed %d, config %s)",
                 self.cfg.kind, self.cfg.seed, self.cfg.config_hash[:12])
        table = runner()
        LOG.info("Experiment %s produced %d rows", self.cfg.kind,
                 len(table.rows))
        return table

    def write(self, table):
        """Writes the CSV (and the SVG when enabled); returns the paths."""
        paths = [results.write_table(table, self.cfg.output_dir)]
        plot = PLOTS.get(self.cfg.kind)
        if self.cfg.svg and plot is not None:
            path = os.path.join(self.cfg.output_dir, '%s.svg' % table.name)
            results.emit_svg(table, plot, path)
            paths.append(path)
        return paths

    def run(self):
        return self.write(self.run_experiment())

    def denoise_once(self):
        cfg = self.cfg
        objective, points, truths = self._quadratic_configuration()
        rng = utils.rng_stream(cfg.seed, 1)
        noisy = truths + cfg.sigma * rng.standard_normal(truths.shape)
        query_set = obj.QuerySet(points=points, gradients=noisy,
                                 lipschitz=self.lipschitz(objective))
        result = coco_core.denoise(query_set, self.solver)
        self._log("Denoised %d points in %d iterations, feasibility %g",
                  query_set.count, result.iterations, result.feasibility)
        table = self._table('denoise-once',
                            ['point', 'coordinate', 'x', 'grad_true',
                             'grad_noisy', 'grad_coco'])
        for k in range(query_set.count):
            for j in range(query_set.dimension):
                table.append([k, j, float(points[k, j]),
                              float(truths[k, j]), float(noisy[k, j]),
                              float(result.theta[k, j])])
        return table

    def mse_vs_sigma(self):
        cfg = self.cfg
        sizes = [_window_size(w, cfg.points) for w in cfg.windows]
        if max(sizes) > cfg.points:
            raise coco_ex.CocoConfigException(
                msg="Option windows: %d exceeds points = %d" %
                    (max(sizes), cfg.points))
        objective, points, truths = self._quadratic_configuration()
        task = functools.partial(_mse_sigma_replication, truths, points,
                                 [float(s) for s in cfg.sigmas], sizes,
                                 self.lipschitz(objective), self.solver)
        errors = np.array(mc_lab.run_replications(task, cfg.replications,
                                                  cfg.seed + 1))

        table = self._table('mse-vs-sigma',
                            ['sigma2', 'K', 'mse', 'se', 'slope'])
        sigma2 = [float(s) ** 2 for s in cfg.sigmas]
        for j, size in enumerate(sizes):
            estimates = [mc_lab.mean_and_se(errors[:, i, j])
                         for i in range(len(sigma2))]
            slope = mc_lab.slope_through_origin(
                sigma2, [e.mean for e in estimates])
            self._log("K=%d: MSE slope %g", size, slope)
            for s2, estimate in zip(sigma2, estimates):
                table.append([s2, size, estimate.mean, estimate.stderr,
                              slope])
        return table

    def mse_elementwise(self):
        cfg = self.cfg
        objective, points, truths = self._quadratic_configuration()
        task = functools.partial(_elementwise_replication, truths, points,
                                 float(cfg.sigma), self.lipschitz(objective),
                                 self.solver)
        outcomes = mc_lab.run_replications(task, cfg.replications,
                                           cfg.seed + 1)
        thetas = np.array([theta for theta, _ in outcomes])
        noisy = np.array([g for _, g in outcomes])
        coco_mse = mc_lab.mse_per_point(thetas, truths)
        oracle_mse = mc_lab.mse_per_point(noisy, truths)
        bias = mc_lab.bias_estimate(thetas, truths,
                                    rng=utils.rng_stream(cfg.seed, 1))
        theory = objective.dimension * float(cfg.sigma) ** 2

        table = self._table('mse-elementwise',
                            ['point', 'mse_coco', 'se_coco',
                             'mse_oracle_emp', 'se_oracle',
                             'mse_oracle_theory', 'bias_coco', 'se_bias'])
        for k in range(cfg.points):
            table.append([k, coco_mse[k].mean, coco_mse[k].stderr,
                          oracle_mse[k].mean, oracle_mse[k].stderr, theory,
                          bias[k].mean, bias[k].stderr])
        return table

    def tightness(self):
        cfg = self.cfg
        true_l = float(cfg.true_lipschitz)
        if true_l + min(cfg.delta_lipschitz) <= 0:
            raise coco_ex.CocoConfigException(
                msg="Option delta_lipschitz: true_lipschitz + %g is not "
                    "positive" % min(cfg.delta_lipschitz))
        table = self._table('tightness',
                            ['delta_x', 'delta_lipschitz', 'p_theory',
                             'p_hat', 'se', 'coco_mse', 'coco_mse_se',
                             'coco_bias', 'coco_bias_se'])
        cell = 0
        for delta_l in cfg.delta_lipschitz:
            for delta_x in cfg.delta_x:
                cell += 1
                rng = utils.rng_stream(cfg.seed, cell)
                q = mc_lab.quadratic_tightness_query(
                    delta_x, delta_l, cfg.sigma, true_lipschitz=true_l)
                p_hat = mc_lab.p_active_empirical(q, cfg.replications, rng)

                x1 = np.array([0.5 * delta_x])
                x2 = -x1
                draws = rng.standard_normal((cfg.replications, 2))
                g1 = true_l * x1 + cfg.sigma * draws[:, :1]
                g2 = true_l * x2 + cfg.sigma * draws[:, 1:]
                theta1, _ = coco_core.coco2_batch(x1, x2, g1, g2,
                                                  q.lipschitz)
                mse = mc_lab.mse_estimate(theta1, true_l * x1)
                bias = mc_lab.bias_estimate(theta1, true_l * x1, rng=rng)[0]
                table.append([float(delta_x), float(delta_l),
                              mc_lab.p_active_theoretical(q), p_hat.mean,
                              p_hat.stderr, mse.mean, mse.stderr,
                              bias.mean, bias.stderr])
        return table

    def optimize(self):
        cfg = self.cfg
        objective = self.objective()
        oracle = oracles.GradientOracle(
            objective, oracles.NoiseModel(sigma=cfg.sigma))
        # computed once here so workers receive it with the oracle
        self._log("Minimizer at distance %g from the origin",
                  np.linalg.norm(oracle.minimizer))
        table = self._table('optimize',
                            ['algorithm', 'calls', 'mean_distance', 'se',
                             'runs', 'diverged'])
        for name in cfg.optimizers:
            kind, averaging = coco_config.parse_optimizer_name(name)
            spec = optim.OptimizerSpec(kind=kind, step_size=cfg.step_size,
                                       averaging=averaging, x0=cfg.x0)
            for window in cfg.windows:
                self._add_curve(table, oracle, spec, window)
        return table

    def _add_curve(self, table, oracle, spec, window):
        cfg = self.cfg
        label = spec.label(window)
        task = functools.partial(_trajectory_replication, oracle, spec,
                                 window, cfg.budget, self.solver,
                                 cfg.lipschitz, cfg.seed)
        runs = mc_lab.run_replications(task, cfg.replications, cfg.seed)
        diverged = sum(1 for _, _, flag in runs if flag)
        if diverged:
            LOG.warning("%s: %d of %d runs diverged", label, diverged,
                        len(runs))
        calls = max((run[0] for run in runs), key=len)
        last = len(calls) - 1
        for index, call in enumerate(calls):
            if index % cfg.record_every and index != last:
                continue
            distances = [run[1][index] for run in runs
                         if len(run[1]) > index]
            estimate = mc_lab.mean_and_se(distances)
            table.append([label, int(call), estimate.mean, estimate.stderr,
                          estimate.count, diverged])
        self._log("%s: final mean distance %g", label, table.rows[-1][2])

    def warmstart_bench(self):
        """Cold and warm FDPG solves on the sliding window of one
        SGD+COCO trajectory."""
        cfg = self.cfg
        objective = self.objective()
        oracle = oracles.GradientOracle(
            objective, oracles.NoiseModel(sigma=cfg.sigma))
        solver = self.solver
        size = None if cfg.window == optim.FULL_HISTORY else cfg.window
        window = optim.CocoWindow(size, self.lipschitz(objective), solver)
        spec = optim.OptimizerSpec(step_size=cfg.step_size, x0=cfg.x0)
        state = optim.SgdState(x=spec.initial_point(oracle.dimension),
                               step_size=cfg.step_size)
        rng = utils.rng_stream(cfg.seed, 0)

        table = self._table('warmstart-bench',
                            ['step', 'cold_iterations', 'warm_iterations',
                             'ratio'])
        for step in range(1, cfg.budget + 1):
            g = oracle.query(state.x, rng).gradient
            if len(window) + 1 < 3 or (size is not None and size < 3):
                theta, _ = optim.coco_wrap(window, state.x, g)
            else:
                window.push(state.x, g)
                pairs = window.pairs()
                problem = coco_core.build_dual_problem(window.query_set())
                cold = coco_core.fdpg_solve(problem, solver)
                warm = coco_core.fdpg_solve(problem, solver,
                                            window.warm_start(pairs))
                window.last_result, window.last_pairs = warm, pairs
                theta = warm.theta[-1]
                if step > cfg.burn_in:
                    table.append([step, cold.iterations, warm.iterations,
                                  float(warm.iterations) /
                                  max(1, cold.iterations)])
            optim.sgd_step(state, theta)
        return table
