import math
import unittest

from e2e_tests.experiment_facade import E2EExperimentFacade


def _terminal(facade, table):
    """Last (mean_distance, se) recorded for every algorithm label."""
    means = facade.column_by(table, 'algorithm', 'mean_distance')
    errors = facade.column_by(table, 'algorithm', 'se')
    return dict((label, (means[label][-1], errors[label][-1]))
                for label in means)


def _gap(first, second):
    """first - second and two standard errors of that difference."""
    return (first[0] - second[0],
            2 * math.sqrt(first[1] ** 2 + second[1] ** 2))


class TestExperimentsE2E(unittest.TestCase):

    def _facade(self, kind, **options):
        facade = E2EExperimentFacade(kind, **options)
        self.addCleanup(facade.sweep_outputs)
        return facade

    def _run(self, facade):
        table = facade.run_experiment()
        facade.write(table)
        return table

    def test_mse_slope_decreases_with_the_window(self):
        facade = self._facade('mse-vs-sigma', replications=1000, points=10,
                              dimension=3, windows=[1, 2, 4, 8, 10],
                              sigmas=[1.0, 2.0, 5.0, 10.0], seed=201)
        table = self._run(facade)
        slopes = facade.column_by(table, 'K', 'slope')
        ordered = [slopes[k][0] for k in (1, 2, 4, 8, 10)]
        self.assertAlmostEqual(3.0, ordered[0], delta=0.05 * 3.0)
        for wider, narrower in zip(ordered[1:], ordered):
            self.assertLessEqual(wider, narrower * (1 + 1e-2))

    def _assert_window_ordering(self, curves, labels):
        for previous, current in zip(labels, labels[1:]):
            diff, tolerance = _gap(curves[previous], curves[current])
            self.assertGreaterEqual(diff, -tolerance, (previous, current))
        diff, tolerance = _gap(curves[labels[0]], curves[labels[-1]])
        self.assertGreater(diff, tolerance)

    def test_denoising_improves_sgd_and_adam(self):
        facade = self._facade('optimize', dimension=10, sigma=10.0,
                              step_size=0.2, budget=200, replications=50,
                              windows=[1, 2, 4, 8],
                              optimizers=['sgd', 'adam'], x0=10.0,
                              record_every=200, seed=202)
        curves = _terminal(facade, self._run(facade))
        self._assert_window_ordering(
            curves, ['SGD', 'SGD+COCO2', 'SGD+COCO4', 'SGD+COCO8'])
        self._assert_window_ordering(
            curves, ['ADAM', 'ADAM+COCO2', 'ADAM+COCO4', 'ADAM+COCO8'])

    def test_warm_start_saves_iterations(self):
        facade = self._facade('warmstart-bench', window=8, tol=1e-8,
                              max_iter=100000, burn_in=10, budget=1000,
                              sigma=0.1, step_size=0.005, dimension=10,
                              x0=10.0, seed=203)
        table = self._run(facade)
        faster = [warm < cold for cold, warm in
                  zip(table.column('cold_iterations'),
                      table.column('warm_iterations'))]
        self.assertLess(max(table.column('cold_iterations')), 100000)
        self.assertEqual(990, len(faster))
        self.assertGreaterEqual(sum(faster), 0.9 * len(faster))

    def test_full_history_beats_averaging(self):
        options = dict(dimension=10, sigma=10.0, step_size=0.5, budget=100,
                       replications=100, x0=10.0, record_every=100,
                       seed=204)
        coco = self._facade('optimize', windows=[1, 'all'],
                            optimizers=['sgd'], **options)
        curves = _terminal(coco, self._run(coco))
        averaged = self._facade('optimize', windows=[1],
                                optimizers=['sgd+pr'], **options)
        curves.update(_terminal(averaged, self._run(averaged)))

        diff, tolerance = _gap(curves['SGD+PRaveraging'], curves['SGD+COCO'])
        self.assertGreater(diff, tolerance)
        diff, tolerance = _gap(curves['SGD'], curves['SGD+PRaveraging'])
        self.assertGreater(diff, tolerance)
