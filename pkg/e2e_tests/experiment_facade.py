import os
import shutil
import tempfile
from collections import deque

from coco_denoiser import config
from coco_denoiser.experiments import ExperimentManager


class E2EExperimentFacade(ExperimentManager):
    """
    Experiment manager facade for end-to-end tests.

    This facade writes every output into a scratch directory, remembers the
    files it created and sweeps them after the test is done.
    """

    def __init__(self, kind, **options):
        self.__scratch_dir = tempfile.mkdtemp(prefix='coco-e2e-')
        self.__written = deque()
        options.update(kind=kind, output_dir=self.__scratch_dir)
        super(E2EExperimentFacade, self).__init__(
            config.ExperimentConfig(options))

    def write(self, table):
        paths = super(E2EExperimentFacade, self).write(table)
        self.__written.extend(paths)
        return paths

    def column_by(self, table, key, column):
        """Groups `column` of `table` by the value of column `key`."""
        grouped = {}
        for k, v in zip(table.column(key), table.column(column)):
            grouped.setdefault(k, []).append(v)
        return grouped

    def sweep_outputs(self):
        """
        Sweep all files written by the facade.
        """
        while self.__written:
            path = self.__written.pop()
            if os.path.exists(path):
                os.remove(path)
        shutil.rmtree(self.__scratch_dir, ignore_errors=True)
