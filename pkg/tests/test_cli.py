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
import io
import os
import shutil
import tempfile
import unittest

import mock

from coco_denoiser import cli
from coco_denoiser import exceptions
from coco_denoiser import results


class TestCli(unittest.TestCase):

    def setUp(self):
        self.tmp_dir = tempfile.mkdtemp()
        self.out_dir = os.path.join(self.tmp_dir, 'out')
        self.config_path = os.path.join(self.tmp_dir, 'run.conf')
        self._write_config(u'points = 3\ndimension = 2\nsigma = 1.0\n')
        patcher = mock.patch.object(cli, 'setup_logging')
        self.setup_logging = patcher.start()
        self.addCleanup(patcher.stop)

    def tearDown(self):
        shutil.rmtree(self.tmp_dir)

    def _write_config(self, text):
        with io.open(self.config_path, 'w', encoding='utf-8') as conf_file:
            conf_file.write(text)

    def _main(self, *args):
        return cli.main(['denoise-once', '--config', self.config_path,
                         '--out', self.out_dir] + list(args))

    def _read_table(self, name='denoise-once'):
        path = os.path.join(self.out_dir, '%s.csv' % name)
        with io.open(path, encoding='utf-8') as csv_file:
            return results.ResultTable.from_csv(csv_file.read())

    def test_success(self):
        self.assertEqual(cli.EXIT_OK, self._main())
        self.assertEqual(6, len(self._read_table().rows))
        self.setup_logging.assert_called_once_with(False)

    def test_debug_flag(self):
        self.assertEqual(cli.EXIT_OK, self._main('--debug'))
        self.setup_logging.assert_called_once_with(True)

    def test_overrides(self):
        self.assertEqual(cli.EXIT_OK, self._main('--set', 'points=2'))
        self.assertEqual(4, len(self._read_table().rows))
        self.assertEqual(cli.EXIT_OK, cli.main(
            ['denoise-once', 'dimension=1', '--config', self.config_path,
             '--out', self.out_dir]))
        self.assertEqual(3, len(self._read_table().rows))

    def test_seed_flag(self):
        self.assertEqual(cli.EXIT_OK, self._main('--seed', '1'))
        first = self._read_table()
        self.assertEqual('1', first.provenance_value('seed'))
        self.assertEqual(cli.EXIT_OK, self._main('--seed', '2'))
        second = self._read_table()
        self.assertNotEqual(first.column('grad_noisy'),
                            second.column('grad_noisy'))

    def test_invalid_option_value(self):
        self.assertEqual(cli.EXIT_CONFIG_ERROR,
                         self._main('--set', 'sigma=-1'))
        self.assertFalse(os.path.exists(self.out_dir))

    def test_unknown_option(self):
        self._write_config(u'points = 3\nsigmaa = 1.0\n')
        self.assertEqual(cli.EXIT_CONFIG_ERROR, self._main())

    def test_malformed_override(self):
        self.assertEqual(cli.EXIT_CONFIG_ERROR, self._main('--set', 'seed'))

    def test_missing_config_file(self):
        os.remove(self.config_path)
        self.assertEqual(cli.EXIT_CONFIG_ERROR, self._main())

    def test_missing_dataset(self):
        self._write_config(u'objective = logistic\n'
                           u'dataset = %s\n' %
                           os.path.join(self.tmp_dir, 'missing.svm'))
        self.assertEqual(cli.EXIT_DATA_ERROR, cli.main(
            ['optimize', '--config', self.config_path,
             '--out', self.out_dir]))

    def test_malformed_dataset(self):
        dataset = os.path.join(self.tmp_dir, 'broken.svm')
        with io.open(dataset, 'w', encoding='utf-8') as data_file:
            data_file.write(u'+1 2:0.5 1:0.3\n')
        self._write_config(u'objective = logistic\ndataset = %s\n' % dataset)
        self.assertEqual(cli.EXIT_DATA_ERROR, cli.main(
            ['optimize', '--config', self.config_path,
             '--out', self.out_dir]))

    def test_unknown_kind(self):
        self.assertRaises(SystemExit, cli.main,
                          ['plot', '--config', self.config_path])

    def test_svg_flag(self):
        self.assertEqual(cli.EXIT_OK, cli.main(
            ['tightness', '--config', self.config_path, '--out',
             self.out_dir, '--svg', '--set', 'replications=10',
             '--set', 'delta_x=[0, 5]']))
        self.assertTrue(os.path.isfile(
            os.path.join(self.out_dir, 'tightness.svg')))


class TestReraise(unittest.TestCase):

    def test_os_error_is_replaced(self):
        @cli.reraise_io_exception(exceptions.CocoDataException, 'outputs')
        def failing():
            raise OSError('disk full')

        self.assertRaises(exceptions.CocoDataException, failing)

    def test_other_errors_pass_through(self):
        @cli.reraise_io_exception(KeyError, 'outputs')
        def failing():
            raise ValueError('boom')

        self.assertRaises(ValueError, failing)
