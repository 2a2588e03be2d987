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
import unittest

import numpy as np

from coco_denoiser import exceptions
from coco_denoiser import utils


class TestUtils(unittest.TestCase):

    def test_safe_json_load_no_exception(self):
        data = 'Some regular not json text'
        self.assertEqual(None, utils.safe_json_load(data))

    def test_safe_json_load(self):
        data = '{"windows":[1,2,4]}'
        expected_data = {'windows': [1, 2, 4]}
        self.assertEqual(expected_data, utils.safe_json_load(data))

    def test_try_value_to_bool(self):
        test_data = ((True, True),
                     (False, False),
                     ('true', True),
                     ('On', True),
                     ('YES', True),
                     ('False', False),
                     ('off', False),
                     ('No', False),
                     ('sgd', 'sgd'),
                     ('/path/to/file.svm', '/path/to/file.svm'))
        for value, result in test_data:
            self.assertEqual(result, utils.try_value_to_bool(value))

    def test_parse_value(self):
        test_data = (('10', 10),
                     (' 0.1 ', 0.1),
                     ('1e-8', 1e-8),
                     ('[1, 2, "all"]', [1, 2, 'all']),
                     ('["sgd", "adam+pr"]', ['sgd', 'adam+pr']),
                     ('null', None),
                     ('on', True),
                     ('false', False),
                     ('all', 'all'),
                     ('data/a1a.svm', 'data/a1a.svm'),
                     (3, 3))
        for text, expected in test_data:
            self.assertEqual(expected, utils.parse_value(text))

    def test_sha1_hexdigest(self):
        first = utils.sha1_hexdigest('seed=0', np.arange(3.0))
        self.assertEqual(40, len(first))
        self.assertEqual(first,
                         utils.sha1_hexdigest('seed=0', np.arange(3.0)))
        self.assertNotEqual(first,
                            utils.sha1_hexdigest('seed=1', np.arange(3.0)))
        self.assertNotEqual(first,
                            utils.sha1_hexdigest('seed=0', np.arange(3)))

    def test_rng_stream_is_reproducible(self):
        first = utils.rng_stream(7, 3).standard_normal(4)
        again = utils.rng_stream(7, 3).standard_normal(4)
        other = utils.rng_stream(7, 4).standard_normal(4)
        np.testing.assert_array_equal(first, again)
        self.assertFalse(np.array_equal(first, other))

    def test_as_vector(self):
        np.testing.assert_array_equal([2.0], utils.as_vector(2))
        np.testing.assert_array_equal([1.0, 2.0],
                                      utils.as_vector([1, 2]))
        self.assertRaises(exceptions.DimensionMismatch,
                          utils.as_vector, [[1.0, 2.0]])
