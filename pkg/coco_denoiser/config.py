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

import six

try:
    from oslo_log import log as logging
except ImportError:  # pragma: no cover
    import logging

try:
    from oslo_serialization import jsonutils
except ImportError:  # pragma: no cover
    import json as jsonutils

from coco_denoiser import exceptions as coco_ex
from coco_denoiser import optim
from coco_denoiser import utils

LOG = logging.getLogger(__name__)

KINDS = ('denoise-once', 'mse-vs-sigma', 'mse-elementwise', 'tightness',
         'optimize', 'warmstart-bench')
OBJECTIVES = ('quadratic', 'logistic')
# kinds whose estimates are measured relative to the noise level
NOISY_KINDS = ('mse-vs-sigma', 'mse-elementwise', 'tightness')
AVERAGING_SUFFIX = '+pr'


def parse_optimizer_name(name):
    """'sgd' -> ('sgd', False); 'sgd+pr' -> ('sgd', True)."""
    if name.endswith(AVERAGING_SUFFIX):
        return name[:-len(AVERAGING_SUFFIX)], True
    return name, False


class ExperimentConfig(object):
    """Validated parameters of one experiment run.

    Options come from a dict or from any object exposing them as
    attributes; options left out take the DEFAULT_OPTIONS value and
    unknown dict keys are rejected.
    """

    DEFAULT_OPTIONS = {'kind': None,
                       'seed': 0,
                       'replications': 1000,
                       'dimension': 3,
                       'points': 10,
                       'window': 2,
                       'windows': [1, 2, 4, 8, 10],
                       # L handed to the denoiser; None uses the objective's
                       # own constant
                       'lipschitz': None,
                       # L of the tightness objective, the denoiser there
                       # assumes true_lipschitz + delta_lipschitz
                       'true_lipschitz': 1.0,
                       'sigma': 10.0,
                       'sigmas': [1.0, 2.0, 5.0, 10.0],
                       'eigen_low': 1.0 / 3.0,
                       'eigen_high': 1.0,
                       'rotate': False,
                       'half_width': 5.0,
                       'step_size': 0.1,
                       'budget': 1000,
                       'objective': 'quadratic',
                       'dataset': None,
                       'reg': 0.0,
                       'optimizers': ['sgd'],
                       'x0': 10.0,
                       'delta_x': [0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0,
                                   100.0, 200.0],
                       'delta_lipschitz': [-0.5, 0.0, 1.0],
                       'max_iter': 500,
                       'tol': 1e-8,
                       'warm_start': True,
                       'burn_in': 10,
                       'record_every': 10,
                       'log_progress_as_info': False,
                       'output_dir': '.',
                       'svg': False}

    def __init__(self, options):
        self._parse_options(options)
        self._validate()

    def _parse_options(self, options):
        """Copy necessary options to self"""
        if isinstance(options, dict):
            unknown = sorted(set(options) - set(self.DEFAULT_OPTIONS))
            if unknown:
                raise coco_ex.CocoConfigException(
                    msg="Option %s is not defined" % ', '.join(unknown))
        for attr, default in self.DEFAULT_OPTIONS.items():
            if isinstance(options, dict):
                value = options.get(attr, default)
            else:
                value = getattr(options, attr, default)
            if value is None:
                value = default
            if isinstance(value, list):
                value = list(value)
            setattr(self, attr, value)

    # validation helpers raise with the offending option named
    def _fail(self, name, reason):
        raise coco_ex.CocoConfigException(
            msg="Option %s: %s, got %r" % (name, reason,
                                           getattr(self, name)))

    def _check_int(self, name, minimum):
        value = getattr(self, name)
        if isinstance(value, bool) or \
                not isinstance(value, six.integer_types) or value < minimum:
            self._fail(name, "must be an integer >= %d" % minimum)

    def _check_number(self, name, minimum=None, strict=True,
                      optional=False):
        value = getattr(self, name)
        if value is None and optional:
            return
        if isinstance(value, bool) or \
                not isinstance(value, (six.integer_types, float)):
            self._fail(name, "must be a number")
        if minimum is not None:
            if (strict and not value > minimum) or \
                    (not strict and not value >= minimum):
                self._fail(name, "must be %s %s" %
                           ('>' if strict else '>=', minimum))

    def _check_bool(self, name):
        if not isinstance(getattr(self, name), bool):
            self._fail(name, "must be true or false")

    def _check_list(self, name, check_item, allow_empty=False):
        value = getattr(self, name)
        if not isinstance(value, list) or (not value and not allow_empty):
            self._fail(name, "must be a non-empty list")
        for item in value:
            if not check_item(item):
                self._fail(name, "invalid entry %r" % (item,))

    @staticmethod
    def _is_window(value):
        if value == optim.FULL_HISTORY:
            return True
        return (isinstance(value, six.integer_types) and
                not isinstance(value, bool) and value >= 1)

    @staticmethod
    def _is_number(value):
        return (isinstance(value, (six.integer_types, float)) and
                not isinstance(value, bool))

    def _validate(self):
        if self.kind not in KINDS:
            self._fail('kind', "must be one of %s" % ', '.join(KINDS))
        for name in ('seed', ):
            self._check_int(name, 0)
        for name in ('replications', ):
            self._check_int(name, 2)
        for name in ('dimension', 'points', 'budget', 'max_iter',
                     'record_every'):
            self._check_int(name, 1)
        self._check_int('burn_in', 0)
        if not self._is_window(self.window):
            self._fail('window', "must be an integer >= 1 or 'all'")
        self._check_list('windows', self._is_window)
        self._check_number('lipschitz', 0, optional=True)
        self._check_number('true_lipschitz', 0)
        self._check_number('sigma', 0, strict=self.kind in NOISY_KINDS)
        for name in ('eigen_high', 'half_width', 'step_size'):
            self._check_number(name, 0)
        self._check_number('eigen_low', 0)
        if self.eigen_low > self.eigen_high:
            self._fail('eigen_low', "must not exceed eigen_high")
        for name in ('reg', 'tol'):
            self._check_number(name, 0, strict=False)
        for name in ('rotate', 'warm_start', 'log_progress_as_info', 'svg'):
            self._check_bool(name)
        self._check_list('sigmas',
                         lambda v: self._is_number(v) and v > 0)
        self._check_list('delta_x', self._is_number)
        self._check_list('delta_lipschitz', self._is_number)
        self._check_list(
            'optimizers',
            lambda v: (isinstance(v, six.string_types) and
                       parse_optimizer_name(v)[0] in optim.OPTIMIZER_KINDS))
        if self.objective not in OBJECTIVES:
            self._fail('objective', "must be one of %s" %
                       ', '.join(OBJECTIVES))
        if self.objective == 'logistic' and not self.dataset:
            self._fail('dataset', "a libsvm file is required for the "
                                  "logistic objective")
        if not self._is_number(self.x0) and not (
                isinstance(self.x0, list) and
                all(self._is_number(v) for v in self.x0)):
            self._fail('x0', "must be a number or a list of numbers")
        for name in ('output_dir', ):
            if not isinstance(getattr(self, name), six.string_types):
                self._fail(name, "must be a path")

    def to_dict(self):
        return dict((attr, getattr(self, attr))
                    for attr in self.DEFAULT_OPTIONS)

    def serialize(self):
        return jsonutils.dumps(self.to_dict(), sort_keys=True)

    @property
    def config_hash(self):
        return utils.sha1_hexdigest(self.serialize())

    @classmethod
    def deserialize(cls, text):
        return cls(jsonutils.loads(text))

    def __eq__(self, other):
        return (isinstance(other, ExperimentConfig) and
                self.to_dict() == other.to_dict())

    def __ne__(self, other):
        return not self.__eq__(other)

    __hash__ = None

    def __repr__(self):
        return "ExperimentConfig(%s)" % self.serialize()

    @staticmethod
    def parse_text(text):
        """Reads `key = value` lines; '#' starts a comment line."""
        options = {}
        for number, line in enumerate(io.StringIO(six.text_type(text)), 1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            if '=' not in line:
                raise coco_ex.CocoConfigException(
                    msg="line %d: expected 'key = value', got %r" %
                        (number, line))
            key, value = line.split('=', 1)
            options[key.strip()] = utils.parse_value(value)
        return options

    @staticmethod
    def parse_overrides(pairs):
        options = {}
        for pair in pairs or []:
            if '=' not in pair:
                raise coco_ex.CocoConfigException(
                    msg="override %r is not key=value" % pair)
            key, value = pair.split('=', 1)
            options[key.strip()] = utils.parse_value(value)
        return options

    @classmethod
    def from_file(cls, path, overrides=None):
        """Config file values, then `overrides` (which win)."""
        with io.open(path, encoding='utf-8') as config_file:
            options = cls.parse_text(config_file.read())
        LOG.debug("Read %d option(s) from %s", len(options), path)
        options.update(overrides or {})
        return cls(options)
