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
import numpy as np
import six

try:
    from oslo_log import log as logging
except ImportError:  # pragma: no cover
    import logging

from coco_denoiser import exceptions as coco_ex

LOG = logging.getLogger(__name__)


def _values_equal(left, right):
    if isinstance(left, np.ndarray) or isinstance(right, np.ndarray):
        try:
            return np.array_equal(np.asarray(left), np.asarray(right))
        except (TypeError, ValueError):
            return False
    if isinstance(left, (list, tuple)) and isinstance(right, (list, tuple)):
        return (len(left) == len(right) and
                all(_values_equal(a, b) for a, b in zip(left, right)))
    return left == right


def _value_to_dict(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    if isinstance(value, (list, tuple)):
        return [_value_to_dict(item) for item in value]
    return value


class BaseObject(object):
    """Base class that provides minimal object model interface

    This class add next features to objects:
      - initialize public instance variables for fields defined in
        '_fields' and '_shadow_fields', using '_defaults' (or None)
        for fields not passed on init
      - reject unknown fields on init
      - dynamically remap one fields into another using _remap dict,
        mapping is in effect on all stages (on init, getter and setter)
      - compare objects field by field, numpy arrays included
      - provides nice object representation that contains class
        and not None object fields (useful in python interpretter)
    """
    _fields = []
    _shadow_fields = []
    _defaults = {}
    _remap = {}

    def __init__(self, **kwargs):
        mapped_args = self._remap_fields(kwargs)
        known = self._fields + self._shadow_fields
        for key in mapped_args:
            if key not in known:
                raise coco_ex.InvalidParameter(
                    name=key, value=mapped_args[key],
                    reason="unknown field for %s" % self.__class__.__name__)
        for field in known:
            if field in mapped_args:
                setattr(self, field, mapped_args[field])
            elif not hasattr(self, field):
                setattr(self, field, self._defaults.get(field))

    def __getattr__(self, name):
        # Map aliases into real fields
        if name in self._remap:
            return getattr(self, self._remap[name])
        raise AttributeError(name)

    def __setattr__(self, name, value):
        if name in self._remap:
            return setattr(self, self._remap[name], value)
        super(BaseObject, self).__setattr__(name, value)

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            for field in self._fields:
                if not _values_equal(getattr(self, field),
                                     getattr(other, field)):
                    return False
            return True
        return False

    def __ne__(self, other):
        return not self.__eq__(other)

    __hash__ = None

    def __repr__(self):
        data = {field: getattr(self, field)
                for field in self._fields + self._shadow_fields
                if getattr(self, field, None) is not None}
        data_str = ', '.join(
            "{0}=\"{1}\"".format(key, data[key]) for key in sorted(data))
        return "{0}: {1}".format(self.__class__.__name__, data_str)

    @classmethod
    def _remap_fields(cls, kwargs):
        """Map aliases from kwargs into real field names"""
        mapped = {}
        for key in kwargs:
            if key in cls._remap:
                mapped[cls._remap[key]] = kwargs[key]
            else:
                mapped[key] = kwargs[key]
        return mapped

    @classmethod
    def from_dict(cls, obj_dict):
        return cls(**obj_dict)

    def to_dict(self):
        return {field: _value_to_dict(getattr(self, field))
                for field in self._fields
                if getattr(self, field, None) is not None}


def as_blocks(value, name):
    """Stacks a list of vectors (or scalars, read as d=1) into (K, d)."""
    blocks = np.asarray(value, dtype=float)
    if blocks.ndim == 1:
        blocks = blocks.reshape(-1, 1)
    if blocks.ndim != 2:
        raise coco_ex.DimensionMismatch(
            reason="%s must be a list of vectors, got shape %s" %
                   (name, blocks.shape))
    return blocks


class QuerySet(BaseObject):
    """K query points, their noisy gradients and the Lipschitz constant.

    Points and gradients are stored as (K, d) float arrays; lists of
    scalars are read as K one-dimensional vectors.
    """
    _fields = ['points', 'gradients', 'lipschitz']
    _remap = {'x': 'points', 'g': 'gradients', 'L': 'lipschitz'}

    def __init__(self, **kwargs):
        super(QuerySet, self).__init__(**kwargs)
        self.points = as_blocks(self.points, 'points')
        self.gradients = as_blocks(self.gradients, 'gradients')
        if self.points.shape != self.gradients.shape:
            raise coco_ex.DimensionMismatch(
                reason="points %s and gradients %s differ in shape" %
                       (self.points.shape, self.gradients.shape))
        if self.points.shape[0] < 1 or self.points.shape[1] < 1:
            raise coco_ex.DimensionMismatch(
                reason="at least one point of dimension >= 1 is required")
        if self.lipschitz is None or not self.lipschitz > 0:
            raise coco_ex.InvalidLipschitzConstant(value=self.lipschitz)
        self.lipschitz = float(self.lipschitz)

    @property
    def count(self):
        return self.points.shape[0]

    @property
    def dimension(self):
        return self.points.shape[1]


class PairConstraint(BaseObject):
    """Co-coercivity constraint between points m < l as a ball.

    The constraint reads ||theta_m - theta_l - (L/2)(x_m - x_l)|| <= radius
    once written for alpha = theta - g, with the center term
    c_ml = (g_m - (L/2) x_m) - (g_l - (L/2) x_l).
    """
    _fields = ['pair', 'center', 'radius']


class DualProblem(BaseObject):
    """Pairwise constraint data in lexicographic pair order.

    `weights` holds the multiplicity of every point; it is 1 everywhere
    unless coincident points were coalesced into one.
    """
    _fields = ['query_set', 'pairs', 'centers', 'radii', 'weights',
               'lipschitz']
    _shadow_fields = ['index_m', 'index_l']
    _remap = {'L_p': 'lipschitz'}

    @property
    def count(self):
        return self.query_set.count

    @property
    def dimension(self):
        return self.query_set.dimension

    @property
    def pair_count(self):
        return len(self.pairs)

    @property
    def constraints(self):
        return [PairConstraint(pair=pair, center=self.centers[i],
                               radius=self.radii[i])
                for i, pair in enumerate(self.pairs)]


class DualState(BaseObject):
    """FISTA state on the dual: iterate s, momentum point y and t."""
    _fields = ['s', 'y', 't', 'iteration']
    _defaults = {'t': 1.0, 'iteration': 0}

    def __init__(self, **kwargs):
        super(DualState, self).__init__(**kwargs)
        self.s = np.array(self.s, dtype=float)
        if self.y is None:
            self.y = self.s.copy()
        else:
            self.y = np.array(self.y, dtype=float)
        if self.s.shape != self.y.shape:
            raise coco_ex.BlockStructureMismatch(
                expected=self.s.shape[0], dim=self.s.shape[-1],
                shape=self.y.shape)
        if self.t < 1:
            raise coco_ex.InvalidParameter(name='t', value=self.t,
                                           reason="momentum constant >= 1")

    @classmethod
    def zeros(cls, pair_count, dimension):
        return cls(s=np.zeros((pair_count, dimension)))


class DenoiseResult(BaseObject):
    _fields = ['theta', 'state', 'objective_trace', 'feasibility',
               'iterations']
    _shadow_fields = ['converged', 'pairs']
    _defaults = {'converged': True}


class SolverConfig(BaseObject):
    """FDPG budget: at most `max_iter` iterations, stop once the dual
    iterate moves by at most `tol` in infinity norm.

    With `restart` the momentum is reset whenever the last step points
    against the previous one.
    """
    _fields = ['max_iter', 'tol', 'warm_start', 'restart']
    _remap = {'T': 'max_iter', 'eps_stop': 'tol'}
    _defaults = {'max_iter': 500, 'tol': 1e-8, 'warm_start': True,
                 'restart': True}

    ORACLE_GRADE_MAX_ITER = 100000

    def __init__(self, **kwargs):
        super(SolverConfig, self).__init__(**kwargs)
        if not isinstance(self.max_iter, six.integer_types) or \
                self.max_iter < 1:
            raise coco_ex.InvalidParameter(name='max_iter',
                                           value=self.max_iter,
                                           reason="integer >= 1")
        if not self.tol >= 0:
            raise coco_ex.InvalidParameter(name='tol', value=self.tol,
                                           reason="must be >= 0")

    @classmethod
    def oracle_grade(cls, tol=1e-12):
        return cls(max_iter=cls.ORACLE_GRADE_MAX_ITER, tol=tol)


class OracleSample(BaseObject):
    _fields = ['point', 'gradient', 'calls']
    _defaults = {'calls': 1}


class McEstimate(BaseObject):
    """Monte-Carlo mean with the standard error of the mean."""
    _fields = ['mean', 'stderr', 'count']

    def within(self, value, num_se=4.0, slack=0.0):
        return abs(self.mean - value) <= num_se * self.stderr + slack


class TightnessQuery(BaseObject):
    """One-dimensional two-point configuration x_1 - x_2 = delta_x."""
    _fields = ['delta_x', 'delta_grad', 'lipschitz', 'sigma']
    _remap = {'L': 'lipschitz'}

    def __init__(self, **kwargs):
        super(TightnessQuery, self).__init__(**kwargs)
        if self.sigma is None or not self.sigma > 0:
            raise coco_ex.InvalidParameter(name='sigma', value=self.sigma,
                                           reason="must be > 0")
        if self.lipschitz is None or not self.lipschitz > 0:
            raise coco_ex.InvalidLipschitzConstant(value=self.lipschitz)


class Trajectory(BaseObject):
    """Per oracle call record of an optimizer run."""
    _fields = ['seed', 'calls', 'distances', 'iterates', 'diverged']
    _defaults = {'diverged': False}

    def __init__(self, **kwargs):
        super(Trajectory, self).__init__(**kwargs)
        for field in ('calls', 'distances', 'iterates'):
            if getattr(self, field) is None:
                setattr(self, field, [])

    def record(self, calls, x, distance, keep_iterate=True):
        if self.calls and calls <= self.calls[-1]:
            raise coco_ex.InvalidParameter(
                name='calls', value=calls,
                reason="oracle-call counts must strictly increase")
        self.calls.append(calls)
        self.distances.append(float(distance))
        if keep_iterate:
            self.iterates.append(np.array(x, dtype=float))

    @property
    def final_distance(self):
        return self.distances[-1] if self.distances else None
