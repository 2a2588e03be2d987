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
"""First-order oracles: synthetic quadratics and regularized logistic
regression, plus libsvm ingestion."""

import io

import numpy as np
import six
from scipy import special

try:
    from oslo_log import log as logging
except ImportError:  # pragma: no cover
    import logging

from coco_denoiser import exceptions as coco_ex
from coco_denoiser import objects as obj
from coco_denoiser import utils

LOG = logging.getLogger(__name__)

_MINIMIZER_CACHE = {}


class NoiseModel(obj.BaseObject):
    """Isotropic Gaussian noise w ~ N(0, sigma^2 I)."""
    _fields = ['sigma']
    _defaults = {'sigma': 0.0}

    def __init__(self, **kwargs):
        super(NoiseModel, self).__init__(**kwargs)
        if self.sigma is None or not self.sigma >= 0:
            raise coco_ex.InvalidParameter(name='sigma', value=self.sigma,
                                           reason="must be >= 0")
        self.sigma = float(self.sigma)


class QuadraticObjective(object):
    """f(x) = 1/2 x^T A x with its minimizer at the origin.

    The Hessian is given either explicitly or as an eigenvalue list. An
    eigenvalue list is realized as a diagonal matrix unless `rotate` is set,
    in which case a seeded random orthogonal basis is applied.
    """

    def __init__(self, eigenvalues=None, hessian=None, rotate=False, seed=0):
        if (eigenvalues is None) == (hessian is None):
            raise coco_ex.InvalidParameter(
                name='hessian', value=hessian,
                reason="pass exactly one of eigenvalues or hessian")
        if hessian is not None:
            hessian = np.asarray(hessian, dtype=float)
            if hessian.ndim != 2 or hessian.shape[0] != hessian.shape[1] \
                    or not np.allclose(hessian, hessian.T):
                raise coco_ex.InvalidParameter(
                    name='hessian', value=hessian.shape,
                    reason="must be a symmetric square matrix")
            eigenvalues = np.linalg.eigvalsh(hessian)
            scale = max(1.0, float(np.max(np.abs(eigenvalues))))
            if eigenvalues.min() < -1e-12 * scale:
                raise coco_ex.InvalidParameter(
                    name='hessian', value=eigenvalues.min(),
                    reason="must be positive semidefinite")
        else:
            eigenvalues = utils.as_vector(eigenvalues, 'eigenvalues')
            if np.any(eigenvalues < 0):
                raise coco_ex.InvalidParameter(
                    name='eigenvalues', value=eigenvalues.min(),
                    reason="must be >= 0")
            if rotate:
                rng = np.random.default_rng(seed)
                basis, _ = np.linalg.qr(
                    rng.standard_normal((eigenvalues.size,
                                         eigenvalues.size)))
                hessian = (basis * eigenvalues) @ basis.T
            else:
                hessian = np.diag(eigenvalues)
        self.hessian = hessian
        self.eigenvalues = np.sort(np.asarray(eigenvalues, dtype=float))
        self.dimension = hessian.shape[0]
        self.minimizer = np.zeros(self.dimension)

    @classmethod
    def linspace(cls, dimension, low=1.0 / 3.0, high=1.0, **kwargs):
        """Hessian with eigenvalues linearly spaced in [low, high]."""
        return cls(eigenvalues=np.linspace(high, low, dimension), **kwargs)

    @property
    def lipschitz(self):
        return float(self.eigenvalues.max())

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * float(x @ self.hessian @ x)

    def gradient(self, x):
        x = utils.as_vector(x, 'x')
        if x.size != self.dimension:
            raise coco_ex.DimensionMismatch(
                reason="x has %d coordinates, objective has %d" %
                       (x.size, self.dimension))
        return self.hessian @ x

    def fingerprint(self):
        return utils.sha1_hexdigest('quadratic', self.hessian)


class Dataset(obj.BaseObject):
    """n examples a_i (rows of `features`) with labels in {-1, +1}."""
    _fields = ['features', 'labels']

    def __init__(self, **kwargs):
        super(Dataset, self).__init__(**kwargs)
        self.features = np.atleast_2d(np.asarray(self.features, dtype=float))
        self.labels = utils.as_vector(self.labels, 'labels')
        if self.features.shape[0] != self.labels.size:
            raise coco_ex.DimensionMismatch(
                reason="%d feature rows but %d labels" %
                       (self.features.shape[0], self.labels.size))
        if not np.all(np.isin(self.labels, (-1.0, 1.0))):
            raise coco_ex.InvalidParameter(name='labels',
                                           value=np.unique(self.labels),
                                           reason="must be -1 or +1")

    @property
    def count(self):
        return self.features.shape[0]

    @property
    def dimension(self):
        return self.features.shape[1]


class LogisticObjective(object):
    """Mean of l_i(x) = log(1 + exp(-y_i a_i^T x)) + (reg / 2) ||x||^2.

    The Tikhonov term is part of every per-example loss, so a sampled
    example gradient is unbiased for the full regularized gradient.
    """

    def __init__(self, dataset, reg=0.0):
        if not reg >= 0:
            raise coco_ex.InvalidParameter(name='lambda', value=reg,
                                           reason="must be >= 0")
        self.dataset = dataset
        self.reg = float(reg)

    @property
    def count(self):
        return self.dataset.count

    @property
    def dimension(self):
        return self.dataset.dimension

    @property
    def lipschitz(self):
        norms = np.sum(self.dataset.features ** 2, axis=1)
        return 0.25 * float(norms.max()) + self.reg

    def value(self, x):
        margins = self.dataset.labels * (self.dataset.features @ x)
        return (float(np.mean(np.logaddexp(0.0, -margins))) +
                0.5 * self.reg * float(x @ x))

    def example_gradient(self, i, x):
        if not 0 <= i < self.count:
            raise coco_ex.ExampleIndexOutOfRange(index=i, count=self.count)
        a_i = self.dataset.features[i]
        y_i = self.dataset.labels[i]
        return (-y_i * special.expit(-y_i * float(a_i @ x)) * a_i +
                self.reg * x)

    def gradient(self, x):
        features, labels = self.dataset.features, self.dataset.labels
        weights = -labels * special.expit(-labels * (features @ x))
        return features.T @ weights / self.count + self.reg * x

    def fingerprint(self):
        return utils.sha1_hexdigest('logistic', self.dataset.features,
                                    self.dataset.labels, self.reg)


def quadratic_true_grad(objective, x):
    return objective.gradient(x)


def logistic_single_grad(objective, i, x):
    x = utils.as_vector(x, 'x')
    if x.size != objective.dimension:
        raise coco_ex.DimensionMismatch(
            reason="x has %d coordinates, dataset has %d" %
                   (x.size, objective.dimension))
    return objective.example_gradient(i, x)


def noisy_query(true_grad, noise, rng, point=None):
    """Adds N(0, sigma^2 I) noise; draws exactly d normals from `rng`."""
    true_grad = utils.as_vector(true_grad, 'true_grad')
    draws = rng.standard_normal(true_grad.size)
    return obj.OracleSample(point=point,
                            gradient=true_grad + noise.sigma * draws)


def lipschitz_estimate(objective):
    """Quadratic: largest Hessian eigenvalue. Logistic: a bound valid for
    every per-example gradient, max_i ||a_i||^2 / 4 + lambda."""
    return objective.lipschitz


def logistic_minimizer(objective, tol=1e-10, max_iter=200000):
    """Minimizer of the full logistic objective, cached per dataset hash.

    Deterministic full-gradient descent with step 1 / L_full, run until the
    gradient norm is at most `tol`.
    """
    key = (objective.fingerprint(), tol)
    if key in _MINIMIZER_CACHE:
        return _MINIMIZER_CACHE[key].copy()

    features = objective.dataset.features
    smoothness = (0.25 * np.linalg.norm(features, 2) ** 2 / objective.count +
                  objective.reg)
    x = np.zeros(objective.dimension)
    grad = objective.gradient(x)
    iteration = 0
    while np.linalg.norm(grad) > tol and iteration < max_iter:
        x = x - grad / smoothness
        grad = objective.gradient(x)
        iteration += 1
    if np.linalg.norm(grad) > tol:
        LOG.warning("Logistic minimizer stopped at gradient norm %g after "
                    "%d iterations", np.linalg.norm(grad), iteration)
    else:
        LOG.debug("Logistic minimizer converged in %d iterations", iteration)
    _MINIMIZER_CACHE[key] = x
    return x.copy()


class GradientOracle(object):
    """Objective paired with a noise model.

    Quadratic objectives answer with additive Gaussian noise. Logistic
    objectives answer with the gradient of one uniformly sampled example,
    the sampling being the only source of noise.
    """

    def __init__(self, objective, noise=None):
        self.objective = objective
        self.noise = noise if noise is not None else NoiseModel(sigma=0.0)
        self._minimizer = None

    @property
    def is_finite_sum(self):
        return isinstance(self.objective, LogisticObjective)

    @property
    def dimension(self):
        return self.objective.dimension

    @property
    def lipschitz(self):
        return lipschitz_estimate(self.objective)

    @property
    def minimizer(self):
        if self._minimizer is None:
            if self.is_finite_sum:
                self._minimizer = logistic_minimizer(self.objective)
            else:
                self._minimizer = self.objective.minimizer
        return self._minimizer

    def exact(self, x):
        return self.objective.gradient(x)

    def query(self, x, rng):
        if self.is_finite_sum:
            i = int(rng.integers(self.objective.count))
            return obj.OracleSample(
                point=x, gradient=self.objective.example_gradient(i, x))
        return noisy_query(self.objective.gradient(x), self.noise, rng,
                           point=x)


def _map_labels(raw_labels):
    distinct = sorted(set(raw_labels))
    if set(distinct) <= {-1.0, 0.0, 1.0}:
        return np.where(np.asarray(raw_labels) > 0, 1.0, -1.0)
    if len(distinct) == 2:
        LOG.info("Mapping libsvm labels %s to -1/+1", distinct)
        return np.where(np.asarray(raw_labels) == distinct[1], 1.0, -1.0)
    raise coco_ex.LibsvmParseError(
        line='*', reason="labels %s are not binary" % distinct)


def parse_libsvm(data, dimension=None):
    """Parses libsvm text ("label idx:val ...") into a dense Dataset.

    Indices are 1-based and strictly ascending within a line; the
    dimension is the largest index seen unless `dimension` is given, in
    which case larger indices are rejected. Labels 0 and -1 map to -1 and
    +1 maps to +1; any other binary pair maps its larger label to +1.
    Blank lines and '#' comments are skipped.
    """
    if isinstance(data, six.binary_type):
        data = io.BytesIO(data)
    elif isinstance(data, six.string_types):
        data = io.StringIO(data)

    rows = []
    raw_labels = []
    seen = 0
    for lineno, line in enumerate(data, start=1):
        if isinstance(line, six.binary_type):
            try:
                line = line.decode('utf-8')
            except UnicodeDecodeError as e:
                raise coco_ex.LibsvmParseError(line=lineno, reason=e)
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            raw_labels.append(float(tokens[0]))
        except ValueError:
            raise coco_ex.LibsvmParseError(
                line=lineno, reason="non-numeric label '%s'" % tokens[0])
        entries = {}
        last = 0
        for token in tokens[1:]:
            idx, sep, val = token.partition(':')
            if not sep:
                raise coco_ex.LibsvmParseError(
                    line=lineno, reason="expected idx:val, got '%s'" % token)
            try:
                idx = int(idx)
                val = float(val)
            except ValueError:
                raise coco_ex.LibsvmParseError(
                    line=lineno, reason="non-numeric field '%s'" % token)
            if idx < 1:
                raise coco_ex.LibsvmParseError(
                    line=lineno, reason="indices are 1-based, got %d" % idx)
            if idx <= last:
                raise coco_ex.LibsvmParseError(
                    line=lineno, reason="non-ascending index %d" % idx)
            entries[idx] = val
            last = idx
        if dimension is not None and last > dimension:
            raise coco_ex.LibsvmParseError(
                line=lineno,
                reason="index %d exceeds dimension %d" % (last, dimension))
        seen = max(seen, last)
        rows.append(entries)

    if dimension is None:
        dimension = seen

    features = np.zeros((len(rows), dimension))
    for i, entries in enumerate(rows):
        for idx, val in entries.items():
            features[i, idx - 1] = val
    return Dataset(features=features, labels=_map_labels(raw_labels))


def serialize_libsvm(dataset):
    """Writes a Dataset as libsvm text.

    Only nonzero entries are written, except that the last column is always
    present so the dimension survives a round trip.
    """
    lines = []
    last = dataset.features.shape[1] - 1
    for row, label in zip(dataset.features, dataset.labels):
        tokens = ['+1' if label > 0 else '-1']
        tokens.extend('%d:%r' % (j + 1, float(v))
                      for j, v in enumerate(row) if v != 0 or j == last)
        lines.append(' '.join(tokens))
    return '\n'.join(lines) + '\n'


def load_libsvm(path, dimension=None):
    try:
        with open(path, 'rb') as fh:
            return parse_libsvm(fh.read(), dimension)
    except (IOError, OSError) as e:
        raise coco_ex.DatasetFileError(path=path, reason=e)
