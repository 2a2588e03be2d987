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

import hashlib

import numpy as np
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

LOG = logging.getLogger(__name__)


def safe_json_load(data):
    try:
        return jsonutils.loads(data)
    except ValueError:
        LOG.debug("Value is not json, keeping it as text: %s", data)


def try_value_to_bool(value):
    """Tries to convert value into boolean.

    Values accepted as True are 'true', 'on' and 'yes', values accepted as
    False are 'false', 'off' and 'no' (case independent).

    Returns:
        True, False, or original value in case of failed conversion.
    """
    val = str(value).lower()
    if val in ('true', 'on', 'yes'):
        return True
    elif val in ('false', 'off', 'no'):
        return False
    return value


def parse_value(text):
    """Decodes a config value written as text.

    Numbers, lists and null are read as JSON; on/off style words become
    booleans; everything else is returned as the stripped string.
    """
    if not isinstance(text, six.string_types):
        return text
    text = text.strip()
    value = try_value_to_bool(text)
    if isinstance(value, bool):
        return value
    decoded = safe_json_load(text)
    if decoded is None and text != 'null':
        return text
    return decoded


def sha1_hexdigest(*chunks):
    """SHA-1 over text and array chunks, arrays hashed by dtype+shape+bytes."""
    digest = hashlib.sha1()
    for chunk in chunks:
        if isinstance(chunk, np.ndarray):
            digest.update(str(chunk.dtype).encode('utf-8'))
            digest.update(str(chunk.shape).encode('utf-8'))
            digest.update(np.ascontiguousarray(chunk).tobytes())
        else:
            digest.update(six.text_type(chunk).encode('utf-8'))
    return digest.hexdigest()


def rng_stream(master_seed, index=0):
    """Random stream owned by replication `index` of a seeded run.

    The stream depends only on (master_seed, index), so results do not
    depend on how replications are scheduled across workers.
    """
    return np.random.default_rng([int(master_seed), int(index)])


def as_vector(value, name='vector'):
    vec = np.atleast_1d(np.asarray(value, dtype=float))
    if vec.ndim != 1:
        raise coco_ex.DimensionMismatch(
            reason="%s must be one-dimensional, got shape %s" %
                   (name, vec.shape))
    return vec
