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
"""Result tables, their CSV form and a small SVG plotter."""

import csv
import io
import math
import os
from xml.etree import ElementTree

import six

try:
    from oslo_log import log as logging
except ImportError:  # pragma: no cover
    import logging

from coco_denoiser import exceptions as coco_ex
from coco_denoiser import objects as obj

LOG = logging.getLogger(__name__)

COMMENT = '#'
PALETTE = ('#1f77b4', '#d62728', '#2ca02c', '#ff7f0e', '#9467bd',
           '#8c564b', '#e377c2', '#7f7f7f')


def format_cell(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    return six.text_type(value)


def _parse_cell(text):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


class ResultTable(obj.BaseObject):
    """Rectangular table with a provenance header.

    `provenance` is an ordered list of (key, value) pairs written as
    comment lines above the header row; `units` maps column names to
    units.
    """
    _fields = ['name', 'columns', 'units', 'rows', 'provenance']

    def __init__(self, **kwargs):
        super(ResultTable, self).__init__(**kwargs)
        self.columns = list(self.columns or [])
        if not self.columns:
            raise coco_ex.InvalidParameter(name='columns', value=[],
                                           reason="a header is required")
        self.units = dict(self.units or {})
        self.provenance = list(self.provenance or [])
        rows, self.rows = self.rows or [], []
        for row in rows:
            self.append(row)

    def append(self, row):
        row = list(row)
        if len(row) != len(self.columns):
            raise coco_ex.DimensionMismatch(
                reason="row has %d cells, table %s has %d columns" %
                       (len(row), self.name, len(self.columns)))
        self.rows.append(row)

    def column(self, name):
        try:
            index = self.columns.index(name)
        except ValueError:
            raise coco_ex.ColumnNotFound(column=name)
        return [row[index] for row in self.rows]

    def provenance_value(self, key):
        for item_key, value in self.provenance:
            if item_key == key:
                return value
        return None

    def to_csv(self):
        out = io.StringIO()
        for key, value in self.provenance:
            out.write(u'%s %s: %s\n' % (COMMENT, key, value))
        if self.units:
            out.write(u'%s units: %s\n' % (
                COMMENT, ', '.join('%s=%s' % (name, self.units[name])
                                   for name in self.columns
                                   if name in self.units)))
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_cell(v) for v in row])
        return out.getvalue()

    @classmethod
    def from_csv(cls, text, name=None):
        provenance, units, body = [], {}, []
        for line in io.StringIO(six.text_type(text)):
            if line.startswith(COMMENT):
                key, _, value = line[1:].strip().partition(': ')
                if key == 'units':
                    for item in value.split(', '):
                        column, _, unit = item.partition('=')
                        units[column] = unit
                else:
                    provenance.append((key, value))
            elif line.strip():
                body.append(line)
        reader = csv.reader(body)
        try:
            columns = next(reader)
        except StopIteration:
            raise coco_ex.CocoDataException(reason="CSV without header row")
        rows = [[_parse_cell(cell) for cell in row] for row in reader]
        return cls(name=name, columns=columns, units=units, rows=rows,
                   provenance=provenance)


def write_table(table, directory):
    """Writes <directory>/<table.name>.csv and returns its path."""
    if not os.path.isdir(directory):
        os.makedirs(directory)
    path = os.path.join(directory, '%s.csv' % table.name)
    with io.open(path, 'w', encoding='utf-8', newline='') as csv_file:
        csv_file.write(table.to_csv())
    LOG.info("Wrote %d rows to %s", len(table.rows), path)
    return path


class PlotSpec(obj.BaseObject):
    """Which columns to draw: `x` against `y`, with `err` as +-1 error
    bars and one polyline per distinct `series` value."""
    _fields = ['x', 'y', 'err', 'series', 'title']
    _defaults = {'title': ''}

    @property
    def columns(self):
        return [c for c in (self.x, self.y, self.err, self.series) if c]


_WIDTH, _HEIGHT, _MARGIN = 640, 480, 60


def _finite(value):
    return isinstance(value, (six.integer_types, float)) and \
        math.isfinite(value)


def _span(values):
    if not values:
        return 0.0, 1.0
    low, high = min(values), max(values)
    if low == high:
        low, high = low - 1.0, high + 1.0
    return float(low), float(high)


def _fmt(value):
    return '%.2f' % value


def emit_svg(table, spec, path=None):
    """Renders `table` as an SVG line plot and returns the document text.

    Rows with a non-finite x or y are left out. The output depends only on
    the table and the plot spec.
    """
    for column in spec.columns:
        if column not in table.columns:
            raise coco_ex.ColumnNotFound(column=column)

    xs, ys = table.column(spec.x), table.column(spec.y)
    errs = table.column(spec.err) if spec.err else [0.0] * len(xs)
    labels = table.column(spec.series) if spec.series else [''] * len(xs)
    points = [(x, y, e if _finite(e) else 0.0, s)
              for x, y, e, s in zip(xs, ys, errs, labels)
              if _finite(x) and _finite(y)]

    x_low, x_high = _span([p[0] for p in points])
    y_low, y_high = _span([p[1] - p[2] for p in points] +
                          [p[1] + p[2] for p in points])
    plot_w = _WIDTH - 2 * _MARGIN
    plot_h = _HEIGHT - 2 * _MARGIN

    def sx(x):
        return _MARGIN + (x - x_low) / (x_high - x_low) * plot_w

    def sy(y):
        return _HEIGHT - _MARGIN - (y - y_low) / (y_high - y_low) * plot_h

    svg = ElementTree.Element('svg', {
        'xmlns': 'http://www.w3.org/2000/svg',
        'width': str(_WIDTH), 'height': str(_HEIGHT),
        'viewBox': '0 0 %d %d' % (_WIDTH, _HEIGHT)})
    if spec.title:
        title = ElementTree.SubElement(svg, 'text', {
            'x': str(_WIDTH // 2), 'y': str(_MARGIN // 2),
            'text-anchor': 'middle'})
        title.text = spec.title
    axes = ElementTree.SubElement(svg, 'g', {'class': 'axes',
                                             'stroke': 'black'})
    bottom, left = _HEIGHT - _MARGIN, _MARGIN
    ElementTree.SubElement(axes, 'line', {
        'x1': str(left), 'y1': str(bottom),
        'x2': str(_WIDTH - _MARGIN), 'y2': str(bottom)})
    ElementTree.SubElement(axes, 'line', {
        'x1': str(left), 'y1': str(bottom),
        'x2': str(left), 'y2': str(_MARGIN)})
    for text, x, y, anchor in ((_fmt(x_low), left, bottom + 20, 'start'),
                               (_fmt(x_high), _WIDTH - _MARGIN,
                                bottom + 20, 'end'),
                               (_fmt(y_low), left - 5, bottom, 'end'),
                               (_fmt(y_high), left - 5, _MARGIN, 'end'),
                               (spec.x, _WIDTH // 2, _HEIGHT - 15,
                                'middle'),
                               (spec.y, 15, _HEIGHT // 2, 'middle')):
        label = ElementTree.SubElement(svg, 'text', {
            'x': str(x), 'y': str(y), 'text-anchor': anchor,
            'font-size': '12'})
        label.text = text

    series = []
    for point in points:
        if point[3] not in series:
            series.append(point[3])
    for i, name in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        group = ElementTree.SubElement(svg, 'g', {
            'class': 'series', 'data-series': six.text_type(name)})
        members = [p for p in points if p[3] == name]
        ElementTree.SubElement(group, 'polyline', {
            'fill': 'none', 'stroke': color,
            'points': ' '.join('%s,%s' % (_fmt(sx(p[0])), _fmt(sy(p[1])))
                               for p in members)})
        for x, y, err, _ in members:
            ElementTree.SubElement(group, 'path', {
                'class': 'error-bar', 'stroke': color,
                'd': 'M %s %s L %s %s' % (_fmt(sx(x)), _fmt(sy(y - err)),
                                          _fmt(sx(x)), _fmt(sy(y + err)))})
            ElementTree.SubElement(group, 'circle', {
                'cx': _fmt(sx(x)), 'cy': _fmt(sy(y)), 'r': '2',
                'fill': color})

    document = ElementTree.tostring(svg, encoding='unicode')
    if path is not None:
        with io.open(path, 'w', encoding='utf-8') as svg_file:
            svg_file.write(document)
        LOG.info("Wrote plot %s", path)
    return document
