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


class BaseExc(Exception):
    """Base Exception

    To correctly use this class, inherit from it and define
    a 'message' property. That message will get printf'd
    with the keyword arguments provided to the constructor.
    """
    message = "An unknown exception occurred."

    def __init__(self, **kwargs):
        super(BaseExc, self).__init__(self.message % kwargs)
        self.msg = self.message % kwargs
        self.kwargs = kwargs


class CocoException(BaseExc):
    """Generic denoiser/optimizer exception."""
    message = "COCO error: %(reason)s"


class DimensionMismatch(CocoException):
    message = "Dimension mismatch: %(reason)s"


class InvalidParameter(CocoException):
    message = "Invalid value for %(name)s: %(value)s (%(reason)s)"


class InvalidLipschitzConstant(InvalidParameter):
    message = "Lipschitz constant must be positive, got %(value)s"


class BlockStructureMismatch(CocoException):
    message = "Expected %(expected)s blocks of dimension %(dim)s, " \
              "got array of shape %(shape)s"


class CoincidentPoints(CocoException):
    message = "Query points %(m)s and %(l)s coincide; " \
              "coalesce them before building the dual problem"


class WindowLengthMismatch(CocoException):
    message = "Cannot shift dual state between windows with " \
              "%(prev)s and %(new)s pairs"


class ExampleIndexOutOfRange(CocoException):
    message = "Example index %(index)s is out of range for " \
              "a dataset of %(count)s examples"


class EmptyArrivalSet(CocoException):
    message = "No example has arrived yet, cannot take a STRSAGA step"


class ColumnNotFound(CocoException):
    message = "Result table has no column '%(column)s'"


class CocoDataException(BaseExc):
    """Generic data ingestion exception."""
    message = "Data error: %(reason)s"


class LibsvmParseError(CocoDataException):
    message = "Malformed libsvm data at line %(line)s: %(reason)s"


class DatasetFileError(CocoDataException):
    message = "Cannot read dataset '%(path)s': %(reason)s"


class CocoConfigException(BaseExc):
    """Generic Config Exception."""
    message = "Config error: %(msg)s"
