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
"""`coco` command line entry point."""

import argparse
import functools
import sys

try:
    from oslo_config import cfg as oslo_cfg
    from oslo_log import log as logging
except ImportError:  # pragma: no cover
    oslo_cfg = None
    import logging

import coco_denoiser
from coco_denoiser import config as coco_config
from coco_denoiser import exceptions as coco_ex
from coco_denoiser import experiments

LOG = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_DATA_ERROR = 3


def reraise_io_exception(exc_class, what):
    """Replaces OSError raised by the wrapped call with `exc_class`."""

    def decorator(func):
        @functools.wraps(func)
        def callee(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except (IOError, OSError) as e:
                if exc_class is coco_ex.CocoConfigException:
                    raise exc_class(msg="cannot read %s: %s" % (what, e))
                raise exc_class(reason="cannot access %s: %s" % (what, e))
        return callee
    return decorator


def setup_logging(debug=False):
    if oslo_cfg is None:  # pragma: no cover
        logging.basicConfig(level=logging.DEBUG if debug else logging.INFO)
        return
    conf = oslo_cfg.ConfigOpts()
    logging.register_options(conf)
    conf([], project='coco', default_config_files=[])
    conf.set_override('debug', debug)
    logging.setup(conf, 'coco')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='coco',
        description="Run a COCO gradient denoising experiment.")
    parser.add_argument('kind', choices=coco_config.KINDS,
                        help="experiment to run")
    parser.add_argument('--config', required=True, metavar='PATH',
                        help="key = value experiment file")
    parser.add_argument('--seed', type=int, help="master seed")
    parser.add_argument('--out', metavar='DIR',
                        help="output directory for CSV/SVG files")
    parser.add_argument('--set', action='append', default=[],
                        metavar='KEY=VALUE', dest='overrides',
                        help="override one config option; repeatable")
    parser.add_argument('--svg', action='store_true', default=None,
                        help="also write an SVG plot")
    parser.add_argument('--debug', action='store_true',
                        help="log debug output")
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + coco_denoiser.__version__)
    parser.add_argument('extra_overrides', nargs='*', metavar='KEY=VALUE',
                        help="same as --set")
    return parser


@reraise_io_exception(coco_ex.CocoConfigException, 'config file')
def load_config(args):
    """Config file values overridden by --set pairs and dedicated flags."""
    overrides = coco_config.ExperimentConfig.parse_overrides(
        args.overrides + args.extra_overrides)
    overrides['kind'] = args.kind
    if args.seed is not None:
        overrides['seed'] = args.seed
    if args.out is not None:
        overrides['output_dir'] = args.out
    if args.svg:
        overrides['svg'] = True
    return coco_config.ExperimentConfig.from_file(args.config, overrides)


@reraise_io_exception(coco_ex.CocoDataException, 'experiment files')
def run(cfg):
    return experiments.ExperimentManager(cfg).run()


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(args.debug)
    try:
        cfg = load_config(args)
        paths = run(cfg)
    except coco_ex.CocoDataException as e:
        LOG.error("%s", e)
        return EXIT_DATA_ERROR
    except (coco_ex.CocoConfigException, coco_ex.CocoException) as e:
        LOG.error("%s", e)
        return EXIT_CONFIG_ERROR
    for path in paths:
        LOG.info("Output: %s", path)
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
