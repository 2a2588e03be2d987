__author__ = 'The coco-denoiser Authors'
__version__ = '0.1.0'
