import logging
import os

import numpy as np
from PIL import Image

from mvsgrade.constants import LUMA_WEIGHTS

LOG = logging.getLogger(__name__)

SUPPORTED_FORMATS = {'PNG', 'PPM', 'JPEG'}


class ImageDecodeError(ValueError):
    def __init__(self, path, reason):
        super(ImageDecodeError, self).__init__(
            'cannot decode image %s: %s' % (path, reason))
        self.path = path
        self.reason = reason


def _frozen(array):
    array = np.array(array, order='C')
    array.flags.writeable = False
    return array


class RgbImage(object):
    """
    Row-major RGB pixel grid, stored as a read-only uint8 array of shape
    (height, width, 3).
    """

    def __init__(self, pixels):
        pixels = np.asarray(pixels)
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise ValueError('RGB pixels must have shape (height, width, 3), '
                             'got %s' % (pixels.shape,))
        if pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ValueError('image must be at least 1x1')
        if pixels.dtype != np.uint8:
            if np.any(pixels < 0) or np.any(pixels > 255):
                raise ValueError('channel intensities must lie in [0, 255]')
            pixels = pixels.astype(np.uint8)
        self.pixels = _frozen(pixels)

    @classmethod
    def from_rows(cls, width, height, values):
        """Build from a flat row-major sequence of (r, g, b) tuples."""
        if len(values) != width * height:
            raise ValueError('expected %d pixels, got %d' %
                             (width * height, len(values)))
        return cls(np.asarray(values, dtype=np.int64).reshape(height, width,
                                                              3))

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    def __eq__(self, other):
        return isinstance(other, RgbImage) and \
            np.array_equal(self.pixels, other.pixels)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'RgbImage<%dx%d>' % (self.width, self.height)


class GrayImage(object):
    """Single-channel uint8 intensities in [0, 255]."""

    def __init__(self, pixels):
        pixels = np.asarray(pixels)
        if pixels.ndim != 2:
            raise ValueError('gray pixels must have shape (height, width)')
        self.pixels = _frozen(pixels.astype(np.uint8, copy=False))

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]


def load_image(path):
    """
    Decode a PNG, binary PPM (P6) or JPEG file.
    :raise ImageDecodeError: unreadable, unsupported, truncated or empty file.
    """
    path = os.fspath(path)
    try:
        with Image.open(path) as img:
            fmt = img.format
            if fmt not in SUPPORTED_FORMATS:
                raise ImageDecodeError(path, 'unsupported format %s' % fmt)
            img.load()
            rgb = np.array(img.convert('RGB'), dtype=np.uint8)
    except ImageDecodeError:
        raise
    except (OSError, SyntaxError, ValueError) as e:
        raise ImageDecodeError(path, str(e) or e.__class__.__name__)
    if rgb.ndim != 3 or rgb.shape[0] == 0 or rgb.shape[1] == 0:
        raise ImageDecodeError(path, 'zero-dimension image')
    LOG.debug('Loaded %s (%dx%d, %s)', path, rgb.shape[1], rgb.shape[0], fmt)
    return RgbImage(rgb)


def save_image(img, path):
    """Write an RgbImage losslessly; the format follows the extension."""
    Image.fromarray(np.asarray(img.pixels)).save(os.fspath(path))


def save_mask_pgm(mask, path):
    """Debug dump of a foreground mask as binary PGM (P5), 255 = produce."""
    data = np.where(mask.member, 255, 0).astype(np.uint8)
    Image.fromarray(data).save(os.fspath(path), format='PPM')


def to_grayscale(img):
    weights = np.asarray(LUMA_WEIGHTS)
    luma = img.pixels.astype(np.float64) @ weights
    return GrayImage(np.clip(np.floor(luma + 0.5), 0, 255))
