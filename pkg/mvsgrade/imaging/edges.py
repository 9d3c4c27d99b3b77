"""
Canny edge detection: Gaussian blur, Sobel gradient, non-maximum
suppression and hysteresis thresholding. Convolutions clamp at the border.
"""
import logging

import numpy as np
from scipy import ndimage

from mvsgrade.constants import DEFAULT_BLUR_SIGMA, DEFAULT_LOW_THRESHOLD, \
    DEFAULT_HIGH_THRESHOLD, GAUSSIAN_TRUNCATE

LOG = logging.getLogger(__name__)

_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


class ImageTooSmallError(ValueError):
    pass


class EdgeParams(object):
    """
    :param blur_sigma: Gaussian smoothing width in pixels.
    :param low_threshold: weak-edge gradient threshold.
    :param high_threshold: strong-edge gradient threshold.
    :param relative: thresholds are fractions of the largest suppressed
    gradient magnitude when True, absolute magnitudes otherwise.
    """

    def __init__(self, blur_sigma=DEFAULT_BLUR_SIGMA,
                 low_threshold=DEFAULT_LOW_THRESHOLD,
                 high_threshold=DEFAULT_HIGH_THRESHOLD, relative=True):
        if not blur_sigma > 0:
            raise ValueError('blur_sigma must be positive, got %r' %
                             blur_sigma)
        if not 0 < low_threshold <= high_threshold:
            raise ValueError('need 0 < low_threshold <= high_threshold, got '
                             '%r and %r' % (low_threshold, high_threshold))
        self.blur_sigma = float(blur_sigma)
        self.low_threshold = float(low_threshold)
        self.high_threshold = float(high_threshold)
        self.relative = bool(relative)

    @property
    def kernel_radius(self):
        return int(GAUSSIAN_TRUNCATE * self.blur_sigma + 0.5)

    @property
    def kernel_support(self):
        return 2 * self.kernel_radius + 1

    def to_dict(self):
        return {'blur_sigma': self.blur_sigma,
                'low_threshold': self.low_threshold,
                'high_threshold': self.high_threshold,
                'relative_thresholds': self.relative}

    @classmethod
    def from_dict(cls, data):
        return cls(blur_sigma=data.get('blur_sigma', DEFAULT_BLUR_SIGMA),
                   low_threshold=data.get('low_threshold',
                                          DEFAULT_LOW_THRESHOLD),
                   high_threshold=data.get('high_threshold',
                                           DEFAULT_HIGH_THRESHOLD),
                   relative=data.get('relative_thresholds', True))


def gradient(gray, params):
    """Blurred Sobel gradient; returns (gx, gy) with gy along rows."""
    image = gray.pixels.astype(np.float64)
    smoothed = ndimage.gaussian_filter(image, params.blur_sigma,
                                       mode='nearest',
                                       truncate=GAUSSIAN_TRUNCATE)
    gx = ndimage.sobel(smoothed, axis=1, mode='nearest')
    gy = ndimage.sobel(smoothed, axis=0, mode='nearest')
    return gx, gy


def non_max_suppression(magnitude, gx, gy):
    """
    Keep pixels that peak along the gradient direction, quantized to four
    sectors. A pixel must beat the neighbour behind it strictly and the one
    ahead of it or tie, so a symmetric ridge stays one pixel wide.
    """
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    padded = np.pad(magnitude, 1, mode='constant')
    rows, cols = magnitude.shape

    def shifted(dr, dc):
        return padded[1 + dr:1 + dr + rows, 1 + dc:1 + dc + cols]

    # (row, col) offset pointing along the gradient for each sector
    sectors = [((angle < 22.5) | (angle >= 157.5), (0, 1)),
               ((angle >= 22.5) & (angle < 67.5), (1, 1)),
               ((angle >= 67.5) & (angle < 112.5), (1, 0)),
               ((angle >= 112.5) & (angle < 157.5), (1, -1))]
    keep = np.zeros(magnitude.shape, dtype=bool)
    for sector, (dr, dc) in sectors:
        ahead = shifted(dr, dc)
        behind = shifted(-dr, -dc)
        keep |= sector & (magnitude > behind) & (magnitude >= ahead)
    keep &= magnitude > 0
    return np.where(keep, magnitude, 0.0)


def hysteresis(suppressed, low, high):
    """Weak pixels survive only when 8-connected to a strong pixel."""
    strong = suppressed >= high
    weak = suppressed >= low
    labels, count = ndimage.label(weak, structure=_EIGHT_CONNECTED)
    if count == 0:
        return np.zeros(suppressed.shape, dtype=bool)
    anchored = np.unique(labels[strong])
    anchored = anchored[anchored != 0]
    return np.isin(labels, anchored)


def detect_edges(gray, params=None):
    """
    :return: boolean edge map with the shape of `gray.pixels`.
    :raise ImageTooSmallError: either side shorter than the blur support.
    """
    if params is None:
        params = EdgeParams()
    support = params.kernel_support
    if gray.width < support or gray.height < support:
        raise ImageTooSmallError(
            'image %dx%d is smaller than the %d-pixel blur support' %
            (gray.width, gray.height, support))
    gx, gy = gradient(gray, params)
    magnitude = np.hypot(gx, gy)
    suppressed = non_max_suppression(magnitude, gx, gy)
    peak = suppressed.max()
    if peak <= 0:
        return np.zeros(suppressed.shape, dtype=bool)
    if params.relative:
        low = params.low_threshold * peak
        high = params.high_threshold * peak
    else:
        low, high = params.low_threshold, params.high_threshold
    edges = hysteresis(suppressed, low, high)
    LOG.debug('%d edge pixels (low=%.3f, high=%.3f)', edges.sum(), low, high)
    return edges
