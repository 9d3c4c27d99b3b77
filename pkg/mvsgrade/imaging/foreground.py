import logging

import numpy as np
from scipy import ndimage

from mvsgrade.imaging.edges import detect_edges
from mvsgrade.imaging.image import to_grayscale

LOG = logging.getLogger(__name__)


class ExtractionFailedError(ValueError):
    def __init__(self, image_id, reason='no region enclosed by edges'):
        super(ExtractionFailedError, self).__init__(
            'foreground extraction failed for %s: %s' %
            (image_id if image_id is not None else '<image>', reason))
        self.image_id = image_id
        self.reason = reason


class ForegroundMask(object):
    def __init__(self, member):
        member = np.array(member, dtype=bool, order='C')
        if member.ndim != 2:
            raise ValueError('mask must have shape (height, width)')
        member.flags.writeable = False
        self.member = member

    @property
    def width(self):
        return self.member.shape[1]

    @property
    def height(self):
        return self.member.shape[0]

    @property
    def area(self):
        return int(self.member.sum())

    def __repr__(self):
        return 'ForegroundMask<%dx%d, area=%d>' % (self.width, self.height,
                                                   self.area)


def _border(shape):
    border = np.zeros(shape, dtype=bool)
    border[0, :] = border[-1, :] = True
    border[:, 0] = border[:, -1] = True
    return border


def extract_foreground(img, edges, image_id=None):
    """
    Flood the background from every border pixel through non-edge pixels;
    whatever the flood cannot reach is enclosed by edges. Only the largest
    component holding non-edge pixels is kept; edge lines that enclose
    nothing fail the extraction.
    """
    edges = np.asarray(edges, dtype=bool)
    if edges.shape != (img.height, img.width):
        raise ValueError('edge map %s does not match image %dx%d' %
                         (edges.shape, img.width, img.height))
    open_pixels = ~edges
    regions, _ = ndimage.label(open_pixels)
    seeds = np.unique(regions[_border(edges.shape) & open_pixels])
    background = np.isin(regions, seeds[seeds != 0])

    interior = ~background & ~edges
    if not interior.any():
        raise ExtractionFailedError(image_id)
    components, count = ndimage.label(~background)
    # a component counts only when it encloses at least one non-edge pixel
    sizes = np.bincount(components.ravel(), minlength=count + 1)
    enclosing = np.unique(components[interior])
    sizes[np.setdiff1d(np.arange(count + 1), enclosing)] = 0
    largest = int(np.argmax(sizes))
    LOG.debug('%s: %d enclosed components, keeping %d px',
              image_id, count, sizes[largest])
    return ForegroundMask(components == largest)


def segment(img, params=None, image_id=None):
    """Grayscale, edges and foreground in one call."""
    edges = detect_edges(to_grayscale(img), params)
    return extract_foreground(img, edges, image_id=image_id)
