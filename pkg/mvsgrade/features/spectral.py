"""
Normalized RGB spectral patterns: one 256-bin intensity histogram per
channel over the foreground pixels, each divided by the foreground pixel
count. Background pixels are excluded from the counts, not zeroed, so bin 0
only counts genuinely black produce pixels.
"""
import numpy as np

from mvsgrade.constants import CHANNEL_BINS, CHANNELS, PATTERN_SIZE
from mvsgrade.imaging.foreground import ExtractionFailedError

CHANNEL_NAMES = ('red', 'green', 'blue')


class SpectralPattern(object):
    """768 fractions: red bins 0-255, green 256-511, blue 512-767."""

    def __init__(self, values):
        values = np.array(values, dtype=np.float64)
        if values.shape != (PATTERN_SIZE,):
            raise ValueError('spectral pattern needs %d values, got %s' %
                             (PATTERN_SIZE, values.shape))
        if np.any(values < 0) or np.any(values > 1):
            raise ValueError('spectral pattern values must lie in [0, 1]')
        values.flags.writeable = False
        self.values = values

    def channel(self, index):
        if isinstance(index, str):
            index = CHANNEL_NAMES.index(index)
        return self.values[index * CHANNEL_BINS:(index + 1) * CHANNEL_BINS]

    def __len__(self):
        return PATTERN_SIZE

    def __eq__(self, other):
        return isinstance(other, SpectralPattern) and \
            np.array_equal(self.values, other.values)

    def __ne__(self, other):
        return not self == other


def bin_index(channel, intensity):
    return channel * CHANNEL_BINS + intensity


def extract_spectral_pattern(img, mask, image_id=None):
    """
    :raise ExtractionFailedError: the mask selects no pixel.
    """
    member = np.asarray(mask.member, dtype=bool)
    if member.shape != (img.height, img.width):
        raise ValueError('mask %s does not match image %dx%d' %
                         (member.shape, img.width, img.height))
    produce = img.pixels[member]
    count = produce.shape[0]
    if count == 0:
        raise ExtractionFailedError(image_id, 'empty foreground mask')
    blocks = [np.bincount(produce[:, c], minlength=CHANNEL_BINS) / count
              for c in range(CHANNELS)]
    return SpectralPattern(np.concatenate(blocks))
